#pragma once

#include "xpay/participant.hpp"

#include <cstdint>
#include <map>

namespace xpay {

/// Integer balances of every participant plus the value currently on the wire.
/// balances + in_transit is constant under every operation.
class Ledger {
public:
    Ledger() = default;
    /// Throws std::invalid_argument on a negative opening balance.
    explicit Ledger(std::map<ParticipantId, std::int64_t> opening);

    std::int64_t balance(ParticipantId id) const;
    std::int64_t in_transit() const { return in_transit_; }
    /// Sum of balances plus in-transit value.
    std::int64_t total() const;
    const std::map<ParticipantId, std::int64_t>& balances() const { return balances_; }

    /// Moves `amount` directly. Throws InsufficientFunds, or
    /// std::invalid_argument for a non-positive amount.
    void transfer(ParticipantId from, ParticipantId to, std::int64_t amount);

    /// First half of a transfer whose delivery is pending.
    void withdraw(ParticipantId from, std::int64_t amount);
    /// Second half: credits value previously withdrawn.
    void deposit(ParticipantId to, std::int64_t amount);

private:
    std::map<ParticipantId, std::int64_t> balances_;
    std::int64_t in_transit_ = 0;
};

}  // namespace xpay
