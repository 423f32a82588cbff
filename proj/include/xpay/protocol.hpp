#pragma once

#include "xpay/automaton.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace xpay {

/// Per-hop timeout windows plus the environment bounds they were sized for.
/// a[i] is escrow e_i's certificate window (the P(a_i) promise), d[i] its
/// resolution window towards c_i (the G(d_i) guarantee). All local-time.
struct TimingParams {
    std::uint32_t n = 1;
    std::vector<Time> a;
    std::vector<Time> d;
    Time epsilon{1};
    Time pi{0};
    Time delta{1};
    Time rho{0};
    Time margin{0};

    /// Throws ConfigError on size mismatch, non-positive windows,
    /// d[i] < a[i], Δ <= 0, or negative π/ρ/margin.
    void validate() const;
};

struct PaymentInstance {
    std::uint64_t id = 1;
    std::uint32_t n = 1;
    std::int64_t amount = 1;
};

// Strong (time-bounded) protocol. Each builder throws ConfigError on an
// out-of-range index.

/// announce G(d_i) -> await deposit -> promise P(a_i), u := now ->
/// await χ or `now >= u + a_i` -> settle (χ upstream and $ downstream in one
/// step) | refund.
Automaton make_escrow(std::uint32_t i, const TimingParams& p, const PaymentInstance& pay, SigningKey key);

/// await G(d_0) -> deposit -> await refund | χ.
Automaton make_alice(const TimingParams& p, const PaymentInstance& pay, SigningKey key);

/// await G(d_i) -> await P(a_{i-1}) -> deposit -> refund | (χ -> forward χ
/// upstream -> await payment). Requires 1 <= i <= n-1.
Automaton make_connector(std::uint32_t i, const TimingParams& p, const PaymentInstance& pay, SigningKey key);

/// await P(a_{n-1}) -> issue χ -> await payment.
Automaton make_bob(const TimingParams& p, const PaymentInstance& pay, SigningKey key);

/// Dispatches to make_alice / make_connector / make_bob.
Automaton make_customer(std::uint32_t i, const TimingParams& p, const PaymentInstance& pay, SigningKey key);

// Weak-liveness variant with a transaction manager.

/// Patience per customer c_0..c_n in local time since start; nullopt means
/// the customer never gives up.
using Patience = std::vector<std::optional<Time>>;

/// Escrows and customers of the weak variant, plus the manager. Throws
/// ConfigError when `patience` does not hold exactly n+1 non-negative entries.
std::map<ParticipantId, Automaton> make_weak_participants(const TimingParams& p, const PaymentInstance& pay,
                                                          const Patience& patience, const KeyAuthority& keys);

Automaton make_weak_escrow(std::uint32_t i, const TimingParams& p, const PaymentInstance& pay, SigningKey key);
Automaton make_weak_customer(std::uint32_t i, const TimingParams& p, const PaymentInstance& pay,
                             std::optional<Time> patience, SigningKey key);

/// Collects LOCK(0..n-1) then Bob's commit request and broadcasts χ_c, unless
/// an abort request arrives first, in which case it broadcasts χ_a. Once
/// decided it answers every later request with the recorded decision.
Automaton make_transaction_manager(const PaymentInstance& pay, SigningKey key);

/// Strong roster: every escrow and customer with its own key.
std::map<ParticipantId, Automaton> make_strong_participants(const TimingParams& p, const PaymentInstance& pay,
                                                            const KeyAuthority& keys);

}  // namespace xpay
