#include "xpay/ledger.hpp"

#include "xpay/errors.hpp"

#include <stdexcept>

namespace xpay {

Ledger::Ledger(std::map<ParticipantId, std::int64_t> opening) : balances_(std::move(opening)) {
    for (const auto& [id, amount] : balances_)
        if (amount < 0) throw std::invalid_argument("negative opening balance for " + to_string(id));
}

std::int64_t Ledger::balance(ParticipantId id) const {
    auto it = balances_.find(id);
    return it == balances_.end() ? 0 : it->second;
}

std::int64_t Ledger::total() const {
    std::int64_t sum = in_transit_;
    for (const auto& [id, amount] : balances_) sum += amount;
    return sum;
}

void Ledger::transfer(ParticipantId from, ParticipantId to, std::int64_t amount) {
    withdraw(from, amount);
    deposit(to, amount);
}

void Ledger::withdraw(ParticipantId from, std::int64_t amount) {
    if (amount <= 0) throw std::invalid_argument("transfer amount must be positive");
    auto& held = balances_[from];
    if (held < amount)
        throw InsufficientFunds(to_string(from) + " holds " + std::to_string(held) + ", needs " +
                                std::to_string(amount));
    held -= amount;
    in_transit_ += amount;
}

void Ledger::deposit(ParticipantId to, std::int64_t amount) {
    if (amount <= 0) throw std::invalid_argument("transfer amount must be positive");
    if (amount > in_transit_) throw std::logic_error("deposit exceeds value in transit");
    in_transit_ -= amount;
    balances_[to] += amount;
}

}  // namespace xpay
