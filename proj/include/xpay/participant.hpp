#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace xpay {

enum class ParticipantKind : std::uint8_t { Escrow, Customer, TransactionManager };

/// Escrows are e_0..e_{n-1}; customers c_0 (Alice) .. c_n (Bob), with
/// c_1..c_{n-1} acting as connectors. The weak variant adds one manager.
struct ParticipantId {
    ParticipantKind kind = ParticipantKind::Customer;
    std::uint32_t index = 0;

    static constexpr ParticipantId escrow(std::uint32_t i) { return {ParticipantKind::Escrow, i}; }
    static constexpr ParticipantId customer(std::uint32_t i) { return {ParticipantKind::Customer, i}; }
    static constexpr ParticipantId manager() { return {ParticipantKind::TransactionManager, 0}; }

    bool is_escrow() const { return kind == ParticipantKind::Escrow; }
    bool is_customer() const { return kind == ParticipantKind::Customer; }
    bool is_manager() const { return kind == ParticipantKind::TransactionManager; }

    auto operator<=>(const ParticipantId&) const = default;
};

/// "e0", "c3", "tm0".
std::string to_string(ParticipantId id);

/// Inverse of to_string. Throws std::invalid_argument.
ParticipantId parse_participant(std::string_view text);

/// Customers c_{i} and c_{i+1} hold accounts at escrow e_i; nobody else does.
bool holds_account(ParticipantId customer, ParticipantId escrow);

/// True when value may move directly between the two (one customer, one escrow
/// where the customer holds an account).
bool may_transfer(ParticipantId a, ParticipantId b);

/// All participants of an n-hop payment, escrows first. The manager is
/// appended when requested.
std::vector<ParticipantId> roster(std::uint32_t n, bool with_manager = false);

}  // namespace xpay
