#include "xpay/participant.hpp"

#include <charconv>
#include <stdexcept>

namespace xpay {

std::string to_string(ParticipantId id) {
    switch (id.kind) {
        case ParticipantKind::Escrow: return "e" + std::to_string(id.index);
        case ParticipantKind::Customer: return "c" + std::to_string(id.index);
        case ParticipantKind::TransactionManager: return "tm" + std::to_string(id.index);
    }
    return "?";
}

ParticipantId parse_participant(std::string_view text) {
    ParticipantKind kind;
    std::string_view digits;
    if (text.starts_with("tm")) {
        kind = ParticipantKind::TransactionManager;
        digits = text.substr(2);
    } else if (text.starts_with("e")) {
        kind = ParticipantKind::Escrow;
        digits = text.substr(1);
    } else if (text.starts_with("c")) {
        kind = ParticipantKind::Customer;
        digits = text.substr(1);
    } else {
        throw std::invalid_argument("unknown participant '" + std::string(text) + "'");
    }
    std::uint32_t index = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
    if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size())
        throw std::invalid_argument("unknown participant '" + std::string(text) + "'");
    return {kind, index};
}

bool holds_account(ParticipantId customer, ParticipantId escrow) {
    return customer.is_customer() && escrow.is_escrow() &&
           (customer.index == escrow.index || customer.index == escrow.index + 1);
}

bool may_transfer(ParticipantId a, ParticipantId b) {
    return holds_account(a, b) || holds_account(b, a);
}

std::vector<ParticipantId> roster(std::uint32_t n, bool with_manager) {
    std::vector<ParticipantId> out;
    out.reserve(2 * n + 2);
    for (std::uint32_t i = 0; i < n; ++i) out.push_back(ParticipantId::escrow(i));
    for (std::uint32_t i = 0; i <= n; ++i) out.push_back(ParticipantId::customer(i));
    if (with_manager) out.push_back(ParticipantId::manager());
    return out;
}

}  // namespace xpay
