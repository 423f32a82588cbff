#include "xpay/message.hpp"

#include "xpay/errors.hpp"

#include <stdexcept>

namespace xpay {
namespace {

template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

}  // namespace

Payload::Payload(Body body, std::uint64_t instance) : body_(std::move(body)), instance_(instance) {
    std::visit(overloaded{
                   [](const Guarantee& g) {
                       if (g.window <= 0) throw std::invalid_argument("guarantee window must be positive");
                   },
                   [](const Promise& p) {
                       if (p.window <= 0) throw std::invalid_argument("promise window must be positive");
                   },
                   [](const Money& m) {
                       if (m.amount <= 0) throw std::invalid_argument("money amount must be positive");
                   },
                   [](const auto&) {},
               },
               body_);
}

std::string to_string(const Payload& p) {
    return std::visit(overloaded{
                          [](const Guarantee& g) { return "G(" + format_time(g.window) + ")"; },
                          [](const Promise& pr) { return "P(" + format_time(pr.window) + ")"; },
                          [](const Money& m) { return "$(" + std::to_string(m.amount) + ")"; },
                          [](const Certificate&) { return std::string("CHI"); },
                          [](const AbortCert&) { return std::string("CHI_A"); },
                          [](const CommitCert&) { return std::string("CHI_C"); },
                          [](const LockNotice& l) { return "LOCK(" + std::to_string(l.escrow) + ")"; },
                          [](const CommitReq&) { return std::string("COMMIT_REQ"); },
                          [](const AbortReq&) { return std::string("ABORT_REQ"); },
                      },
                      p.body());
}

std::string to_string(PayloadKind k) {
    switch (k) {
        case PayloadKind::Guarantee: return "G";
        case PayloadKind::Promise: return "P";
        case PayloadKind::Money: return "$";
        case PayloadKind::Certificate: return "CHI";
        case PayloadKind::AbortCert: return "CHI_A";
        case PayloadKind::CommitCert: return "CHI_C";
        case PayloadKind::LockNotice: return "LOCK";
        case PayloadKind::CommitReq: return "COMMIT_REQ";
        case PayloadKind::AbortReq: return "ABORT_REQ";
    }
    return "?";
}

PayloadKind parse_payload_kind(std::string_view text) {
    for (int k = 0; k <= static_cast<int>(PayloadKind::AbortReq); ++k) {
        auto kind = static_cast<PayloadKind>(k);
        if (to_string(kind) == text) return kind;
    }
    if (text == "MONEY") return PayloadKind::Money;
    throw std::invalid_argument("unknown message kind '" + std::string(text) + "'");
}

SignedMessage sign(const Payload& payload, ParticipantId signer, SigningKey& key) {
    if (key.owner_ != signer)
        throw AuthorizationError("key of " + to_string(key.owner_) + " cannot sign as " + to_string(signer));
    return SignedMessage(payload, signer, key.next_nonce_++);
}

bool verify(const SignedMessage& msg, ParticipantId claimed_signer) { return msg.signer() == claimed_signer; }

}  // namespace xpay
