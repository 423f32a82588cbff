#include "xpay/byzantine.hpp"

#include "xpay/errors.hpp"

#include <set>
#include <utility>

namespace xpay {
namespace {

class Silent final : public ByzantineStrategy {
public:
    std::string name() const override { return "silent"; }
    bool follows_protocol() const override { return false; }
};

class DelayOwnSends final : public ByzantineStrategy {
public:
    explicit DelayOwnSends(Time hold) : hold_(hold) {}
    std::string name() const override { return "delay_own_sends"; }
    std::optional<Time> on_prescribed_send(ByzantineContext&, const Outgoing&) override { return hold_; }

private:
    Time hold_;
};

class WithholdCertificate final : public ByzantineStrategy {
public:
    std::string name() const override { return "withhold_certificate"; }
    std::optional<Time> on_prescribed_send(ByzantineContext&, const Outgoing& out) override {
        const auto k = out.message.payload().kind();
        if (k == PayloadKind::Certificate || k == PayloadKind::CommitReq) return std::nullopt;
        return Time{0};
    }
};

/// Bob issues his certificate (or commit request) before anything is funded;
/// anyone else tries to fake Bob's.
class PrematureCertificate final : public ByzantineStrategy {
public:
    std::string name() const override { return "premature_certificate"; }
    void on_start(ByzantineContext& ctx) override {
        const auto& pay = ctx.payment();
        const auto self = ctx.self();
        const auto bob = ParticipantId::customer(pay.n);
        if (ctx.variant() == Variant::Weak) {
            ctx.emit(ParticipantId::manager(), Payload::commit_req(pay.id), bob, Time{0});
            return;
        }
        const auto target = self.index == 0 ? ParticipantId::escrow(0) : ParticipantId::escrow(self.index - 1);
        ctx.emit(target, Payload::certificate(pay.id), bob, Time{0});
    }
};

class GreedyEscrow final : public ByzantineStrategy {
public:
    std::string name() const override { return "greedy_escrow"; }
    std::optional<Time> on_prescribed_send(ByzantineContext&, const Outgoing& out) override {
        if (out.message.payload().kind() == PayloadKind::Money) return std::nullopt;
        return Time{0};
    }
};

/// Follows the protocol and additionally re-sends every signed message it
/// receives, once, to each of its protocol neighbours.
class Replayer final : public ByzantineStrategy {
public:
    std::string name() const override { return "replayer"; }
    void on_deliver(ByzantineContext& ctx, const Envelope& env) override {
        const auto& m = env.message;
        if (m.payload().kind() == PayloadKind::Money) return;
        if (!replayed_.insert({m.signer(), m.nonce()}).second) return;
        for (const auto& to : neighbours(ctx.self(), ctx.payment().n, ctx.variant())) ctx.send(to, m, Time{0});
    }

private:
    std::set<std::pair<ParticipantId, std::uint64_t>> replayed_;
};

class ImpatientAbort final : public ByzantineStrategy {
public:
    std::string name() const override { return "impatient_abort"; }
    void on_start(ByzantineContext& ctx) override {
        ctx.emit(ParticipantId::manager(), Payload::abort_req(ctx.payment().id), ctx.self(), Time{0});
    }
};

}  // namespace

void MessageVault::observe(const SignedMessage& msg) {
    for (const auto& m : seen_)
        if (m == msg) return;
    seen_.push_back(msg);
}

std::optional<SignedMessage> MessageVault::find(const Payload& payload, ParticipantId signer) const {
    for (const auto& m : seen_)
        if (m.signer() == signer && m.payload() == payload) return m;
    return std::nullopt;
}

SignedMessage byzantine_emit(SigningKey& own_key, const MessageVault& vault, const Payload& attempt,
                             ParticipantId as_signer) {
    if (as_signer == own_key.owner()) return sign(attempt, as_signer, own_key);
    if (auto seen = vault.find(attempt, as_signer)) return *seen;
    throw ForgeryRejected(to_string(own_key.owner()) + " cannot sign " + to_string(attempt) + " as " +
                          to_string(as_signer));
}

std::vector<ParticipantId> neighbours(ParticipantId who, std::uint32_t n, Variant variant) {
    std::vector<ParticipantId> out;
    const bool weak = variant == Variant::Weak;
    if (who.is_manager()) {
        for (const auto& p : roster(n, false)) out.push_back(p);
        return out;
    }
    if (who.is_customer()) {
        if (who.index >= 1) out.push_back(ParticipantId::escrow(who.index - 1));
        if (who.index < n) out.push_back(ParticipantId::escrow(who.index));
    } else {
        out.push_back(ParticipantId::customer(who.index));
        out.push_back(ParticipantId::customer(who.index + 1));
    }
    if (weak) out.push_back(ParticipantId::manager());
    return out;
}

std::vector<StrategySpec> strategy_battery(ParticipantId who, Variant variant) {
    std::vector<StrategySpec> out{{"silent", {}}, {"delay_own_sends", {}}, {"replayer", {}}};
    if (who.is_escrow()) out.push_back({"greedy_escrow", {}});
    if (who.is_customer()) out.push_back({"premature_certificate", {}});
    if (who.is_customer() && who.index >= 1) out.push_back({"withhold_certificate", {}});
    if (who.is_customer() && variant == Variant::Weak) out.push_back({"impatient_abort", {}});
    return out;
}

std::unique_ptr<ByzantineStrategy> make_strategy(const StrategySpec& spec, ParticipantId who, Variant variant,
                                                 Time delta) {
    if (who.is_manager()) throw ConfigError("the transaction manager cannot be Byzantine");
    const auto& s = spec.name;
    auto needs = [&](bool ok, const char* what) {
        if (!ok) throw ConfigError("strategy " + s + " applies to " + what + " only, not " + to_string(who));
    };
    if (s == "silent") return std::make_unique<Silent>();
    if (s == "delay_own_sends") return std::make_unique<DelayOwnSends>(spec.delay.value_or(delta));
    if (s == "replayer") return std::make_unique<Replayer>();
    if (s == "greedy_escrow") {
        needs(who.is_escrow(), "escrows");
        return std::make_unique<GreedyEscrow>();
    }
    if (s == "premature_certificate") {
        needs(who.is_customer(), "customers");
        return std::make_unique<PrematureCertificate>();
    }
    if (s == "withhold_certificate") {
        needs(who.is_customer() && who.index >= 1, "connectors and Bob");
        return std::make_unique<WithholdCertificate>();
    }
    if (s == "impatient_abort") {
        needs(who.is_customer() && variant == Variant::Weak, "customers of the weak variant");
        return std::make_unique<ImpatientAbort>();
    }
    throw ConfigError("unknown strategy '" + s + "'");
}

}  // namespace xpay
