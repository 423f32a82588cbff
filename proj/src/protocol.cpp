#include "xpay/protocol.hpp"

#include "xpay/errors.hpp"

namespace xpay {
namespace {

constexpr auto kAlice = ParticipantId::customer(0);

class Table {
public:
    StateId input(std::string name) { return add(std::move(name), StateKind::Input); }
    StateId output(std::string name) { return add(std::move(name), StateKind::Output); }
    StateId terminal(std::string name) { return add(std::move(name), StateKind::Terminal); }

    void receive(StateId from, ParticipantId sender, PayloadPattern pattern, StateId to) {
        states_[from].transitions.push_back({ReceiveGuard{sender, std::move(pattern)}, {}, to, {}});
    }
    void timeout(StateId from, std::string var, Time after, StateId to) {
        states_[from].transitions.push_back({TimeoutGuard{std::move(var), after}, {}, to, {}});
    }
    void send(StateId from, std::vector<Emit> emits, StateId to, std::vector<std::string> assign = {}) {
        states_[from].transitions.push_back({SendGuard{}, std::move(assign), to, std::move(emits)});
    }

    std::vector<StateSpec> take() { return std::move(states_); }

private:
    StateId add(std::string name, StateKind kind) {
        states_.push_back({std::move(name), kind, {}});
        return static_cast<StateId>(states_.size() - 1);
    }
    std::vector<StateSpec> states_;
};

PayloadPattern of(PayloadKind kind) { return {.kind = kind}; }
PayloadPattern money(std::int64_t amount) { return {.kind = PayloadKind::Money, .amount = amount}; }
PayloadPattern bobs_certificate(const PaymentInstance& pay) {
    return {.kind = PayloadKind::Certificate, .signer = ParticipantId::customer(pay.n)};
}
PayloadPattern window(PayloadKind kind, Time w) { return {.kind = kind, .window = w}; }

void check_params(const TimingParams& p, const PaymentInstance& pay) {
    p.validate();
    if (pay.n != p.n) throw ConfigError("payment instance and timing parameters disagree on n");
    if (pay.amount <= 0) throw ConfigError("payment amount must be positive");
}

}  // namespace

void TimingParams::validate() const {
    if (n < 1) throw ConfigError("n must be at least 1");
    if (a.size() != n || d.size() != n) throw ConfigError("timing lists must hold exactly n entries");
    for (std::uint32_t i = 0; i < n; ++i) {
        if (a[i] <= 0 || d[i] <= 0) throw ConfigError("timeouts must be positive");
        if (d[i] < a[i]) throw ConfigError("d_" + std::to_string(i) + " is smaller than a_" + std::to_string(i));
    }
    if (epsilon < 0) throw ConfigError("epsilon must be non-negative");
    if (delta <= 0) throw ConfigError("delta must be positive");
    if (pi < 0 || rho < 0 || margin < 0) throw ConfigError("pi, rho and margin must be non-negative");
}

Automaton make_escrow(std::uint32_t i, const TimingParams& p, const PaymentInstance& pay, SigningKey key) {
    check_params(p, pay);
    if (i >= p.n) throw ConfigError("escrow index " + std::to_string(i) + " out of range");
    const auto self = ParticipantId::escrow(i);
    const auto upstream = ParticipantId::customer(i);
    const auto downstream = ParticipantId::customer(i + 1);

    Table t;
    const auto announce = t.output("announce");
    const auto await_deposit = t.input("await-deposit");
    const auto promise = t.output("promise");
    const auto await_cert = t.input("await-certificate");
    const auto settle = t.output("settle");
    const auto refund = t.output("refund");
    const auto paid_out = t.terminal("paid-out");
    const auto refunded = t.terminal("refunded");

    t.send(announce, {{upstream, Payload::guarantee(p.d[i], pay.id)}}, await_deposit);
    t.receive(await_deposit, upstream, money(pay.amount), promise);
    t.send(promise, {{downstream, Payload::promise(p.a[i], pay.id)}}, await_cert, {"u"});
    t.receive(await_cert, downstream, bobs_certificate(pay), settle);
    t.timeout(await_cert, "u", p.a[i], refund);
    t.send(settle, {{upstream, Relay{PayloadKind::Certificate}}, {downstream, Payload::money(pay.amount, pay.id)}},
           paid_out);
    t.send(refund, {{upstream, Payload::money(pay.amount, pay.id)}}, refunded);
    return Automaton(self, pay.id, t.take(), announce, key);
}

Automaton make_alice(const TimingParams& p, const PaymentInstance& pay, SigningKey key) {
    check_params(p, pay);
    const auto e0 = ParticipantId::escrow(0);
    Table t;
    const auto await_g = t.input("await-guarantee");
    const auto deposit = t.output("deposit");
    const auto await_outcome = t.input("await-outcome");
    const auto refunded = t.terminal("refunded");
    const auto has_cert = t.terminal("has-certificate");

    t.receive(await_g, e0, window(PayloadKind::Guarantee, p.d[0]), deposit);
    t.send(deposit, {{e0, Payload::money(pay.amount, pay.id)}}, await_outcome);
    t.receive(await_outcome, e0, money(pay.amount), refunded);
    t.receive(await_outcome, e0, bobs_certificate(pay), has_cert);
    return Automaton(kAlice, pay.id, t.take(), await_g, key);
}

Automaton make_connector(std::uint32_t i, const TimingParams& p, const PaymentInstance& pay, SigningKey key) {
    check_params(p, pay);
    if (i < 1 || i >= p.n) throw ConfigError("connector index " + std::to_string(i) + " out of range");
    const auto own = ParticipantId::escrow(i);
    const auto up = ParticipantId::escrow(i - 1);
    Table t;
    const auto await_g = t.input("await-guarantee");
    const auto await_p = t.input("await-promise");
    const auto deposit = t.output("deposit");
    const auto await_outcome = t.input("await-outcome");
    const auto forward = t.output("forward-certificate");
    const auto await_pay = t.input("await-payment");
    const auto refunded = t.terminal("refunded");
    const auto paid = t.terminal("paid");

    t.receive(await_g, own, window(PayloadKind::Guarantee, p.d[i]), await_p);
    t.receive(await_p, up, window(PayloadKind::Promise, p.a[i - 1]), deposit);
    t.send(deposit, {{own, Payload::money(pay.amount, pay.id)}}, await_outcome);
    t.receive(await_outcome, own, money(pay.amount), refunded);
    t.receive(await_outcome, own, bobs_certificate(pay), forward);
    t.send(forward, {{up, Relay{PayloadKind::Certificate}}}, await_pay);
    t.receive(await_pay, up, money(pay.amount), paid);
    return Automaton(ParticipantId::customer(i), pay.id, t.take(), await_g, key);
}

Automaton make_bob(const TimingParams& p, const PaymentInstance& pay, SigningKey key) {
    check_params(p, pay);
    const auto last = ParticipantId::escrow(p.n - 1);
    const auto self = ParticipantId::customer(p.n);
    Table t;
    const auto await_p = t.input("await-promise");
    const auto issue = t.output("issue-certificate");
    const auto await_pay = t.input("await-payment");
    const auto paid = t.terminal("paid");

    t.receive(await_p, last, window(PayloadKind::Promise, p.a[p.n - 1]), issue);
    t.send(issue, {{last, Payload::certificate(pay.id)}}, await_pay);
    t.receive(await_pay, last, money(pay.amount), paid);
    return Automaton(self, pay.id, t.take(), await_p, key);
}

Automaton make_customer(std::uint32_t i, const TimingParams& p, const PaymentInstance& pay, SigningKey key) {
    if (i == 0) return make_alice(p, pay, key);
    if (i == p.n) return make_bob(p, pay, key);
    return make_connector(i, p, pay, key);
}

std::map<ParticipantId, Automaton> make_strong_participants(const TimingParams& p, const PaymentInstance& pay,
                                                            const KeyAuthority& keys) {
    std::map<ParticipantId, Automaton> out;
    for (std::uint32_t i = 0; i < p.n; ++i)
        out.emplace(ParticipantId::escrow(i), make_escrow(i, p, pay, keys.issue(ParticipantId::escrow(i))));
    for (std::uint32_t i = 0; i <= p.n; ++i)
        out.emplace(ParticipantId::customer(i), make_customer(i, p, pay, keys.issue(ParticipantId::customer(i))));
    return out;
}

// Weak variant ---------------------------------------------------------------

Automaton make_weak_escrow(std::uint32_t i, const TimingParams& p, const PaymentInstance& pay, SigningKey key) {
    check_params(p, pay);
    if (i >= p.n) throw ConfigError("escrow index " + std::to_string(i) + " out of range");
    const auto tm = ParticipantId::manager();
    const auto upstream = ParticipantId::customer(i);
    const auto downstream = ParticipantId::customer(i + 1);

    Table t;
    const auto announce = t.output("announce");
    const auto await_deposit = t.input("await-deposit");
    const auto lock = t.output("lock");
    const auto await_decision = t.input("await-decision");
    const auto release = t.output("release");
    const auto late_deposit = t.input("aborted-await-deposit");
    const auto refund = t.output("refund");
    const auto paid_out = t.terminal("paid-out");
    const auto refunded = t.terminal("refunded");

    t.send(announce, {{upstream, Payload::guarantee(p.d[i], pay.id)}}, await_deposit);
    t.receive(await_deposit, upstream, money(pay.amount), lock);
    t.receive(await_deposit, tm, of(PayloadKind::AbortCert), late_deposit);
    std::vector<Emit> notices{{tm, Payload::lock_notice(i, pay.id)}};
    if (i + 1 == p.n) notices.push_back({downstream, Payload::lock_notice(i, pay.id)});
    t.send(lock, std::move(notices), await_decision);
    t.receive(await_decision, tm, of(PayloadKind::CommitCert), release);
    t.receive(await_decision, tm, of(PayloadKind::AbortCert), refund);
    t.send(release, {{downstream, Payload::money(pay.amount, pay.id)}}, paid_out);
    t.receive(late_deposit, upstream, money(pay.amount), refund);
    t.send(refund, {{upstream, Payload::money(pay.amount, pay.id)}}, refunded);
    return Automaton(ParticipantId::escrow(i), pay.id, t.take(), announce, key);
}

Automaton make_weak_customer(std::uint32_t i, const TimingParams& p, const PaymentInstance& pay,
                             std::optional<Time> patience, SigningKey key) {
    check_params(p, pay);
    if (i > p.n) throw ConfigError("customer index " + std::to_string(i) + " out of range");
    if (patience && *patience < 0) throw ConfigError("patience must be non-negative");
    const auto tm = ParticipantId::manager();
    const auto self = ParticipantId::customer(i);
    Table t;

    if (i == p.n) {
        const auto last = ParticipantId::escrow(p.n - 1);
        const auto await_funding = t.input("await-funding");
        const auto issue = t.output("issue-certificate");
        const auto await_decision = t.input("await-decision");
        const auto await_pay = t.input("await-payment");
        const auto abort_early = t.output("abort-early");
        const auto await_abort = t.input("await-abort");
        const auto request_abort = t.output("request-abort");
        const auto await_after_abort = t.input("await-decision-after-abort");
        const auto paid = t.terminal("paid");
        const auto aborted = t.terminal("aborted");

        t.receive(await_funding, last, {.kind = PayloadKind::LockNotice, .escrow = p.n - 1}, issue);
        t.receive(await_funding, tm, of(PayloadKind::AbortCert), aborted);
        t.send(issue, {{tm, Payload::commit_req(pay.id)}}, await_decision);
        t.receive(await_decision, tm, of(PayloadKind::CommitCert), await_pay);
        t.receive(await_decision, tm, of(PayloadKind::AbortCert), aborted);
        t.receive(await_pay, last, money(pay.amount), paid);
        t.send(abort_early, {{tm, Payload::abort_req(pay.id)}}, await_abort);
        t.receive(await_abort, tm, of(PayloadKind::AbortCert), aborted);
        t.send(request_abort, {{tm, Payload::abort_req(pay.id)}}, await_after_abort);
        t.receive(await_after_abort, tm, of(PayloadKind::CommitCert), await_pay);
        t.receive(await_after_abort, tm, of(PayloadKind::AbortCert), aborted);
        if (patience) {
            t.timeout(await_funding, "start", *patience, abort_early);
            t.timeout(await_decision, "start", *patience, request_abort);
        }
        return Automaton(self, pay.id, t.take(), await_funding, key, {"start"});
    }

    const auto own = ParticipantId::escrow(i);
    const auto await_g = t.input("await-guarantee");
    const auto deposit = t.output("deposit");
    const auto await_decision = t.input("await-decision");
    const auto request_abort = t.output("request-abort");
    const auto await_after_abort = t.input("await-decision-after-abort");
    const auto await_refund = t.input("await-refund");
    const auto abort_early = t.output("abort-early");
    const auto await_abort = t.input("await-abort");
    const auto refunded = t.terminal("refunded");
    const auto aborted = t.terminal("aborted");

    // Alice is done once she holds χ_c; a connector still collects upstream.
    StateId on_commit;
    if (i == 0) {
        on_commit = t.terminal("committed");
    } else {
        on_commit = t.input("await-payment");
        const auto paid = t.terminal("paid");
        t.receive(on_commit, ParticipantId::escrow(i - 1), money(pay.amount), paid);
    }

    t.receive(await_g, own, window(PayloadKind::Guarantee, p.d[i]), deposit);
    t.receive(await_g, tm, of(PayloadKind::AbortCert), aborted);
    t.send(deposit, {{own, Payload::money(pay.amount, pay.id)}}, await_decision);
    t.receive(await_decision, tm, of(PayloadKind::CommitCert), on_commit);
    t.receive(await_decision, tm, of(PayloadKind::AbortCert), await_refund);
    t.send(request_abort, {{tm, Payload::abort_req(pay.id)}}, await_after_abort);
    t.receive(await_after_abort, tm, of(PayloadKind::CommitCert), on_commit);
    t.receive(await_after_abort, tm, of(PayloadKind::AbortCert), await_refund);
    t.receive(await_refund, own, money(pay.amount), refunded);
    t.send(abort_early, {{tm, Payload::abort_req(pay.id)}}, await_abort);
    t.receive(await_abort, tm, of(PayloadKind::AbortCert), aborted);
    if (patience) {
        t.timeout(await_g, "start", *patience, abort_early);
        t.timeout(await_decision, "start", *patience, request_abort);
    }
    return Automaton(self, pay.id, t.take(), await_g, key, {"start"});
}

Automaton make_transaction_manager(const PaymentInstance& pay, SigningKey key) {
    if (pay.n < 1) throw ConfigError("n must be at least 1");
    const auto bob = ParticipantId::customer(pay.n);
    Table t;

    std::vector<StateId> collecting;
    for (std::uint32_t k = 0; k < pay.n; ++k) collecting.push_back(t.input("await-lock-" + std::to_string(k)));
    const auto await_commit = t.input("await-commit-request");
    const auto announce_commit = t.output("announce-commit");
    const auto announce_abort = t.output("announce-abort");
    const auto committed = t.input("decided-commit");
    const auto aborted = t.input("decided-abort");

    auto everyone = [&](Payload payload) {
        std::vector<Emit> out;
        for (std::uint32_t i = 0; i < pay.n; ++i) out.push_back({ParticipantId::escrow(i), payload});
        for (std::uint32_t i = 0; i <= pay.n; ++i) out.push_back({ParticipantId::customer(i), payload});
        return out;
    };
    const PayloadPattern commit_request{.kind = PayloadKind::CommitReq, .signer = bob};

    auto undecided = collecting;
    undecided.push_back(await_commit);
    for (std::size_t k = 0; k < undecided.size(); ++k) {
        if (k < pay.n) {
            const auto idx = static_cast<std::uint32_t>(k);
            t.receive(undecided[k], ParticipantId::escrow(idx), {.kind = PayloadKind::LockNotice, .escrow = idx},
                      undecided[k + 1]);
        } else {
            t.receive(undecided[k], bob, commit_request, announce_commit);
        }
        for (std::uint32_t c = 0; c <= pay.n; ++c)
            t.receive(undecided[k], ParticipantId::customer(c), of(PayloadKind::AbortReq), announce_abort);
    }
    t.send(announce_commit, everyone(Payload::commit_cert(pay.id)), committed);
    t.send(announce_abort, everyone(Payload::abort_cert(pay.id)), aborted);

    // Late requests get the recorded decision back.
    for (auto [decided, cert] : {std::pair{committed, Payload::commit_cert(pay.id)},
                                 std::pair{aborted, Payload::abort_cert(pay.id)}}) {
        for (std::uint32_t c = 0; c <= pay.n; ++c) {
            const auto who = ParticipantId::customer(c);
            const auto reply = t.output("reply-" + to_string(who) + (decided == committed ? "-commit" : "-abort"));
            t.send(reply, {{who, cert}}, decided);
            t.receive(decided, who, of(PayloadKind::AbortReq), reply);
            if (c == pay.n) t.receive(decided, who, commit_request, reply);
        }
    }
    return Automaton(ParticipantId::manager(), pay.id, t.take(), collecting.front(), key);
}

std::map<ParticipantId, Automaton> make_weak_participants(const TimingParams& p, const PaymentInstance& pay,
                                                          const Patience& patience, const KeyAuthority& keys) {
    if (patience.size() != p.n + 1)
        throw ConfigError("patience needs one entry per customer (" + std::to_string(p.n + 1) + ")");
    for (const auto& pt : patience)
        if (pt && *pt < 0) throw ConfigError("patience must be non-negative");
    std::map<ParticipantId, Automaton> out;
    for (std::uint32_t i = 0; i < p.n; ++i)
        out.emplace(ParticipantId::escrow(i), make_weak_escrow(i, p, pay, keys.issue(ParticipantId::escrow(i))));
    for (std::uint32_t i = 0; i <= p.n; ++i)
        out.emplace(ParticipantId::customer(i),
                    make_weak_customer(i, p, pay, patience[i], keys.issue(ParticipantId::customer(i))));
    out.emplace(ParticipantId::manager(), make_transaction_manager(pay, keys.issue(ParticipantId::manager())));
    return out;
}

}  // namespace xpay
