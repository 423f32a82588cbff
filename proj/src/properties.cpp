#include "xpay/properties.hpp"

#include "xpay/timing.hpp"

#include <algorithm>
#include <functional>

namespace xpay {
namespace {

constexpr std::size_t kWitnessCap = 16;

template <class R>
const R* as(const TraceEntry& e) {
    return std::get_if<R>(&e.record);
}

Verdict make(std::string_view name, Status s, std::string detail = {}, std::vector<std::size_t> witness = {}) {
    if (witness.size() > kWitnessCap) witness.resize(kWitnessCap);
    return {std::string(name), s, std::move(witness), std::move(detail)};
}

ParticipantId bob_of(const Trace& t) { return ParticipantId::customer(t.header.payment.n); }

std::vector<ParticipantId> escrows_of(ParticipantId customer, std::uint32_t n) {
    std::vector<ParticipantId> out;
    if (customer.index >= 1) out.push_back(ParticipantId::escrow(customer.index - 1));
    if (customer.index < n) out.push_back(ParticipantId::escrow(customer.index));
    return out;
}

/// The customer and every escrow it banks with comply.
bool shielded(const Trace& t, ParticipantId customer) {
    if (!t.compliant(customer)) return false;
    for (const auto& e : escrows_of(customer, t.header.payment.n))
        if (!t.compliant(e)) return false;
    return true;
}

std::optional<std::size_t> terminal_of(const Trace& t, ParticipantId who) {
    for (std::size_t i = 0; i < t.entries.size(); ++i)
        if (t.entries[i].who == who && as<TerminalRecord>(t.entries[i])) return i;
    return std::nullopt;
}

/// First delivery to `who` before index `limit` of a message with this kind
/// and signer for the trace's payment.
std::optional<std::size_t> first_delivery(const Trace& t, ParticipantId who, PayloadKind kind, ParticipantId signer,
                                          std::size_t limit) {
    for (std::size_t i = 0; i < std::min(limit, t.entries.size()); ++i) {
        const auto& e = t.entries[i];
        if (e.who != who) continue;
        const auto* d = as<DeliveredRecord>(e);
        if (d && d->message.payload().kind() == kind && d->message.signer() == signer &&
            d->message.payload().instance() == t.header.payment.id)
            return i;
    }
    return std::nullopt;
}

std::vector<std::size_t> entries_of(const Trace& t, ParticipantId who) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < t.entries.size(); ++i)
        if (t.entries[i].who == who) out.push_back(i);
    return out;
}

std::vector<std::size_t> transfers_of(const Trace& t, ParticipantId who, std::size_t upto) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i <= upto && i < t.entries.size(); ++i) {
        const auto* tr = as<TransferRecord>(t.entries[i]);
        if (tr && (tr->from == who || tr->to == who)) out.push_back(i);
    }
    return out;
}

/// First money transfer or self-signed certificate/commit request by `who`.
std::optional<std::size_t> first_action(const Trace& t, ParticipantId who) {
    for (std::size_t i = 0; i < t.entries.size(); ++i) {
        const auto& e = t.entries[i];
        if (e.who != who) continue;
        const auto* s = as<SentRecord>(e);
        if (!s) continue;
        const auto k = s->message.payload().kind();
        if (k == PayloadKind::Money) return i;
        if ((k == PayloadKind::Certificate || k == PayloadKind::CommitReq) && s->message.signer() == who) return i;
    }
    return std::nullopt;
}

/// Local time `who` reached when the run stopped.
Time final_local(const Trace& t, ParticipantId who) {
    const Time end = t.entries.empty() ? Time{0} : t.entries.back().real;
    const auto it = t.header.clocks.find(who);
    return it == t.header.clocks.end() ? end : read_clock(it->second, end);
}

bool patience_finite(const Trace& t, ParticipantId customer) {
    const auto& p = t.header.patience;
    return customer.index < p.size() && p[customer.index].has_value();
}

Verdict customer_outcome(const Trace& t, std::string_view name, ParticipantId who,
                         const std::function<bool(const TraceEntry&, std::size_t)>& ok) {
    if (!shielded(t, who)) return make(name, Status::Vacuous, to_string(who) + " or an escrow is faulty");
    const auto term = terminal_of(t, who);
    if (!term) return make(name, Status::Vacuous, to_string(who) + " did not terminate");
    if (ok(t.entries[*term], *term)) return make(name, Status::Holds);
    auto w = transfers_of(t, who, *term);
    w.push_back(*term);
    return make(name, Status::Violated, to_string(who) + " terminated empty-handed", w);
}

}  // namespace

std::string to_string(Status s) {
    switch (s) {
    case Status::Holds: return "holds";
    case Status::Violated: return "violated";
    case Status::Vacuous: return "vacuous";
    case Status::Inapplicable: return "inapplicable";
    }
    return "?";
}

Verdict check_consistency(const Trace& t) {
    for (std::size_t i = 0; i < t.entries.size(); ++i) {
        const auto& e = t.entries[i];
        const auto* v = as<ViolationRecord>(e);
        if (!v || !t.compliant(e.who)) continue;
        auto w = transfers_of(t, e.who, i);
        w.push_back(i);
        return make(kConsistency, Status::Violated, to_string(e.who) + ": " + v->reason, w);
    }
    return make(kConsistency, Status::Holds);
}

Verdict check_termination(const Trace& t, std::optional<Time> bound, TerminationAnchor anchor) {
    std::size_t covered = 0;
    for (std::uint32_t i = 0; i <= t.header.payment.n; ++i) {
        const auto who = ParticipantId::customer(i);
        if (!shielded(t, who)) continue;
        Time start{0};
        std::vector<std::size_t> w;
        if (bound) {
            if (anchor == TerminationAnchor::FirstAction) {
                const auto act = first_action(t, who);
                if (!act) continue;
                start = t.entries[*act].real;
                w.push_back(*act);
            }
        } else if (!patience_finite(t, who) && !t.all_compliant()) {
            continue;
        }
        ++covered;
        const auto term = terminal_of(t, who);
        if (term && (!bound || t.entries[*term].real <= start + *bound)) continue;
        if (term) w.push_back(*term);
        else if (auto mine = entries_of(t, who); !mine.empty()) w.push_back(mine.back());
        const auto detail = term ? to_string(who) + " terminated at " + format_time(t.entries[*term].real) +
                                       ", after the bound " + format_time(start + *bound)
                                 : to_string(who) + " never terminated";
        return make(kTermination, Status::Violated, detail, w);
    }
    if (covered == 0) return make(kTermination, Status::Vacuous, "no covered customer");
    return make(kTermination, Status::Holds);
}

Verdict check_escrow_security(const Trace& t) {
    auto bal = t.header.opening;
    for (std::size_t i = 0; i < t.entries.size(); ++i) {
        const auto& e = t.entries[i];
        if (e.who.is_escrow() && t.compliant(e.who) && as<ViolationRecord>(e)) {
            auto w = transfers_of(t, e.who, i);
            w.push_back(i);
            return make(kEscrowSecurity, Status::Violated, to_string(e.who) + " tried to pay out money it does not hold",
                        w);
        }
        const auto* tr = as<TransferRecord>(e);
        if (!tr) continue;
        if (tr->credit) bal[tr->to] += tr->amount;
        else bal[tr->from] -= tr->amount;
        for (const auto& who : {tr->from, tr->to}) {
            if (who.is_escrow() && t.compliant(who) && bal[who] < t.header.opening.at(who))
                return make(kEscrowSecurity, Status::Violated, to_string(who) + " fell below its opening balance",
                            transfers_of(t, who, i));
        }
    }
    return make(kEscrowSecurity, Status::Holds);
}

Verdict check_alice_security(const Trace& t) {
    const auto alice = ParticipantId::customer(0);
    const auto opening = t.header.opening.at(alice);
    if (t.header.variant == Variant::Weak) {
        const auto tm = ParticipantId::manager();
        return customer_outcome(t, kAliceSecurity, alice, [&](const TraceEntry& e, std::size_t idx) {
            if (first_delivery(t, alice, PayloadKind::CommitCert, tm, idx)) return true;
            return as<TerminalRecord>(e)->balance >= opening &&
                   first_delivery(t, alice, PayloadKind::AbortCert, tm, idx).has_value();
        });
    }
    return customer_outcome(t, kAliceSecurity, alice, [&](const TraceEntry& e, std::size_t idx) {
        return as<TerminalRecord>(e)->balance >= opening ||
               first_delivery(t, alice, PayloadKind::Certificate, bob_of(t), idx).has_value();
    });
}

Verdict check_bob_security(const Trace& t) {
    const auto bob = bob_of(t);
    const bool weak = t.header.variant == Variant::Weak;
    const auto opening = t.header.opening.at(bob);
    return customer_outcome(t, kBobSecurity, bob, [&](const TraceEntry& e, std::size_t idx) {
        if (as<TerminalRecord>(e)->balance > opening) return true;
        if (weak) return first_delivery(t, bob, PayloadKind::AbortCert, ParticipantId::manager(), idx).has_value();
        for (std::size_t i = 0; i < idx; ++i) {
            const auto* s = as<SentRecord>(t.entries[i]);
            if (s && t.entries[i].who == bob && s->message.payload().kind() == PayloadKind::Certificate &&
                s->message.signer() == bob)
                return false;
        }
        return true;
    });
}

Verdict check_connector_security(const Trace& t) {
    const auto n = t.header.payment.n;
    if (n < 2) return make(kConnectorSecurity, Status::Vacuous, "no connectors");
    std::size_t covered = 0;
    for (std::uint32_t i = 1; i < n; ++i) {
        const auto who = ParticipantId::customer(i);
        const auto opening = t.header.opening.at(who);
        auto v = customer_outcome(t, kConnectorSecurity, who, [&](const TraceEntry& e, std::size_t) {
            return as<TerminalRecord>(e)->balance >= opening;
        });
        if (v.violated()) return v;
        if (v.status == Status::Holds) ++covered;
    }
    if (covered == 0) return make(kConnectorSecurity, Status::Vacuous, "no shielded connector terminated");
    return make(kConnectorSecurity, Status::Holds);
}

Verdict check_liveness(const Trace& t) {
    if (!t.all_compliant()) return make(kLiveness, Status::Vacuous, "faulty participants present");
    if (t.header.variant == Variant::Weak && !t.header.patience_sufficient) {
        for (const auto& p : t.header.patience)
            if (p) return make(kLiveness, Status::Vacuous, "finite patience not declared sufficient");
    }
    const auto bob = bob_of(t);
    for (const auto& e : t.entries) {
        const auto* tr = as<TransferRecord>(e);
        if (tr && tr->credit && tr->to == bob) return make(kLiveness, Status::Holds);
    }
    return make(kLiveness, Status::Violated, "Bob was never paid", entries_of(t, bob));
}

Verdict check_certificate_consistency(const Trace& t) {
    if (t.header.variant != Variant::Weak) return make(kCertificateConsistency, Status::Inapplicable);
    std::optional<std::size_t> commit, abort;
    for (std::size_t i = 0; i < t.entries.size(); ++i) {
        const auto* s = as<SentRecord>(t.entries[i]);
        if (!s || s->message.signer() != ParticipantId::manager()) continue;
        const auto k = s->message.payload().kind();
        if (k == PayloadKind::CommitCert && !commit) commit = i;
        if (k == PayloadKind::AbortCert && !abort) abort = i;
    }
    if (commit && abort)
        return make(kCertificateConsistency, Status::Violated, "both commit and abort were issued", {*commit, *abort});
    return make(kCertificateConsistency, Status::Holds);
}

Verdict check_conservation(const Trace& t) {
    auto bal = t.header.opening;
    std::int64_t total = 0;
    for (const auto& [_, b] : bal) total += b;
    std::int64_t transit = 0;
    for (std::size_t i = 0; i < t.entries.size(); ++i) {
        const auto* tr = as<TransferRecord>(t.entries[i]);
        if (!tr) continue;
        if (tr->credit) {
            bal[tr->to] += tr->amount;
            transit -= tr->amount;
        } else {
            bal[tr->from] -= tr->amount;
            transit += tr->amount;
        }
        std::int64_t sum = transit;
        bool negative = transit < 0;
        for (const auto& [_, b] : bal) {
            sum += b;
            negative = negative || b < 0;
        }
        if (negative || sum != total)
            return make(kConservation, Status::Violated, "value created, destroyed or overdrawn", {i});
    }
    return make(kConservation, Status::Holds);
}

Verdict check_authentication(const Trace& t) {
    for (std::size_t i = 0; i < t.entries.size(); ++i) {
        const auto& e = t.entries[i];
        const auto* s = as<SentRecord>(e);
        if (!s || s->message.signer() == e.who) continue;
        bool seen = false;
        for (std::size_t j = 0; j < i && !seen; ++j) {
            const auto* d = as<DeliveredRecord>(t.entries[j]);
            seen = d && t.entries[j].who == e.who && d->message == s->message;
        }
        if (!seen)
            return make(kAuthentication, Status::Violated,
                        to_string(e.who) + " sent a message signed by " + to_string(s->message.signer()) +
                            " it never received",
                        {i});
    }
    return make(kAuthentication, Status::Holds);
}

Verdict check_guarantee_promise(const Trace& t) {
    if (t.header.variant != Variant::Strong) return make(kGuaranteePromise, Status::Inapplicable);
    std::size_t covered = 0;
    for (std::uint32_t i = 0; i < t.header.payment.n; ++i) {
        const auto self = ParticipantId::escrow(i);
        const auto upstream = ParticipantId::customer(i);
        if (!t.compliant(self)) continue;
        std::optional<Time> window;
        std::optional<std::size_t> deposit;
        for (std::size_t k = 0; k < t.entries.size() && !deposit; ++k) {
            const auto& e = t.entries[k];
            if (e.who != self) continue;
            if (const auto* s = as<SentRecord>(e); s && !window) {
                if (const auto* g = s->message.payload().as<Guarantee>(); g && s->to == upstream) window = g->window;
            }
            if (const auto* d = as<DeliveredRecord>(e); d && window && d->from == upstream) {
                const auto* m = d->message.payload().as<Money>();
                if (m && m->amount == t.header.payment.amount) deposit = k;
            }
        }
        if (!deposit) continue;
        const Time deadline = t.entries[*deposit].local + *window;
        bool kept = false;
        for (std::size_t k = *deposit; k < t.entries.size() && !kept; ++k) {
            const auto& e = t.entries[k];
            const auto* s = as<SentRecord>(e);
            if (e.who != self || !s || s->to != upstream || e.local > deadline) continue;
            const auto kind = s->message.payload().kind();
            kept = kind == PayloadKind::Money || kind == PayloadKind::Certificate;
        }
        if (!kept && t.status == RunStatus::HorizonReached && final_local(t, self) < deadline) continue;
        ++covered;
        if (!kept)
            return make(kGuaranteePromise, Status::Violated,
                        to_string(self) + " did not answer the deposit by local " + format_time(deadline),
                        entries_of(t, self));
    }
    if (covered == 0) return make(kGuaranteePromise, Status::Vacuous, "no deposit reached a compliant escrow");
    return make(kGuaranteePromise, Status::Holds);
}

Verdict check_certificate_promise(const Trace& t) {
    if (t.header.variant != Variant::Strong) return make(kCertificatePromise, Status::Inapplicable);
    const auto bob = bob_of(t);
    const auto eps = t.header.params.epsilon;
    std::size_t covered = 0;
    for (std::uint32_t i = 0; i < t.header.payment.n; ++i) {
        const auto self = ParticipantId::escrow(i);
        const auto downstream = ParticipantId::customer(i + 1);
        if (!t.compliant(self)) continue;
        std::optional<std::size_t> promise;
        for (std::size_t k = 0; k < t.entries.size() && !promise; ++k) {
            const auto* s = as<SentRecord>(t.entries[k]);
            if (s && t.entries[k].who == self && s->to == downstream && s->message.payload().as<Promise>())
                promise = k;
        }
        if (!promise) continue;
        const Time u = t.entries[*promise].local;
        const Time a = as<SentRecord>(t.entries[*promise])->message.payload().as<Promise>()->window;
        std::optional<std::size_t> cert;
        for (std::size_t k = 0; k < t.entries.size() && !cert; ++k) {
            const auto* d = as<DeliveredRecord>(t.entries[k]);
            if (d && t.entries[k].who == self && d->from == downstream && d->message.signer() == bob &&
                d->message.payload().kind() == PayloadKind::Certificate &&
                d->message.payload().instance() == t.header.payment.id)
                cert = k;
        }
        if (!cert) continue;
        const Time v = std::max(t.entries[*cert].local, u);
        if (v >= u + a) continue;
        const Time deadline = v + eps;
        bool kept = false;
        for (std::size_t k = 0; k < t.entries.size() && !kept; ++k) {
            const auto& e = t.entries[k];
            const auto* s = as<SentRecord>(e);
            kept = e.who == self && s && s->to == downstream && s->message.payload().as<Money>() &&
                   e.local <= deadline;
        }
        if (!kept && t.status == RunStatus::HorizonReached && final_local(t, self) < deadline) continue;
        ++covered;
        if (!kept)
            return make(kCertificatePromise, Status::Violated,
                        to_string(self) + " got the certificate at local " + format_time(v) + " but did not pay by " +
                            format_time(deadline),
                        {*promise, *cert});
    }
    if (covered == 0) return make(kCertificatePromise, Status::Vacuous, "no certificate arrived within a promise");
    return make(kCertificatePromise, Status::Holds);
}

std::vector<Verdict> check_all(const Trace& t) {
    const bool strong = t.header.variant == Variant::Strong;
    std::optional<Time> bound;
    if (strong) bound = termination_bound(t.header.params);
    return {check_consistency(t),
            check_termination(t, bound, TerminationAnchor::FirstAction),
            check_escrow_security(t),
            check_alice_security(t),
            check_bob_security(t),
            check_connector_security(t),
            check_liveness(t),
            check_certificate_consistency(t),
            check_conservation(t),
            check_authentication(t),
            check_guarantee_promise(t),
            check_certificate_promise(t)};
}

std::vector<std::string> property_names(Variant) {
    return {std::string(kConsistency),        std::string(kTermination),      std::string(kEscrowSecurity),
            std::string(kAliceSecurity),      std::string(kBobSecurity),      std::string(kConnectorSecurity),
            std::string(kLiveness),           std::string(kCertificateConsistency), std::string(kConservation),
            std::string(kAuthentication),     std::string(kGuaranteePromise), std::string(kCertificatePromise)};
}

bool is_safety_property(std::string_view name) { return name != kTermination && name != kLiveness; }

}  // namespace xpay
