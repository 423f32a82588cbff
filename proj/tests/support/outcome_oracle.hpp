#pragma once

// Independent re-evaluation of the safety and liveness clauses from a run's
// final states and a per-participant summary of what it received. Written
// without reference to the checker code; tests compare the two.

#include "xpay/simulator.hpp"

#include <map>
#include <set>
#include <string>

namespace xpay::oracle {

struct Holdings {
    std::int64_t credited = 0;
    std::int64_t debited = 0;
    std::set<PayloadKind> certificates;  // kinds received from their author's chain
    bool issued_chi = false;
    bool violation = false;
};

inline std::map<ParticipantId, Holdings> summarise(const SimulationResult& r) {
    std::map<ParticipantId, Holdings> h;
    const auto bob = ParticipantId::customer(r.trace.header.payment.n);
    for (const auto& e : r.trace.entries) {
        auto& mine = h[e.who];
        if (const auto* t = std::get_if<TransferRecord>(&e.record)) {
            (t->credit ? mine.credited : mine.debited) += t->amount;
        } else if (const auto* d = std::get_if<DeliveredRecord>(&e.record)) {
            const auto k = d->message.payload().kind();
            const bool from_tm = d->message.signer().is_manager();
            if ((k == PayloadKind::Certificate && d->message.signer() == bob) ||
                ((k == PayloadKind::AbortCert || k == PayloadKind::CommitCert) && from_tm))
                mine.certificates.insert(k);
        } else if (const auto* s = std::get_if<SentRecord>(&e.record)) {
            if (e.who == bob && s->message.signer() == bob &&
                s->message.payload().kind() == PayloadKind::Certificate)
                mine.issued_chi = true;
        } else if (std::holds_alternative<ViolationRecord>(e.record)) {
            mine.violation = true;
        }
    }
    return h;
}

struct Outcome {
    bool es = false;
    bool cs1 = false;
    bool cs2 = false;
    bool cs3 = false;
    bool cons = false;
    bool cc = false;
    bool liveness = false;
};

/// Which clauses are violated. Customer clauses apply to terminated
/// customers whose adjacent escrows are compliant.
inline Outcome violations(const SimulationResult& r) {
    const auto& hdr = r.trace.header;
    const auto n = hdr.payment.n;
    const auto amount = hdr.payment.amount;
    const bool weak = hdr.variant == Variant::Weak;
    const auto h = summarise(r);
    auto held = [&](ParticipantId p) {
        auto it = h.find(p);
        return it == h.end() ? Holdings{} : it->second;
    };
    auto compliant = [&](ParticipantId p) { return r.finals.at(p).compliant; };
    auto shielded_done = [&](std::uint32_t i) {
        const auto c = ParticipantId::customer(i);
        if (!compliant(c) || !r.finals.at(c).terminal) return false;
        if (i > 0 && !compliant(ParticipantId::escrow(i - 1))) return false;
        if (i < n && !compliant(ParticipantId::escrow(i))) return false;
        return true;
    };

    Outcome o;
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto e = ParticipantId::escrow(i);
        if (compliant(e) && (held(e).violation || r.finals.at(e).balance < 0)) o.es = true;
    }

    const auto alice = ParticipantId::customer(0);
    if (shielded_done(0)) {
        const bool refunded = r.finals.at(alice).balance == amount;
        const auto& certs = held(alice).certificates;
        const bool ok = weak ? certs.contains(PayloadKind::CommitCert) ||
                                   (refunded && certs.contains(PayloadKind::AbortCert))
                             : refunded || certs.contains(PayloadKind::Certificate);
        o.cs1 = !ok;
    }

    const auto bob = ParticipantId::customer(n);
    if (shielded_done(n)) {
        const bool paid = r.finals.at(bob).balance >= amount;
        const bool ok = weak ? paid || held(bob).certificates.contains(PayloadKind::AbortCert)
                             : paid || !held(bob).issued_chi;
        o.cs2 = !ok;
    }

    for (std::uint32_t i = 1; i < n; ++i)
        if (shielded_done(i) && r.finals.at(ParticipantId::customer(i)).balance < amount) o.cs3 = true;

    std::int64_t opening = 0;
    for (const auto& [who, v] : hdr.opening) opening += v;
    o.cons = r.ledger.total() != opening || r.ledger.in_transit() < 0;

    if (weak) {
        bool abort_seen = false;
        bool commit_seen = false;
        for (const auto& [who, mine] : h) {
            abort_seen |= mine.certificates.contains(PayloadKind::AbortCert);
            commit_seen |= mine.certificates.contains(PayloadKind::CommitCert);
        }
        o.cc = abort_seen && commit_seen;
    }

    bool everyone_compliant = true;
    for (const auto& [who, f] : r.finals) everyone_compliant &= f.compliant;
    bool patient = true;
    for (const auto& p : hdr.patience) patient &= !p.has_value();
    const bool expected = everyone_compliant && (!weak || patient || hdr.patience_sufficient) &&
                          r.trace.status == RunStatus::Completed;
    o.liveness = expected && r.finals.at(bob).balance < amount;
    return o;
}

}  // namespace xpay::oracle
