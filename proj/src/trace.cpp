#include "xpay/trace.hpp"

#include <ostream>
#include <sstream>

namespace xpay {
namespace {

std::string message_fields(const SignedMessage& m) {
    return "msg=" + to_string(m.payload()) + " signer=" + to_string(m.signer()) +
           " nonce=" + std::to_string(m.nonce()) + " inst=" + std::to_string(m.payload().instance());
}

struct Fields {
    std::string operator()(const SentRecord& r) const {
        return "to=" + to_string(r.to) + " " + message_fields(r.message) + " at=" + format_time(r.deliver_at);
    }
    std::string operator()(const DeliveredRecord& r) const {
        return "from=" + to_string(r.from) + " " + message_fields(r.message);
    }
    std::string operator()(const RejectedRecord& r) const {
        return "to=" + to_string(r.to) + " msg=" + r.attempt + " reason=" + r.reason;
    }
    std::string operator()(const TimeoutRecord& r) const { return "state=" + r.state; }
    std::string operator()(const StateRecord& r) const { return "state=" + r.state; }
    std::string operator()(const TransferRecord& r) const {
        return "from=" + to_string(r.from) + " to=" + to_string(r.to) + " amount=" + std::to_string(r.amount) +
               " phase=" + (r.credit ? "credit" : "debit");
    }
    std::string operator()(const TerminalRecord& r) const {
        return "state=" + r.state + " balance=" + std::to_string(r.balance);
    }
    std::string operator()(const DiscardRecord& r) const {
        return "from=" + to_string(r.from) + " " + message_fields(r.message);
    }
    std::string operator()(const ViolationRecord& r) const { return "reason=" + r.reason; }
    std::string operator()(const HorizonRecord&) const { return {}; }
};

struct Kind {
    const char* operator()(const SentRecord&) const { return "SENT"; }
    const char* operator()(const DeliveredRecord&) const { return "DELIVERED"; }
    const char* operator()(const RejectedRecord&) const { return "REJECTED"; }
    const char* operator()(const TimeoutRecord&) const { return "TIMEOUT"; }
    const char* operator()(const StateRecord&) const { return "STATE"; }
    const char* operator()(const TransferRecord&) const { return "TRANSFER"; }
    const char* operator()(const TerminalRecord&) const { return "TERMINAL"; }
    const char* operator()(const DiscardRecord&) const { return "DISCARD"; }
    const char* operator()(const ViolationRecord&) const { return "VIOLATION"; }
    const char* operator()(const HorizonRecord&) const { return "HORIZON"; }
};

std::string join_times(const std::vector<Time>& ts) {
    std::string out;
    for (std::size_t i = 0; i < ts.size(); ++i) out += (i ? "," : "") + format_time(ts[i]);
    return out;
}

}  // namespace

std::string record_kind(const Record& r) { return std::visit(Kind{}, r); }

std::string format_entry(const TraceEntry& e) {
    auto line = "t=" + format_time(e.real) + " seq=" + std::to_string(e.seq) + " p=" + to_string(e.who) +
                " lt=" + format_time(e.local) + " ev=" + record_kind(e.record);
    const auto fields = std::visit(Fields{}, e.record);
    if (!fields.empty()) line += " " + fields;
    return line;
}

void write_trace(std::ostream& out, const Trace& trace) {
    const auto& h = trace.header;
    const auto& p = h.params;
    out << "# xpay-trace v1\n";
    out << "# scenario=" << h.digest << "\n";
    out << "# variant=" << to_string(h.variant) << " n=" << h.payment.n << " amount=" << h.payment.amount
        << " instance=" << h.payment.id << " tie_break=" << to_string(h.tie_break)
        << " horizon=" << format_time(h.horizon) << "\n";
    out << "# timing a=" << join_times(p.a) << " d=" << join_times(p.d) << " epsilon=" << format_time(p.epsilon)
        << " pi=" << format_time(p.pi) << " delta=" << format_time(p.delta) << " rho=" << format_time(p.rho)
        << " margin=" << format_time(p.margin) << "\n";
    out << "# byzantine=";
    if (h.byzantine.empty()) out << "none";
    bool first = true;
    for (const auto& [who, spec] : h.byzantine) {
        out << (first ? "" : ",") << to_string(who) << ":" << spec.name;
        if (spec.delay) out << "@" << format_time(*spec.delay);
        first = false;
    }
    out << "\n";
    if (!h.patience.empty()) {
        out << "# patience=";
        for (std::size_t i = 0; i < h.patience.size(); ++i)
            out << (i ? "," : "") << (h.patience[i] ? format_time(*h.patience[i]) : "inf");
        out << (h.patience_sufficient ? " sufficient" : "") << "\n";
    }
    out << "# opening";
    for (const auto& [who, bal] : h.opening) out << " " << to_string(who) << "=" << bal;
    out << "\n";
    out << "# clocks";
    for (const auto& [who, c] : h.clocks)
        out << " " << to_string(who) << "=" << format_time(c.rate()) << "+" << format_time(c.offset());
    out << "\n";
    for (const auto& e : trace.entries) out << format_entry(e) << "\n";
    if (trace.status == RunStatus::HorizonReached) out << "# status=horizon\n";
    else out << "# status=completed\n";
}

std::string trace_to_string(const Trace& trace) {
    std::ostringstream out;
    write_trace(out, trace);
    return out.str();
}

}  // namespace xpay
