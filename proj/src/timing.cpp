#include "xpay/timing.hpp"

#include "xpay/errors.hpp"
#include "xpay/properties.hpp"
#include "xpay/simulator.hpp"

namespace xpay {
namespace {

struct Outcome {
    bool success = true;
    bool promises = true;
    bool termination = true;
    std::string failure;
};

bool customer_received_certificate(const Trace& t) {
    const auto bob = ParticipantId::customer(t.header.payment.n);
    for (const auto& e : t.entries) {
        const auto* d = std::get_if<DeliveredRecord>(&e.record);
        if (d && e.who == ParticipantId::customer(0) && d->message.signer() == bob &&
            d->message.payload().kind() == PayloadKind::Certificate)
            return true;
    }
    return false;
}

/// Every message takes exactly Δ and every step exactly π.
Scenario worst_case(const TimingParams& p, ClockMode clocks) {
    Scenario s;
    s.n = p.n;
    s.delay = ScriptedDelay{p.delta, p.delta, {}};
    s.pi = p.pi;
    s.rho = p.rho;
    s.epsilon = p.epsilon;
    s.timing = p;
    s.clock_mode = clocks;
    s.tie_break = TieBreak::ReceiveFirst;
    return s;
}

Outcome run_family(const TimingParams& p, std::shared_ptr<Trace>* counterexample) {
    Outcome out;
    auto fail = [&](bool& flag, std::string why, const Trace& t) {
        flag = false;
        if (out.failure.empty()) {
            out.failure = std::move(why);
            if (counterexample) *counterexample = std::make_shared<Trace>(t);
        }
    };
    const Time bound = termination_bound(p);
    for (const auto clocks : {ClockMode::Identity, ClockMode::FastEscrows, ClockMode::SlowEscrows}) {
        for (const bool withholding : {false, true}) {
            auto s = worst_case(p, clocks);
            if (withholding) s.byzantine[ParticipantId::customer(p.n)] = {"withhold_certificate", {}};
            const auto r = simulate(s);
            const auto& t = r.trace;
            const auto tag = " (clocks=" + to_string(clocks) + (withholding ? ", Bob withholds)" : ")");

            for (const auto& v : check_all(t)) {
                if (!v.violated()) continue;
                if (v.property == kGuaranteePromise || v.property == kCertificatePromise)
                    fail(out.promises, v.property + " violated: " + v.detail + tag, t);
                else if (is_safety_property(v.property))
                    fail(out.success, v.property + " violated: " + v.detail + tag, t);
            }
            if (check_termination(t, bound, TerminationAnchor::ScenarioStart).violated() ||
                check_termination(t, bound, TerminationAnchor::FirstAction).violated())
                fail(out.termination, "a customer missed the termination bound" + tag, t);
            if (withholding) continue;
            const auto bob = ParticipantId::customer(p.n);
            bool whole = r.finals.at(bob).balance > 0 && customer_received_certificate(t);
            for (std::uint32_t i = 1; i < p.n; ++i)
                whole = whole && r.finals.at(ParticipantId::customer(i)).balance >= t.header.opening.at(ParticipantId::customer(i));
            if (!whole) fail(out.success, "payment did not complete end to end" + tag, t);
        }
    }
    return out;
}

}  // namespace

TimingParams derive_timeouts(std::uint32_t n, Time delta, Time pi, Time rho, std::optional<Time> epsilon,
                             Time margin) {
    if (n < 1) throw ConfigError("n must be at least 1");
    if (delta <= 0) throw ConfigError("delta must be positive");
    if (pi < 0 || rho < 0 || margin < 0) throw ConfigError("pi, rho and margin must be non-negative");
    if (epsilon && *epsilon < 0) throw ConfigError("epsilon must be non-negative");
    const Time drift = 1 + rho;
    TimingParams p;
    p.n = n;
    p.delta = delta;
    p.pi = pi;
    p.rho = rho;
    p.margin = margin;
    p.epsilon = epsilon.value_or(drift * pi);
    p.a.assign(n, Time{0});
    p.d.assign(n, Time{0});
    p.a[n - 1] = drift * (2 * delta + pi) + margin;
    for (std::uint32_t k = n - 1; k-- > 0;) p.a[k] = drift * (drift * p.a[k + 1] + 4 * delta + 4 * pi) + margin;
    for (std::uint32_t k = 0; k < n; ++k) p.d[k] = p.a[k] + 2 * drift * pi + margin;
    p.validate();
    return p;
}

Time termination_bound(const TimingParams& p) {
    return 3 * p.delta + 3 * p.pi + (1 + p.rho) * p.a.at(0) + p.margin;
}

bool ValidationReport::tight() const {
    for (const auto& h : tightness)
        if (!h.breaks) return false;
    return !tightness.empty();
}

ValidationReport validate_timeouts(const TimingParams& p, Time step) {
    p.validate();
    if (step <= 0) throw ConfigError("tightness step must be positive");
    ValidationReport report;
    const auto base = run_family(p, &report.counterexample);
    report.success_holds = base.success;
    report.promises_hold = base.promises;
    report.termination_holds = base.termination;
    report.first_failure = base.failure;
    report.passed = base.success && base.promises && base.termination;

    for (std::uint32_t i = 0; i < p.n; ++i) {
        HopTightness h;
        h.hop = i;
        h.reduced_to = p.a[i] - step;
        if (h.reduced_to <= 0) {
            h.breaks = true;
            report.tightness.push_back(h);
            continue;
        }
        auto shrunk = p;
        shrunk.a[i] = h.reduced_to;
        const auto r = run_family(shrunk, nullptr);
        h.breaks = !r.success;
        report.tightness.push_back(h);
    }
    return report;
}

ValidationFailed::ValidationFailed(ValidationReport r)
    : std::runtime_error("timeout validation failed: " + r.first_failure), report(std::move(r)) {}

void require_valid(const ValidationReport& report) {
    if (!report.passed) throw ValidationFailed(report);
}

}  // namespace xpay
