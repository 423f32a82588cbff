#pragma once

#include "xpay/protocol.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace xpay {

struct Trace;

/// Timeout windows for an n-hop payment under message delay Δ, processing
/// time π and clock drift ρ, with extra slack μ per window.
///
/// Budget per hop (real time):
///   H_{n-1} = 2Δ + π           P out, Bob's processing, χ back
///   each hop further up adds 4Δ + 4π:
///     P out (Δ), connector deposits (π + Δ), escrow issues P (π),
///     and on the way back χ relayed by the escrow (π + Δ) and by the
///     connector (π + Δ).
/// The last window is a_{n-1} = (1+ρ)H_{n-1} + μ. Upstream windows must also
/// outlast the downstream window as measured by a slow downstream clock,
/// so a_i = (1+ρ)((1+ρ)a_{i+1} + 4Δ + 4π) + μ. With ρ = μ = 0 this is
/// a_i = (1+ρ)H_i.
///
/// d_i = a_i + 2(1+ρ)π + μ covers the promise step and the refund step.
/// ε defaults to (1+ρ)π. Throws ConfigError for Δ <= 0, n = 0 or negative
/// inputs.
TimingParams derive_timeouts(std::uint32_t n, Time delta, Time pi, Time rho, std::optional<Time> epsilon,
                             Time margin);

/// D = 3Δ + 3π + (1+ρ)a_0 + μ: the latest real time, measured from a
/// customer's first payment or certificate, by which she terminates when her
/// escrows comply. In an all-compliant run it also bounds termination from
/// the start of the run.
Time termination_bound(const TimingParams& p);

struct HopTightness {
    std::uint32_t hop = 0;
    Time reduced_to;
    /// True when shrinking a_hop by one step breaks the worst-case run.
    bool breaks = false;
};

struct ValidationReport {
    bool passed = false;
    /// Worst-case all-compliant runs end with Bob paid, Alice holding χ and
    /// every connector whole.
    bool success_holds = false;
    /// G(d) and P(a) kept in every worst-case run.
    bool promises_hold = false;
    /// Every customer finished by the termination bound.
    bool termination_holds = false;
    std::vector<HopTightness> tightness;
    bool tight() const;
    std::string first_failure;
    /// Trace of the first failing run.
    std::shared_ptr<Trace> counterexample;
};

/// Runs the worst-case family (every delay Δ, processing π, escrow clocks at
/// both drift extremes, all-compliant and certificate-withholding Bob) with
/// `p` as timing, then repeats with each a_i shrunk by `step`.
ValidationReport validate_timeouts(const TimingParams& p, Time step);

/// Thrown by require_valid() with the failing report attached.
struct ValidationFailed : std::runtime_error {
    ValidationFailed(ValidationReport r);
    ValidationReport report;
};

void require_valid(const ValidationReport& report);

}  // namespace xpay
