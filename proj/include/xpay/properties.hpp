#pragma once

#include "xpay/trace.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xpay {

enum class Status : std::uint8_t { Holds, Violated, Vacuous, Inapplicable };

std::string to_string(Status s);

struct Verdict {
    std::string property;
    Status status = Status::Holds;
    /// Trace entry indices that demonstrate a violation.
    std::vector<std::size_t> witness;
    std::string detail;

    bool violated() const { return status == Status::Violated; }
};

/// Where a termination deadline is measured from.
enum class TerminationAnchor : std::uint8_t {
    /// Time zero of the run.
    ScenarioStart,
    /// The customer's first money transfer or certificate issue.
    FirstAction,
};

// Property names as reported.
inline constexpr std::string_view kConsistency = "C";
inline constexpr std::string_view kTermination = "T";
inline constexpr std::string_view kEscrowSecurity = "ES";
inline constexpr std::string_view kAliceSecurity = "CS1";
inline constexpr std::string_view kBobSecurity = "CS2";
inline constexpr std::string_view kConnectorSecurity = "CS3";
inline constexpr std::string_view kLiveness = "L";
inline constexpr std::string_view kCertificateConsistency = "CC";
inline constexpr std::string_view kConservation = "CONS";
inline constexpr std::string_view kAuthentication = "AUTH";
inline constexpr std::string_view kGuaranteePromise = "PROMISE_G";
inline constexpr std::string_view kCertificatePromise = "PROMISE_P";

/// Compliant participants never hit an impossible step.
Verdict check_consistency(const Trace& t);

/// Every compliant customer whose adjacent escrows comply terminates. With a
/// bound (strong variant) only customers that acted are covered and each must
/// finish within `bound` of the anchor. Without one (weak variant) the
/// obligation covers customers with finite patience, and everyone once all
/// participants comply.
Verdict check_termination(const Trace& t, std::optional<Time> bound,
                          TerminationAnchor anchor = TerminationAnchor::FirstAction);

/// No compliant escrow's balance ever dips below its opening.
Verdict check_escrow_security(const Trace& t);

/// Upon termination with compliant escrows. Strong: Alice holds her money
/// back or χ; Bob is paid or never issued χ. Weak: Alice holds χ_c, or her
/// money back together with χ_a; Bob is paid or holds χ_a. Connectors are
/// never worse off.
Verdict check_alice_security(const Trace& t);
Verdict check_bob_security(const Trace& t);
Verdict check_connector_security(const Trace& t);

/// Bob is paid when everybody complies (and, weak variant, is patient enough).
Verdict check_liveness(const Trace& t);

/// The manager never issues both a commit and an abort certificate.
Verdict check_certificate_consistency(const Trace& t);

/// Balances plus value in transit stay constant and never go negative.
Verdict check_conservation(const Trace& t);

/// Nobody sends a message under a foreign signature without having received
/// that exact message first.
Verdict check_authentication(const Trace& t);

/// A compliant escrow that announced G(d) and received the deposit answers
/// with money or the certificate within d on its own clock.
Verdict check_guarantee_promise(const Trace& t);

/// A compliant escrow that announced P(a) and got the certificate before
/// u + a pays within ε. A certificate that arrived before the promise counts
/// as received when the promise is issued.
Verdict check_certificate_promise(const Trace& t);

/// Every property of the trace's variant, in a fixed order. The strong
/// variant uses the termination bound anchored at FirstAction.
std::vector<Verdict> check_all(const Trace& t);

std::vector<std::string> property_names(Variant v);

/// Safety properties must hold in every execution regardless of delays.
bool is_safety_property(std::string_view name);

}  // namespace xpay
