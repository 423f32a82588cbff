#include "outcome_oracle.hpp"
#include "xpay/explorer.hpp"
#include "xpay/properties.hpp"
#include "xpay/timing.hpp"

#include <doctest.h>

using namespace xpay;

namespace {

Status status_of(const std::vector<Verdict>& vs, std::string_view name) {
    for (const auto& v : vs)
        if (v.property == name) return v.status;
    throw std::logic_error("missing verdict");
}

void compare(const SimulationResult& r, const std::vector<Verdict>& vs, std::uint64_t& compared) {
    const auto o = oracle::violations(r);
    const bool checker_es = status_of(vs, kEscrowSecurity) == Status::Violated;
    const bool checker_cs1 = status_of(vs, kAliceSecurity) == Status::Violated;
    const bool checker_cs2 = status_of(vs, kBobSecurity) == Status::Violated;
    const bool checker_cs3 = status_of(vs, kConnectorSecurity) == Status::Violated;
    const bool checker_cons = status_of(vs, kConservation) == Status::Violated;
    const bool checker_l = status_of(vs, kLiveness) == Status::Violated;
    CHECK(o.es == checker_es);
    CHECK(o.cs1 == checker_cs1);
    CHECK(o.cs2 == checker_cs2);
    CHECK(o.cs3 == checker_cs3);
    CHECK(o.cons == checker_cons);
    CHECK(o.liveness == checker_l);
    if (r.trace.header.variant == Variant::Weak)
        CHECK(o.cc == (status_of(vs, kCertificateConsistency) == Status::Violated));
    ++compared;
}

}  // namespace

TEST_CASE("checker verdicts agree with the final-state oracle on every single-fault branch") {
    Scenario s;
    s.n = 1;
    s.pi = Time(1, 10);
    s.clock_mode = ClockMode::Identity;
    s.timing = AutoTiming{Time(1, 10)};
    ExploreSpec spec;
    spec.grid = {Time(1, 4), Time(1, 2), Time(1)};
    spec.candidates = roster(1);
    spec.max_faulty = 1;
    std::uint64_t compared = 0;
    const auto report = explore(s, spec, [&](const SimulationResult& r, const auto& vs) { compare(r, vs, compared); });
    CHECK_FALSE(report.budget_exceeded);
    CHECK(compared == report.branches);
    CHECK(report.safety_ok());
    CHECK(report.compliant_branches == report.compliant_paid);
}

TEST_CASE("checker verdicts agree with the oracle on two-hop weak runs") {
    Scenario s;
    s.variant = Variant::Weak;
    s.n = 2;
    s.pi = Time(1, 10);
    s.rho = Time(1, 10);
    std::uint64_t compared = 0;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        s.seed = seed;
        s.patience = {seed % 3 == 0 ? std::optional<Time>(Time(2)) : std::nullopt, std::nullopt,
                      seed % 4 == 0 ? std::optional<Time>(Time(1)) : std::nullopt};
        s.byzantine.clear();
        if (seed % 5 == 1) s.byzantine[ParticipantId::customer(1)] = {"silent", std::nullopt};
        if (seed % 5 == 2) s.byzantine[ParticipantId::escrow(1)] = {"greedy_escrow", std::nullopt};
        const auto r = simulate(s);
        compare(r, check_all(r.trace), compared);
    }
    CHECK(compared == 60);
}

TEST_CASE("verdict catalogue and classification") {
    CHECK(property_names(Variant::Strong).size() == 12);
    CHECK(property_names(Variant::Weak).size() == 12);
    CHECK(is_safety_property(kEscrowSecurity));
    CHECK(is_safety_property(kCertificateConsistency));
    CHECK_FALSE(is_safety_property(kLiveness));
    CHECK_FALSE(is_safety_property(kTermination));
    CHECK(to_string(Status::Vacuous) == "vacuous");
}

TEST_CASE("termination anchors differ for late starters") {
    Scenario s;
    s.n = 2;
    s.pi = Time(1, 10);
    s.clock_mode = ClockMode::Identity;
    s.delay = ScriptedDelay{Time(1), Time(1), {}};
    const auto r = simulate(s);
    const auto p = resolve_timing(s);
    const auto d = termination_bound(p);
    CHECK(check_termination(r.trace, d, TerminationAnchor::ScenarioStart).status == Status::Holds);
    CHECK(check_termination(r.trace, d, TerminationAnchor::FirstAction).status == Status::Holds);
    CHECK(check_termination(r.trace, Time(1), TerminationAnchor::ScenarioStart).status == Status::Violated);
}
