#include "outcome_oracle.hpp"
#include "xpay/config.hpp"
#include "xpay/errors.hpp"
#include "xpay/explorer.hpp"

#include <doctest.h>

using namespace xpay;

namespace {

Scenario one_hop(Variant v) {
    Scenario s;
    s.variant = v;
    s.n = 1;
    s.pi = Time(1, 10);
    s.clock_mode = ClockMode::Identity;
    s.timing = AutoTiming{Time(1, 10)};
    return s;
}

}  // namespace

TEST_CASE("enumeration covers every delay assignment exactly once") {
    ExploreSpec spec;
    spec.grid = {Time(1, 2), Time(1)};
    spec.tie_breaks = {TieBreak::ReceiveFirst};
    std::set<std::vector<Time>> seen;
    const auto r = explore(one_hop(Variant::Strong), spec, [&](const SimulationResult& res, const auto&) {
        std::vector<Time> delays;
        for (const auto& e : res.trace.entries)
            if (const auto* s = std::get_if<SentRecord>(&e.record)) delays.push_back(s->deliver_at - e.real);
        CHECK(seen.insert(delays).second);
    });
    // Six messages in the all-compliant one-hop run.
    CHECK(r.branches == 64);
    CHECK(seen.size() == 64);
    CHECK(r.compliant_paid == 64);
}

TEST_CASE("the budget stops exploration and is reported") {
    ExploreSpec spec;
    spec.grid = {Time(1, 4), Time(1, 2), Time(1)};
    spec.candidates = roster(1);
    spec.budget = 100;
    const auto r = explore(one_hop(Variant::Strong), spec);
    CHECK(r.budget_exceeded);
    CHECK(r.branches == 100);
}

TEST_CASE("the manager cannot be explored as faulty") {
    ExploreSpec spec;
    spec.candidates = {ParticipantId::manager()};
    CHECK_THROWS_AS(explore(one_hop(Variant::Weak), spec), ConfigError);
}

TEST_CASE("weak interleavings never produce both certificates") {
    auto s = one_hop(Variant::Weak);
    ExploreSpec spec;
    spec.grid = {Time(1, 2), Time(1)};
    spec.candidates = {ParticipantId::customer(0), ParticipantId::customer(1)};
    spec.strategies = {"impatient_abort", "premature_certificate"};
    spec.patience_options = {{std::nullopt, std::nullopt}, {Time(2), std::nullopt}, {Time(0), Time(0)}};
    std::uint64_t cc = 0;
    const auto r = explore(s, spec, [&](const SimulationResult& res, const auto&) { cc += oracle::violations(res).cc; });
    CHECK(cc == 0);
    CHECK(r.tallies.at("CC").violated == 0);
    CHECK(r.safety_ok());
}

TEST_CASE("sweeps are deterministic and independent of parallelism") {
    Scenario s;
    s.n = 2;
    s.pi = Time(1, 10);
    s.rho = Time(1, 10);
    s.byzantine = {{ParticipantId::customer(1), {"replayer", std::nullopt}}};
    const auto one = sweep(s, 50, 1);
    const auto four = sweep(s, 50, 4);
    CHECK(sweep_report_json(one) == sweep_report_json(four));
    CHECK(one.ok());
    CHECK(one.runs == 50);
    CHECK_THROWS_AS(sweep(s, 0, 1), ConfigError);
}

TEST_CASE("a recorded counterexample replays to the same trace") {
    auto s = one_hop(Variant::Strong);
    s.timing = AutoTiming{Time(0)};
    s.tie_break = TieBreak::TimeoutFirst;
    ExploreSpec spec;
    spec.grid = {Time(1)};
    spec.tie_breaks = {TieBreak::TimeoutFirst};
    std::string trace;
    std::vector<Time> delays;
    explore(s, spec, [&](const SimulationResult& res, const auto&) {
        trace = trace_to_string(res.trace);
        for (const auto& e : res.trace.entries)
            if (const auto* sent = std::get_if<SentRecord>(&e.record)) delays.push_back(sent->deliver_at - e.real);
    });
    ReplayChooser replay(delays, Time(1));
    SimulationOptions opts;
    opts.chooser = &replay;
    CHECK(trace_to_string(simulate(s, opts).trace) == trace);
}
