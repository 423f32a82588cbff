#include "outcome_oracle.hpp"
#include "xpay/byzantine.hpp"
#include "xpay/errors.hpp"
#include "xpay/properties.hpp"
#include "xpay/simulator.hpp"
#include "xpay/timing.hpp"

#include <doctest.h>

using namespace xpay;

namespace {

Scenario strong(std::uint32_t n, Time rho = Time(0)) {
    Scenario s;
    s.n = n;
    s.delay = SynchronousDelay{Time(1), uniform_grid(Time(1), 4)};
    s.pi = Time(1, 10);
    s.rho = rho;
    return s;
}

bool any_violation(const std::vector<Verdict>& vs) {
    for (const auto& v : vs)
        if (v.violated()) return true;
    return false;
}

}  // namespace

TEST_CASE("all-compliant strong payments settle for every seed") {
    for (std::uint32_t n = 1; n <= 3; ++n) {
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            auto s = strong(n, Time(1, 10));
            s.seed = seed;
            const auto r = simulate(s);
            CHECK(r.trace.status == RunStatus::Completed);
            CHECK(r.finals.at(ParticipantId::customer(n)).balance == 1);
            CHECK(r.finals.at(ParticipantId::customer(0)).state == "has-certificate");
            for (std::uint32_t i = 1; i < n; ++i) CHECK(r.finals.at(ParticipantId::customer(i)).balance == 1);
            for (std::uint32_t i = 0; i < n; ++i) CHECK(r.finals.at(ParticipantId::escrow(i)).balance == 0);
            for (const auto& [who, f] : r.finals) CHECK(f.terminal);
            CHECK_FALSE(any_violation(check_all(r.trace)));
        }
    }
}

TEST_CASE("runs are pure functions of the scenario") {
    auto s = strong(2, Time(1, 10));
    s.seed = 17;
    const auto a = trace_to_string(simulate(s).trace);
    const auto b = trace_to_string(simulate(s).trace);
    CHECK(a == b);
    s.seed = 18;
    CHECK(trace_to_string(simulate(s).trace) != a);
    CHECK(scenario_digest(s).size() == 16);
}

TEST_CASE("trace records follow the documented ordering") {
    auto s = strong(1);
    s.clock_mode = ClockMode::Identity;
    s.delay = ScriptedDelay{Time(1), Time(1), {}};
    const auto r = simulate(s);
    const auto& es = r.trace.entries;
    for (std::size_t i = 1; i < es.size(); ++i) {
        CHECK(es[i - 1].real <= es[i].real);
        CHECK(es[i].seq == i);
    }
    // A money send is followed by its debit; a money delivery by its credit.
    for (std::size_t i = 0; i + 1 < es.size(); ++i) {
        if (const auto* sent = std::get_if<SentRecord>(&es[i].record); sent && sent->message.payload().as<Money>()) {
            const auto* t = std::get_if<TransferRecord>(&es[i + 1].record);
            REQUIRE(t);
            CHECK_FALSE(t->credit);
        }
        if (const auto* d = std::get_if<DeliveredRecord>(&es[i].record); d && d->message.payload().as<Money>()) {
            const auto* t = std::get_if<TransferRecord>(&es[i + 1].record);
            REQUIRE(t);
            CHECK(t->credit);
        }
    }
    // Five hops of Δ and four processing steps: G, deposit, P, χ, settle.
    Time paid_at{-1};
    for (const auto& e : es)
        if (const auto* t = std::get_if<TransferRecord>(&e.record); t && t->credit && t->to == ParticipantId::customer(1))
            paid_at = e.real;
    CHECK(paid_at == Time(5) + Time(4, 10));
}

TEST_CASE("a late certificate starves Bob without hurting anyone") {
    auto s = strong(1);
    s.clock_mode = ClockMode::Identity;
    s.delay = ScriptedDelay{Time(1), Time(1), {{ParticipantId::customer(1), ParticipantId::escrow(0),
                                                PayloadKind::Certificate, Time(10)}}};
    const auto r = simulate(s);
    CHECK(r.finals.at(ParticipantId::customer(0)).state == "refunded");
    CHECK(r.finals.at(ParticipantId::customer(0)).balance == 1);
    CHECK(r.finals.at(ParticipantId::customer(1)).balance == 0);
    CHECK_FALSE(r.finals.at(ParticipantId::customer(1)).terminal);
    for (const auto& v : check_all(r.trace)) {
        if (v.property == kLiveness || v.property == kTermination) CHECK(v.violated());
        else CHECK_FALSE(v.violated());
    }
}

TEST_CASE("a double-paying escrow table is caught") {
    auto s = strong(1);
    s.clock_mode = ClockMode::Identity;
    const auto p = resolve_timing(s);
    const auto e0 = ParticipantId::escrow(0);
    const auto c0 = ParticipantId::customer(0);
    const auto c1 = ParticipantId::customer(1);
    const KeyAuthority keys;
    // Settles by paying both sides.
    std::vector<StateSpec> t{
        {"announce", StateKind::Output, {{SendGuard{}, {}, 1, {Emit{c0, Payload::guarantee(p.d[0], 1)}}}}},
        {"await-deposit", StateKind::Input, {{ReceiveGuard{c0, {.kind = PayloadKind::Money}}, {}, 2, {}}}},
        {"promise", StateKind::Output, {{SendGuard{}, {"u"}, 3, {Emit{c1, Payload::promise(p.a[0], 1)}}}}},
        {"await-certificate", StateKind::Input,
         {{ReceiveGuard{c1, {.kind = PayloadKind::Certificate, .signer = c1}}, {}, 4, {}}}},
        {"settle", StateKind::Output,
         {{SendGuard{}, {}, 5, {Emit{c1, Payload::money(1, 1)}, Emit{c0, Payload::money(1, 1)}}}}},
        {"done", StateKind::Terminal, {}},
    };
    SimulationOptions opts;
    opts.overrides.emplace(e0, Automaton(e0, 1, t, 0, keys.issue(e0)));
    const auto r = simulate(s, opts);
    const auto vs = check_all(r.trace);
    auto status = [&](std::string_view name) {
        for (const auto& v : vs)
            if (v.property == name) return v.status;
        FAIL("missing verdict");
        return Status::Holds;
    };
    CHECK(status(kEscrowSecurity) == Status::Violated);
    CHECK(status(kConsistency) == Status::Violated);
    CHECK(status(kConservation) == Status::Holds);
    CHECK(oracle::violations(r).es);

    SimulationOptions foreign;
    foreign.overrides.emplace(e0, Automaton(c0, 1, t, 0, keys.issue(c0)));
    CHECK_THROWS_AS(simulate(s, foreign), ConfigError);
}

TEST_CASE("Byzantine participants cannot forge and never break safety alone") {
    for (std::uint32_t n = 1; n <= 2; ++n) {
        for (const auto& who : roster(n)) {
            for (const auto& spec : strategy_battery(who, Variant::Strong)) {
                auto s = strong(n, Time(1, 10));
                s.timing = AutoTiming{Time(1, 10)};
                s.byzantine = {{who, spec}};
                for (std::uint64_t seed = 0; seed < 5; ++seed) {
                    s.seed = seed;
                    const auto r = simulate(s);
                    for (const auto& v : check_all(r.trace))
                        if (is_safety_property(v.property)) CHECK_MESSAGE(!v.violated(), to_string(who), " ", spec.name, " ", v.property);
                    for (const auto& e : r.trace.entries)
                        if (const auto* rej = std::get_if<RejectedRecord>(&e.record); rej && rej->reason == "forgery")
                            CHECK(e.who == who);
                }
            }
        }
    }
}

TEST_CASE("premature certificates from a non-Bob customer are rejected as forgery") {
    auto s = strong(2);
    s.byzantine = {{ParticipantId::customer(1), {"premature_certificate", std::nullopt}}};
    const auto r = simulate(s);
    bool rejected = false;
    for (const auto& e : r.trace.entries)
        if (const auto* rej = std::get_if<RejectedRecord>(&e.record))
            rejected |= rej->reason == "forgery" && e.who == ParticipantId::customer(1);
    CHECK(rejected);
}

TEST_CASE("strategy construction validates applicability") {
    CHECK_THROWS_AS(make_strategy({"no_such", std::nullopt}, ParticipantId::escrow(0), Variant::Strong, Time(1)),
                    ConfigError);
    CHECK_THROWS_AS(make_strategy({"greedy_escrow", std::nullopt}, ParticipantId::customer(0), Variant::Strong, Time(1)),
                    ConfigError);
    CHECK_NOTHROW(make_strategy({"silent", std::nullopt}, ParticipantId::escrow(0), Variant::Strong, Time(1)));
    CHECK(neighbours(ParticipantId::escrow(0), 1, Variant::Strong).size() == 2);
}

TEST_CASE("scenario validation rejects impossible setups") {
    auto s = strong(1);
    s.byzantine = {{ParticipantId::escrow(3), {"silent", std::nullopt}}};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = strong(1);
    s.variant = Variant::Weak;
    s.byzantine = {{ParticipantId::manager(), {"silent", std::nullopt}}};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = strong(1);
    s.delay = ScriptedDelay{std::nullopt, Time(1), {}};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = strong(1);
    s.delay = SynchronousDelay{Time(1), {Time(2)}};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = strong(1);
    s.n = 0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("seeded clocks respect the drift bound and leave the manager exact") {
    Scenario s;
    s.variant = Variant::Weak;
    s.n = 3;
    s.rho = Time(1, 10);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        s.seed = seed;
        for (const auto& [who, c] : assign_clocks(s)) {
            CHECK(c.rate() >= Time(10, 11));
            CHECK(c.rate() <= Time(11, 10));
            if (who.is_manager()) CHECK(c.rate() == Time(1));
        }
    }
    s.rho = Time(0);
    for (const auto& [who, c] : assign_clocks(s)) CHECK(c == LocalClock{});
}

TEST_CASE("weak payments commit when everyone is patient") {
    Scenario s;
    s.variant = Variant::Weak;
    s.n = 2;
    s.pi = Time(1, 10);
    s.delay = PartialSyncDelay{Time(3), Time(1), {}, {}};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        s.seed = seed;
        const auto r = simulate(s);
        CHECK(r.finals.at(ParticipantId::customer(2)).balance == 1);
        const auto o = oracle::violations(r);
        CHECK_FALSE(o.cc);
        CHECK_FALSE(o.liveness);
        CHECK_FALSE(any_violation(check_all(r.trace)));
    }
}

TEST_CASE("an impatient customer aborts the weak payment and everyone is refunded") {
    Scenario s;
    s.variant = Variant::Weak;
    s.n = 1;
    s.pi = Time(1, 10);
    s.clock_mode = ClockMode::Identity;
    s.patience = {Time(0), std::nullopt};
    const auto r = simulate(s);
    CHECK(r.finals.at(ParticipantId::customer(0)).balance == 1);
    CHECK(r.finals.at(ParticipantId::customer(1)).balance == 0);
    const auto o = oracle::violations(r);
    CHECK_FALSE(o.cs1);
    CHECK_FALSE(o.cs2);
    CHECK_FALSE(o.cc);
    CHECK_FALSE(any_violation(check_all(r.trace)));
}
