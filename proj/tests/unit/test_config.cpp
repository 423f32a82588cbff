#include "xpay/config.hpp"
#include "xpay/errors.hpp"
#include "xpay/simulator.hpp"

#include <doctest.h>
#include <json.hpp>

using namespace xpay;

TEST_CASE("a full configuration parses") {
    const auto c = parse_config(R"({
        "variant": "weak", "n": 2, "amount": 3, "rho": "1/10", "pi": 0.1,
        "delay": {"model": "partial_sync", "gst": "4", "delta": "1", "grid": ["1/2", "1"],
                  "pre_gst": [{"from": "c1", "to": "e0", "msg": "CHI_A", "delay": "7"}]},
        "timing": {"auto": {"margin": "1/20"}},
        "byzantine": {"c1": {"strategy": "delay_own_sends", "delay": "1/2"}},
        "patience": ["inf", "5", null],
        "seed": 9, "clock_mode": "fast_escrows", "tie_break": "timeout_first",
        "explore": {"grid": 2, "candidates": ["c0"], "strategies": "battery", "budget": 10}
    })");
    const auto& s = c.scenario;
    CHECK(s.variant == Variant::Weak);
    CHECK(s.n == 2);
    CHECK(s.amount == 3);
    CHECK(s.rho == Time(1, 10));
    CHECK(s.pi == Time(1, 10));
    const auto& d = std::get<PartialSyncDelay>(s.delay);
    CHECK(d.gst == Time(4));
    CHECK(d.grid.size() == 2);
    REQUIRE(d.pre_gst.size() == 1);
    CHECK(*d.pre_gst[0].kind == PayloadKind::AbortCert);
    CHECK(std::get<AutoTiming>(s.timing).margin == Time(1, 20));
    CHECK(s.byzantine.at(ParticipantId::customer(1)).delay == Time(1, 2));
    REQUIRE(s.patience.size() == 3);
    CHECK_FALSE(s.patience[0]);
    CHECK(*s.patience[1] == Time(5));
    CHECK_FALSE(s.patience[2]);
    CHECK(s.seed == 9);
    CHECK(c.seed_given);
    CHECK(s.clock_mode == ClockMode::FastEscrows);
    CHECK(s.tie_break == TieBreak::TimeoutFirst);
    REQUIRE(c.explore);
    CHECK(c.explore->grid == std::vector<Time>{Time(1, 2), Time(1)});
    CHECK(c.explore->budget == 10);
}

TEST_CASE("malformed configurations are rejected") {
    const char* bad[] = {
        R"({})",
        R"({"n": 1, "colour": "red"})",
        R"({"n": "one"})",
        R"({"n": 1, "variant": "medium"})",
        R"({"n": 1, "delay": {"model": "psychic"}})",
        R"({"n": 1, "delay": {"model": "synchronous", "delta": "1", "jitter": 2}})",
        R"({"n": 1, "byzantine": {"c0": {"strategy": "teleport"}}})",
        R"({"n": 1, "byzantine": {"zz": {"strategy": "silent"}}})",
        R"({"n": 1, "pi": "1/0"})",
        R"({"n": 1, "timing": {"a": ["2"], "d": ["1"]}})",
        R"({"n": 1, "delay": {"model": "scripted", "default": "1"}})",
        R"({"n": 1, "variant": "weak", "patience": ["inf"]})",
        R"(not json)",
    };
    for (const auto* text : bad) CHECK_THROWS_AS(parse_config(text), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/x.json"), ConfigError);
}

TEST_CASE("scenarios survive a JSON round trip with the same digest") {
    const auto c = parse_config(R"({
        "n": 3, "rho": "1/10", "pi": "1/10", "epsilon": "1/5",
        "delay": {"model": "scripted", "delta": "1", "default": "1/2",
                  "rules": [{"from": "c3", "msg": "CHI", "delay": "9"}]},
        "timing": {"a": ["9", "5", "3"], "d": ["10", "6", "4"]},
        "byzantine": {"e1": {"strategy": "greedy_escrow"}},
        "horizon": "100", "seed": 4
    })");
    const auto again = parse_config(scenario_to_json(c.scenario));
    CHECK(scenario_to_json(again.scenario) == scenario_to_json(c.scenario));
    CHECK(scenario_digest(again.scenario) == scenario_digest(c.scenario));
    CHECK(trace_to_string(simulate(again.scenario).trace) == trace_to_string(simulate(c.scenario).trace));
}

TEST_CASE("reports are JSON with sorted keys") {
    Scenario s;
    s.pi = Time(1, 10);
    const auto r = simulate(s);
    const auto text = run_report_json(r, check_all(r.trace));
    const auto j = nlohmann::json::parse(text);
    CHECK(j.contains("verdicts"));
    CHECK(j.dump(2) == text);
}
