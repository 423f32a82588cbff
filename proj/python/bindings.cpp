#include "xpay/config.hpp"
#include "xpay/deals.hpp"
#include "xpay/errors.hpp"
#include "xpay/explorer.hpp"
#include "xpay/properties.hpp"
#include "xpay/simulator.hpp"
#include "xpay/timing.hpp"

#include <json.hpp>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace xpay;

namespace {

// Times cross the boundary as "num/den" strings; the Python side turns them
// into fractions.Fraction.
std::vector<std::string> times(const std::vector<Time>& ts) {
    std::vector<std::string> out;
    for (const auto& t : ts) out.push_back(format_time(t));
    return out;
}

nlohmann::json params_json(const TimingParams& p) {
    return {{"a", times(p.a)},
            {"d", times(p.d)},
            {"epsilon", format_time(p.epsilon)},
            {"D", format_time(termination_bound(p))}};
}

LoadedConfig with_seed(const std::string& config, std::optional<std::uint64_t> seed) {
    auto c = parse_config(config);
    if (seed) c.scenario.seed = *seed;
    return c;
}

std::string run(const std::string& config, std::optional<std::uint64_t> seed) {
    const auto c = with_seed(config, seed);
    const auto r = simulate(c.scenario);
    auto j = nlohmann::json::parse(run_report_json(r, check_all(r.trace)));
    j["trace"] = trace_to_string(r.trace);
    return j.dump();
}

std::string derive(std::uint32_t n, const std::string& delta, const std::string& pi, const std::string& rho,
                   std::optional<std::string> epsilon, const std::string& margin) {
    std::optional<Time> eps;
    if (epsilon) eps = parse_time(*epsilon);
    return params_json(derive_timeouts(n, parse_time(delta), parse_time(pi), parse_time(rho), eps, parse_time(margin)))
        .dump();
}

std::string validate(std::uint32_t n, const std::string& delta, const std::string& pi, const std::string& rho,
                     const std::string& margin, std::optional<std::vector<std::string>> force_a,
                     const std::string& step) {
    auto p = derive_timeouts(n, parse_time(delta), parse_time(pi), parse_time(rho), std::nullopt, parse_time(margin));
    if (force_a) {
        if (force_a->size() != n) throw ConfigError("force_a needs exactly n entries");
        for (std::uint32_t i = 0; i < n; ++i) {
            p.a[i] = parse_time((*force_a)[i]);
            p.d[i] = p.a[i] + 2 * (1 + p.rho) * p.pi + p.margin;
        }
    }
    const auto r = validate_timeouts(p, parse_time(step));
    nlohmann::json j{{"passed", r.passed},
                     {"tight", r.tight()},
                     {"success_holds", r.success_holds},
                     {"promises_hold", r.promises_hold},
                     {"termination_holds", r.termination_holds},
                     {"first_failure", r.first_failure},
                     {"params", params_json(p)}};
    if (r.counterexample) j["counterexample"] = trace_to_string(*r.counterexample);
    return j.dump();
}

std::string explore_config(const std::string& config, std::optional<std::uint64_t> budget) {
    auto c = parse_config(config);
    if (!c.explore) throw ConfigError("configuration has no explore block");
    if (budget) c.explore->budget = *budget;
    return explore_report_json(explore(c.scenario, *c.explore));
}

using ArcKey = std::pair<std::uint32_t, std::uint32_t>;
/// (i, j) -> (label, magnitude)
using Entries = std::map<ArcKey, std::pair<std::string, std::int64_t>>;

DealMatrix deal_of(std::uint32_t parties, const Entries& entries) {
    DealMatrix m;
    m.parties = parties;
    for (const auto& [arc, asset] : entries) m.entries[arc] = Asset{asset.first, asset.second};
    return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("run", &run, py::arg("config"), py::arg("seed") = py::none());
    m.def("sweep",
          [](const std::string& config, std::uint64_t runs, unsigned parallelism, std::optional<std::uint64_t> seed) {
              const auto c = with_seed(config, seed);
              py::gil_scoped_release release;
              return sweep_report_json(sweep(c.scenario, runs, parallelism));
          },
          py::arg("config"), py::arg("runs"), py::arg("parallelism") = 1, py::arg("seed") = py::none());
    m.def("explore",
          [](const std::string& config, std::optional<std::uint64_t> budget) {
              py::gil_scoped_release release;
              return explore_config(config, budget);
          },
          py::arg("config"), py::arg("budget") = py::none());
    m.def("derive", &derive, py::arg("n"), py::arg("delta"), py::arg("pi"), py::arg("rho"), py::arg("epsilon"),
          py::arg("margin"));
    m.def("validate", &validate, py::arg("n"), py::arg("delta"), py::arg("pi"), py::arg("rho"), py::arg("margin"),
          py::arg("force_a"), py::arg("step"));
    m.def("digest", [](const std::string& config) { return scenario_digest(parse_config(config).scenario); });
    m.def("is_well_formed", [](std::uint32_t parties, const Entries& entries) {
        return is_well_formed(deal_of(parties, entries));
    });
    m.def("is_acceptable_payoff",
          [](std::uint32_t parties, const Entries& entries, std::uint32_t party, const std::set<ArcKey>& outcome) {
              return is_acceptable_payoff(deal_of(parties, entries), party, outcome);
          });
    m.def("payment_chain_well_formed", [](std::uint32_t n, bool with_certificate) {
        return is_well_formed(payment_to_deal(n, with_certificate));
    });
}
