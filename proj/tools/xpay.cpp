// Command line front end: run, sweep, explore, derive, deals-check.
// Exit codes: 0 pass, 1 property violation, 2 configuration error,
// 3 exploration budget exceeded.

#include "xpay/config.hpp"
#include "xpay/deals.hpp"
#include "xpay/errors.hpp"
#include "xpay/explorer.hpp"
#include "xpay/properties.hpp"
#include "xpay/simulator.hpp"
#include "xpay/timing.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

using namespace xpay;

constexpr int kPass = 0;
constexpr int kViolation = 1;
constexpr int kConfigError = 2;
constexpr int kBudgetExceeded = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path);
    out << content;
}

Time time_arg(const std::string& s, const char* name) {
    try {
        return parse_time(s);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string(name) + ": " + e.what());
    }
}

std::uint64_t env_seed() {
    const char* s = std::getenv("XPAY_SEED");
    if (!s || !*s) return 0;
    try {
        std::size_t used = 0;
        const auto v = std::stoull(s, &used);
        if (used != std::string_view(s).size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(std::string("XPAY_SEED is not an unsigned integer: ") + s);
    }
}

/// --seed beats the config's seed, which beats XPAY_SEED.
LoadedConfig load_with_seed(const std::string& path, const std::optional<std::uint64_t>& flag) {
    auto cfg = load_config(path);
    if (flag) cfg.scenario.seed = *flag;
    else if (!cfg.seed_given) cfg.scenario.seed = env_seed();
    return cfg;
}

void print_tallies(const Tallies& tallies) {
    std::cout << std::left << std::setw(11) << "property" << std::right << std::setw(9) << "holds" << std::setw(9)
              << "violated" << std::setw(9) << "vacuous" << std::setw(13) << "inapplicable" << "\n";
    for (const auto& [name, t] : tallies)
        std::cout << std::left << std::setw(11) << name << std::right << std::setw(9) << t.holds << std::setw(9)
                  << t.violated << std::setw(9) << t.vacuous << std::setw(13) << t.inapplicable << "\n";
}

int cmd_run(const std::string& config, std::optional<std::uint64_t> seed, const std::string& trace_path,
            const std::string& report_path) {
    const auto cfg = load_with_seed(config, seed);
    const auto result = simulate(cfg.scenario);
    const auto verdicts = check_all(result.trace);
    if (!trace_path.empty()) write_file(trace_path, trace_to_string(result.trace));
    if (!report_path.empty()) write_file(report_path, run_report_json(result, verdicts) + "\n");
    std::ostream& out = trace_path == "-" || report_path == "-" ? std::cerr : std::cout;
    out << "scenario " << result.trace.header.digest << " seed " << cfg.scenario.seed << " status "
        << (result.trace.status == RunStatus::Completed ? "completed" : "horizon") << "\n";
    bool ok = true;
    for (const auto& v : verdicts) {
        out << std::left << std::setw(11) << v.property << to_string(v.status);
        if (!v.detail.empty()) out << "  " << v.detail;
        if (v.violated()) {
            ok = false;
            out << "  witness:";
            for (auto w : v.witness) out << " " << w;
        }
        out << "\n";
    }
    out << "result: " << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? kPass : kViolation;
}

int cmd_sweep(const std::string& config, std::optional<std::uint64_t> seed, std::uint64_t runs, unsigned parallelism,
              const std::string& report_path) {
    if (runs == 0) throw ConfigError("--runs must be at least 1");
    const auto cfg = load_with_seed(config, seed);
    const auto report = sweep(cfg.scenario, runs, parallelism);
    if (!report_path.empty()) write_file(report_path, sweep_report_json(report) + "\n");
    std::cout << "runs " << report.runs << " passing " << report.passing_runs << "\n";
    print_tallies(report.tallies);
    for (const auto& f : report.failures)
        std::cout << "seed " << f.seed << ": " << f.verdict.property << " " << f.verdict.detail << "\n";
    std::cout << "result: " << (report.ok() ? "PASS" : "FAIL") << "\n";
    return report.ok() ? kPass : kViolation;
}

int cmd_explore(const std::string& config, std::optional<std::uint64_t> budget, const std::string& report_path) {
    const auto cfg = load_with_seed(config, std::nullopt);
    auto spec = cfg.explore.value_or(ExploreSpec{});
    if (budget) spec.budget = *budget;
    const auto report = explore(cfg.scenario, spec);
    if (!report_path.empty()) write_file(report_path, explore_report_json(report) + "\n");
    std::cout << "configurations " << report.configurations << " branches " << report.branches << "\n";
    std::cout << "all-compliant branches " << report.compliant_branches << ", Bob paid in "
              << report.compliant_paid << "\n";
    print_tallies(report.tallies);
    for (const auto& c : report.counterexamples) std::cout << "counterexample " << c.property << ": " << c.detail << "\n";
    if (report.budget_exceeded) {
        std::cout << "result: BUDGET EXCEEDED after " << report.branches << " branches (partial coverage)\n";
        return kBudgetExceeded;
    }
    std::cout << "result: " << (report.safety_ok() ? "PASS" : "FAIL") << " (" << report.safety_violations
              << " safety violations)\n";
    return report.safety_ok() ? kPass : kViolation;
}

struct DeriveArgs {
    std::uint32_t n = 1;
    std::string delta = "1", pi = "0", rho = "0", margin = "0", step = "1/10";
    std::optional<std::string> epsilon;
    std::vector<std::string> force_a;
    bool validate = false;
    std::string counterexample;
};

std::string join(const std::vector<Time>& ts) {
    std::string out;
    for (std::size_t i = 0; i < ts.size(); ++i) out += (i ? " " : "") + format_time(ts[i]);
    return out;
}

int cmd_derive(const DeriveArgs& a) {
    const Time delta = time_arg(a.delta, "--delta");
    if (delta <= 0) throw ConfigError("--delta must be positive");
    std::optional<Time> eps;
    if (a.epsilon) eps = time_arg(*a.epsilon, "--epsilon");
    const Time rho = time_arg(a.rho, "--rho");
    const Time pi = time_arg(a.pi, "--pi");
    const Time margin = time_arg(a.margin, "--margin");
    auto p = derive_timeouts(a.n, delta, pi, rho, eps, margin);
    if (!a.force_a.empty()) {
        if (a.force_a.size() != a.n) throw ConfigError("--force-a needs exactly n values");
        for (std::uint32_t i = 0; i < a.n; ++i) {
            p.a[i] = time_arg(a.force_a[i], "--force-a");
            p.d[i] = p.a[i] + 2 * (1 + rho) * pi + margin;
        }
        p.validate();
    }
    std::cout << "a " << join(p.a) << "\n";
    std::cout << "d " << join(p.d) << "\n";
    std::cout << "epsilon " << format_time(p.epsilon) << "\n";
    std::cout << "D " << format_time(termination_bound(p)) << "\n";
    if (!a.validate) return kPass;
    const auto report = validate_timeouts(p, time_arg(a.step, "--step"));
    for (const auto& h : report.tightness)
        std::cout << "a_" << h.hop << " -> " << format_time(h.reduced_to) << ": "
                  << (h.breaks ? "breaks" : "still passes") << "\n";
    if (!report.passed) {
        std::cout << "FAIL " << report.first_failure << "\n";
        if (report.counterexample) {
            const auto text = trace_to_string(*report.counterexample);
            if (!a.counterexample.empty()) write_file(a.counterexample, text);
            else std::cout << "counterexample:\n" << text;
        }
        return kViolation;
    }
    std::cout << (report.tight() ? "PASS (tight at grid step)" : "PASS (not tight at grid step)") << "\n";
    return kPass;
}

std::set<Arc> parse_outcome(const std::string& s) {
    std::set<Arc> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        const auto gt = item.find('>');
        if (gt == std::string::npos) throw std::invalid_argument("outcome arcs look like i>j");
        out.insert({static_cast<std::uint32_t>(std::stoul(item.substr(0, gt))),
                    static_cast<std::uint32_t>(std::stoul(item.substr(gt + 1)))});
    }
    return out;
}

int cmd_deals(const std::string& file, std::optional<std::uint32_t> payment, bool with_certificate,
              std::optional<std::uint32_t> party, const std::string& outcome) {
    DealMatrix m;
    std::set<Arc> executed;
    try {
        if (payment) m = payment_to_deal(*payment, with_certificate);
        else if (!file.empty()) m = load_deal(file);
        else throw std::invalid_argument("give a matrix file or --payment");
        if (party) executed = parse_outcome(outcome);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const bool well_formed = is_well_formed(m);
    std::cout << "parties " << m.parties << " arcs " << m.entries.size() << "\n";
    std::cout << "well-formed " << (well_formed ? "yes" : "no") << "\n";
    bool ok = well_formed;
    if (party) {
        bool acceptable = false;
        try {
            acceptable = is_acceptable_payoff(m, *party, executed);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        std::cout << "party " << *party << " payoff " << (acceptable ? "acceptable" : "unacceptable") << "\n";
        ok = ok && acceptable;
    }
    return ok ? kPass : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cross-chain payment simulator"};
    app.require_subcommand(1);

    std::string config, trace_path, report_path;
    std::optional<std::uint64_t> seed;

    auto* run = app.add_subcommand("run", "Simulate one scenario and check every property");
    run->add_option("config", config, "Scenario JSON")->required();
    run->add_option("--seed", seed, "Overrides the config and XPAY_SEED");
    run->add_option("--trace", trace_path, "Trace output path, '-' for stdout");
    run->add_option("--report", report_path, "JSON verdict report path, '-' for stdout");

    std::uint64_t runs = 100;
    unsigned parallelism = 1;
    auto* sw = app.add_subcommand("sweep", "Run many seeds and aggregate verdicts");
    sw->add_option("config", config, "Scenario JSON")->required();
    sw->add_option("--seed", seed, "First seed");
    sw->add_option("--runs", runs, "Number of seeds");
    sw->add_option("--parallelism", parallelism, "Worker threads");
    sw->add_option("--report", report_path, "JSON summary path");

    std::optional<std::uint64_t> budget;
    auto* ex = app.add_subcommand("explore", "Enumerate delays, tie orders and faulty subsets");
    ex->add_option("config", config, "Scenario JSON with an optional explore block")->required();
    ex->add_option("--budget", budget, "Maximum number of branches");
    ex->add_option("--report", report_path, "JSON summary path");

    DeriveArgs d;
    auto* de = app.add_subcommand("derive", "Derive timeouts and the termination bound");
    de->add_option("--n", d.n, "Hops")->check(CLI::PositiveNumber);
    de->add_option("--delta", d.delta, "Message delay bound");
    de->add_option("--pi", d.pi, "Processing time per step");
    de->add_option("--rho", d.rho, "Clock drift bound");
    de->add_option("--epsilon", d.epsilon, "Payment slack after the certificate");
    de->add_option("--margin", d.margin, "Extra slack per window");
    de->add_option("--force-a", d.force_a, "Use these a_i instead of the derived ones")->delimiter(',');
    de->add_option("--step", d.step, "Tightness probe step");
    de->add_flag("--validate", d.validate, "Run the worst-case validation");
    de->add_option("--counterexample", d.counterexample, "Where to write a failing trace");

    std::string deal_file, outcome;
    std::optional<std::uint32_t> payment, party;
    bool with_certificate = false;
    auto* dc = app.add_subcommand("deals-check", "Check a deal matrix");
    dc->add_option("file", deal_file, "Matrix file");
    dc->add_option("--payment", payment, "Analyse the n-hop payment chain instead");
    dc->add_flag("--with-certificate", with_certificate, "Add the certificate as a reverse asset");
    dc->add_option("--party", party, "Party whose payoff is checked");
    dc->add_option("--outcome", outcome, "Executed arcs, e.g. 0>1,1>0");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kConfigError;
    }

    try {
        if (*run) return cmd_run(config, seed, trace_path, report_path);
        if (*sw) return cmd_sweep(config, seed, runs, parallelism, report_path);
        if (*ex) return cmd_explore(config, budget, report_path);
        if (*de) return cmd_derive(d);
        if (*dc) return cmd_deals(deal_file, payment, with_certificate, party, outcome);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kConfigError;
    }
    return kConfigError;
}
