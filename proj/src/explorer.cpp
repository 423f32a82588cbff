#include "xpay/explorer.hpp"

#include "xpay/byzantine.hpp"
#include "xpay/errors.hpp"

#include <algorithm>
#include <thread>

namespace xpay {
namespace {

constexpr std::size_t kCounterexampleCap = 5;
constexpr std::size_t kSweepFailureCap = 20;

/// Answers from a prefix of grid indices, then index 0, remembering what it
/// answered so the next sibling branch can be computed.
class ChoiceChooser final : public DelayChooser {
public:
    ChoiceChooser(const std::vector<Time>& grid, std::vector<std::uint32_t> prefix)
        : grid_(grid), prefix_(std::move(prefix)) {}

    Time choose(const SendContext&) override {
        const auto pos = taken_.size();
        const auto c = pos < prefix_.size() ? prefix_[pos] : 0U;
        taken_.push_back(c);
        return grid_[c];
    }

    std::optional<std::vector<std::uint32_t>> next() const {
        for (auto j = taken_.size(); j-- > 0;) {
            if (taken_[j] + 1 < grid_.size()) {
                std::vector<std::uint32_t> out(taken_.begin(), taken_.begin() + static_cast<std::ptrdiff_t>(j));
                out.push_back(taken_[j] + 1);
                return out;
            }
        }
        return std::nullopt;
    }

    std::vector<Time> delays() const {
        std::vector<Time> out;
        for (auto c : taken_) out.push_back(grid_[c]);
        return out;
    }

private:
    const std::vector<Time>& grid_;
    std::vector<std::uint32_t> prefix_;
    std::vector<std::uint32_t> taken_;
};

using Assignment = std::map<ParticipantId, StrategySpec>;

std::vector<StrategySpec> strategies_for(ParticipantId who, const Scenario& base, const ExploreSpec& spec) {
    auto all = strategy_battery(who, base.variant);
    if (spec.strategies.empty()) return all;
    std::vector<StrategySpec> out;
    for (const auto& s : all)
        if (std::find(spec.strategies.begin(), spec.strategies.end(), s.name) != spec.strategies.end())
            out.push_back(s);
    return out;
}

void extend(const std::vector<ParticipantId>& subset, std::size_t k, Assignment& current, const Scenario& base,
            const ExploreSpec& spec, std::vector<Assignment>& out) {
    if (k == subset.size()) {
        out.push_back(current);
        return;
    }
    for (const auto& s : strategies_for(subset[k], base, spec)) {
        current[subset[k]] = s;
        extend(subset, k + 1, current, base, spec, out);
    }
    current.erase(subset[k]);
}

std::vector<Assignment> assignments(const Scenario& base, const ExploreSpec& spec) {
    std::vector<Assignment> out{base.byzantine};
    const auto& c = spec.candidates;
    // Subsets as bitmasks, smallest first.
    const std::uint64_t limit = std::uint64_t{1} << c.size();
    std::vector<std::vector<ParticipantId>> subsets;
    for (std::uint64_t mask = 1; mask < limit; ++mask) {
        std::vector<ParticipantId> subset;
        for (std::size_t i = 0; i < c.size(); ++i)
            if (mask & (std::uint64_t{1} << i)) subset.push_back(c[i]);
        if (subset.size() <= spec.max_faulty) subsets.push_back(std::move(subset));
    }
    std::stable_sort(subsets.begin(), subsets.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
    for (const auto& subset : subsets) {
        Assignment current = base.byzantine;
        extend(subset, 0, current, base, spec, out);
    }
    return out;
}

bool bob_paid(const Trace& t) {
    const auto bob = ParticipantId::customer(t.header.payment.n);
    for (const auto& e : t.entries) {
        const auto* tr = std::get_if<TransferRecord>(&e.record);
        if (tr && tr->credit && tr->to == bob) return true;
    }
    return false;
}

}  // namespace

void PropertyTally::add(Status s) {
    switch (s) {
    case Status::Holds: ++holds; break;
    case Status::Violated: ++violated; break;
    case Status::Vacuous: ++vacuous; break;
    case Status::Inapplicable: ++inapplicable; break;
    }
}

ExploreReport explore(const Scenario& base, const ExploreSpec& spec,
                      const std::function<void(const SimulationResult&, const std::vector<Verdict>&)>& on_branch) {
    base.validate();
    for (const auto& who : spec.candidates)
        if (who.is_manager()) throw ConfigError("the transaction manager cannot be a Byzantine candidate");
    auto grid = spec.grid;
    if (grid.empty()) {
        const auto delta = delay_bound(base.delay);
        if (!delta) throw ConfigError("exploration needs a delay grid or a delay bound");
        grid = {*delta / 2, *delta};
    }
    auto patience_options = spec.patience_options;
    if (patience_options.empty()) patience_options.push_back(base.patience);
    auto tie_breaks = spec.tie_breaks;
    if (tie_breaks.empty()) tie_breaks.push_back(base.tie_break);

    ExploreReport report;
    for (const auto& assignment : assignments(base, spec)) {
        for (const auto& patience : patience_options) {
            for (const auto tie : tie_breaks) {
                Scenario s = base;
                s.byzantine = assignment;
                s.patience = patience;
                s.tie_break = tie;
                s.validate();
                ++report.configurations;
                std::vector<std::uint32_t> prefix;
                while (true) {
                    if (report.branches >= spec.budget) {
                        report.budget_exceeded = true;
                        return report;
                    }
                    ChoiceChooser chooser(grid, prefix);
                    SimulationOptions opts;
                    opts.chooser = &chooser;
                    const auto result = simulate(s, opts);
                    const auto verdicts = check_all(result.trace);
                    ++report.branches;
                    for (const auto& v : verdicts) {
                        report.tallies[v.property].add(v.status);
                        if (!v.violated() || !is_safety_property(v.property)) continue;
                        ++report.safety_violations;
                        if (report.counterexamples.size() < kCounterexampleCap)
                            report.counterexamples.push_back(
                                {v.property, v.detail, s, chooser.delays(), trace_to_string(result.trace)});
                    }
                    if (s.byzantine.empty()) {
                        ++report.compliant_branches;
                        if (bob_paid(result.trace)) ++report.compliant_paid;
                    }
                    if (on_branch) on_branch(result, verdicts);
                    const auto next = chooser.next();
                    if (!next) break;
                    prefix = *next;
                }
            }
        }
    }
    return report;
}

SweepReport sweep(const Scenario& base, std::uint64_t runs, unsigned parallelism) {
    if (runs == 0) throw ConfigError("runs must be at least 1");
    base.validate();
    parallelism = std::max(1U, parallelism);
    std::vector<std::vector<Verdict>> results(runs);
    std::vector<std::string> errors(parallelism);
    auto work = [&](unsigned tid) {
        try {
            for (std::uint64_t k = tid; k < runs; k += parallelism) {
                Scenario s = base;
                s.seed = base.seed + k;
                results[k] = check_all(simulate(s).trace);
            }
        } catch (const std::exception& e) {
            errors[tid] = e.what();
        }
    };
    if (parallelism == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < parallelism; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error("sweep run failed: " + e);

    SweepReport report;
    report.runs = runs;
    for (std::uint64_t k = 0; k < runs; ++k) {
        bool pass = true;
        for (const auto& v : results[k]) {
            report.tallies[v.property].add(v.status);
            if (!v.violated()) continue;
            pass = false;
            if (report.failures.size() < kSweepFailureCap) report.failures.push_back({base.seed + k, v});
        }
        if (pass) ++report.passing_runs;
    }
    return report;
}

}  // namespace xpay
