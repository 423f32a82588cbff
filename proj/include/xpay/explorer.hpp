#pragma once

#include "xpay/properties.hpp"
#include "xpay/scenario.hpp"
#include "xpay/simulator.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace xpay {

struct PropertyTally {
    std::uint64_t holds = 0;
    std::uint64_t violated = 0;
    std::uint64_t vacuous = 0;
    std::uint64_t inapplicable = 0;

    void add(Status s);
    std::uint64_t total() const { return holds + violated + vacuous + inapplicable; }
};

using Tallies = std::map<std::string, PropertyTally>;

/// What to enumerate. Every message independently takes each grid delay.
struct ExploreSpec {
    /// Empty means {Δ/2, Δ}.
    std::vector<Time> grid;
    /// Participants that may turn Byzantine.
    std::vector<ParticipantId> candidates;
    /// Largest faulty subset tried; every subset up to this size is explored.
    std::uint32_t max_faulty = 1;
    /// Restricts the battery; empty means every applicable strategy.
    std::vector<std::string> strategies;
    std::vector<TieBreak> tie_breaks{TieBreak::ReceiveFirst, TieBreak::TimeoutFirst};
    /// Weak variant: alternatives for the scenario's patience list.
    std::vector<Patience> patience_options;
    /// Cap on simulated branches.
    std::uint64_t budget = 2'000'000;
};

struct Counterexample {
    std::string property;
    std::string detail;
    Scenario scenario;
    /// Delay of each send in order, for replay with ReplayChooser.
    std::vector<Time> delays;
    std::string trace;
};

struct ExploreReport {
    std::uint64_t configurations = 0;
    std::uint64_t branches = 0;
    bool budget_exceeded = false;
    Tallies tallies;
    /// All-compliant branches and, of those, how many paid Bob.
    std::uint64_t compliant_branches = 0;
    std::uint64_t compliant_paid = 0;
    /// First few safety violations.
    std::vector<Counterexample> counterexamples;
    std::uint64_t safety_violations = 0;

    bool safety_ok() const { return safety_violations == 0; }
};

/// Depth-first enumeration of per-message delay choices for every faulty
/// subset, strategy assignment, tie-break order and patience option.
/// `on_branch`, when set, sees every branch's result and verdicts.
ExploreReport explore(const Scenario& base, const ExploreSpec& spec,
                      const std::function<void(const SimulationResult&, const std::vector<Verdict>&)>& on_branch = {});

/// Feeds back a recorded delay sequence; afterwards answers `fallback`.
class ReplayChooser final : public DelayChooser {
public:
    ReplayChooser(std::vector<Time> delays, Time fallback) : delays_(std::move(delays)), fallback_(fallback) {}
    Time choose(const SendContext&) override {
        return next_ < delays_.size() ? delays_[next_++] : fallback_;
    }

private:
    std::vector<Time> delays_;
    Time fallback_;
    std::size_t next_ = 0;
};

struct SweepFailure {
    std::uint64_t seed = 0;
    Verdict verdict;
};

struct SweepReport {
    std::uint64_t runs = 0;
    Tallies tallies;
    std::vector<SweepFailure> failures;
    /// Runs in which every applicable property held.
    std::uint64_t passing_runs = 0;

    bool ok() const { return failures.empty(); }
};

/// Runs seeds base.seed .. base.seed + runs - 1 on up to `parallelism`
/// threads. The report does not depend on the thread count.
SweepReport sweep(const Scenario& base, std::uint64_t runs, unsigned parallelism);

}  // namespace xpay
