#pragma once

#include "xpay/automaton.hpp"
#include "xpay/ledger.hpp"
#include "xpay/scenario.hpp"
#include "xpay/trace.hpp"

#include <map>
#include <string>

namespace xpay {

struct SendContext {
    Time now;
    ParticipantId from;
    ParticipantId to;
    const SignedMessage& message;
};

/// Replaces the scenario's delay model, e.g. to enumerate delays.
class DelayChooser {
public:
    virtual ~DelayChooser() = default;
    virtual Time choose(const SendContext& ctx) = 0;
};

struct SimulationOptions {
    DelayChooser* chooser = nullptr;
    /// Replaces the prescribed automaton of a participant, which still
    /// counts as compliant. Used to demonstrate the checkers on faulty tables.
    std::map<ParticipantId, Automaton> overrides;
};

struct FinalState {
    std::string state;
    bool terminal = false;
    std::int64_t balance = 0;
    bool compliant = true;
};

struct SimulationResult {
    Trace trace;
    std::map<ParticipantId, FinalState> finals;
    Ledger ledger;
};

/// Deterministic in the scenario (including its seed) and the chooser's
/// answers. Throws ConfigError for an invalid scenario.
SimulationResult simulate(const Scenario& scenario, const SimulationOptions& options = {});

/// FNV-1a over a canonical rendering of the scenario, 16 hex digits.
std::string scenario_digest(const Scenario& scenario);

}  // namespace xpay
