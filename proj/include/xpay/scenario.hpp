#pragma once

#include "xpay/clock.hpp"
#include "xpay/message.hpp"
#include "xpay/protocol.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace xpay {

enum class Variant : std::uint8_t { Strong, Weak };

/// Which transition an Input state takes when a receive and its timeout are
/// enabled at the same instant.
enum class TieBreak : std::uint8_t { ReceiveFirst, TimeoutFirst };

enum class ClockMode : std::uint8_t {
    Identity,
    Seeded,
    /// Escrows at 1+ρ, customers at 1/(1+ρ): timeouts fire as early as allowed.
    FastEscrows,
    /// Escrows at 1/(1+ρ), customers at 1+ρ: timeouts fire as late as allowed.
    SlowEscrows,
};

/// Matches sends by sender, recipient and message kind; unset fields match
/// anything.
struct DelayRule {
    std::optional<ParticipantId> from;
    std::optional<ParticipantId> to;
    std::optional<PayloadKind> kind;
    Time delay;
};

/// Every delay drawn from `grid`, all points in (0, Δ].
struct SynchronousDelay {
    Time delta{1};
    std::vector<Time> grid;
};

/// Sends after GST behave synchronously. Earlier sends follow `pre_gst`
/// rules when one matches, otherwise they are held until GST and then
/// delivered within Δ.
struct PartialSyncDelay {
    Time gst{0};
    Time delta{1};
    std::vector<Time> grid;
    std::vector<DelayRule> pre_gst;
};

/// First matching rule wins, otherwise `fallback`. `delta` is the nominal
/// bound used when timeouts are derived automatically.
struct ScriptedDelay {
    std::optional<Time> delta;
    Time fallback{1};
    std::vector<DelayRule> rules;
};

using DelayModel = std::variant<SynchronousDelay, PartialSyncDelay, ScriptedDelay>;

/// The Δ a model promises (or declares), if any.
std::optional<Time> delay_bound(const DelayModel& model);

/// {Δ/k, 2Δ/k, ..., Δ}
std::vector<Time> uniform_grid(Time delta, std::uint32_t k);

struct StrategySpec {
    std::string name;
    /// Extra hold time for delay_own_sends.
    std::optional<Time> delay;
    bool operator==(const StrategySpec&) const = default;
};

struct AutoTiming {
    Time margin{0};
};

/// Full description of one experiment. A run is a pure function of it.
struct Scenario {
    Variant variant = Variant::Strong;
    std::uint32_t n = 1;
    std::int64_t amount = 1;
    std::uint64_t instance = 1;
    DelayModel delay = SynchronousDelay{Time{1}, {}};
    Time rho{0};
    Time pi{0};
    /// Defaults to (1+ρ)π, the settle step's worst local duration.
    std::optional<Time> epsilon;
    std::variant<AutoTiming, TimingParams> timing = AutoTiming{};
    std::map<ParticipantId, StrategySpec> byzantine;
    /// Weak variant only; empty means everyone is infinitely patient.
    Patience patience;
    /// Asserts that the finite patience values are long enough for weak
    /// liveness to be expected.
    bool patience_sufficient = false;
    std::uint64_t seed = 0;
    std::optional<Time> horizon;
    ClockMode clock_mode = ClockMode::Seeded;
    TieBreak tie_break = TieBreak::ReceiveFirst;

    /// Throws ConfigError: bad n/amount, negative ρ/π, a Byzantine manager
    /// or unknown participant, auto timing without a Δ bound, malformed
    /// patience, or delay points outside (0, Δ].
    void validate() const;
};

PaymentInstance payment_of(const Scenario& s);

/// Explicit parameters as given, or derived from the delay bound.
TimingParams resolve_timing(const Scenario& s);

/// Explicit horizon, or 4 × the termination bound.
Time resolve_horizon(const Scenario& s, const TimingParams& p);

/// The patience list with infinite entries filled in for the weak variant.
Patience resolve_patience(const Scenario& s);

/// Deterministic, seed-derived clock per participant. Rates stay within
/// [1/(1+ρ), 1+ρ]; ρ = 0 always yields identity clocks.
std::map<ParticipantId, LocalClock> assign_clocks(const Scenario& s);

std::string to_string(Variant v);
std::string to_string(TieBreak t);
std::string to_string(ClockMode m);

}  // namespace xpay
