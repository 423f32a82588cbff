#include "xpay/scenario.hpp"

#include "rng.hpp"
#include "xpay/errors.hpp"
#include "xpay/timing.hpp"

#include <algorithm>

namespace xpay {
namespace {

constexpr std::uint64_t kClockStream = 1;
constexpr std::int64_t kRateSteps = 8;

void check_grid(const std::vector<Time>& grid, Time delta, const char* what) {
    for (const auto& g : grid) {
        if (g <= 0 || g > delta) throw ConfigError(std::string(what) + " delay " + format_time(g) + " outside (0, delta]");
    }
}

void check_rule(const DelayRule& r, std::uint32_t n, bool weak) {
    if (r.delay <= 0) throw ConfigError("delay rules need a positive delay");
    const auto known = roster(n, weak);
    for (const auto& p : {r.from, r.to}) {
        if (p && std::find(known.begin(), known.end(), *p) == known.end())
            throw ConfigError("delay rule names unknown participant " + to_string(*p));
    }
}

}  // namespace

std::optional<Time> delay_bound(const DelayModel& model) {
    return std::visit([](const auto& m) -> std::optional<Time> { return m.delta; }, model);
}

std::vector<Time> uniform_grid(Time delta, std::uint32_t k) {
    if (k == 0) throw ConfigError("grid needs at least one point");
    std::vector<Time> out;
    for (std::uint32_t j = 1; j <= k; ++j) out.push_back(delta * Time(j, k));
    return out;
}

void Scenario::validate() const {
    if (n < 1) throw ConfigError("n must be at least 1");
    if (amount <= 0) throw ConfigError("amount must be positive");
    if (rho < 0) throw ConfigError("rho must be non-negative");
    if (pi < 0) throw ConfigError("pi must be non-negative");
    if (epsilon && *epsilon < 0) throw ConfigError("epsilon must be non-negative");
    const bool weak = variant == Variant::Weak;

    std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, SynchronousDelay>) {
                if (m.delta <= 0) throw ConfigError("delta must be positive");
                check_grid(m.grid, m.delta, "synchronous");
            } else if constexpr (std::is_same_v<M, PartialSyncDelay>) {
                if (m.delta <= 0) throw ConfigError("delta must be positive");
                if (m.gst < 0) throw ConfigError("gst must be non-negative");
                check_grid(m.grid, m.delta, "post-GST");
                for (const auto& r : m.pre_gst) check_rule(r, n, weak);
            } else {
                if (m.delta && *m.delta <= 0) throw ConfigError("delta must be positive");
                if (m.fallback <= 0) throw ConfigError("fallback delay must be positive");
                for (const auto& r : m.rules) check_rule(r, n, weak);
            }
        },
        delay);

    if (std::holds_alternative<AutoTiming>(timing)) {
        if (!delay_bound(delay)) throw ConfigError("automatic timing needs a delay bound");
        if (std::get<AutoTiming>(timing).margin < 0) throw ConfigError("margin must be non-negative");
    } else {
        const auto& p = std::get<TimingParams>(timing);
        p.validate();
        if (p.n != n) throw ConfigError("timing lists do not match n");
    }

    const auto known = roster(n, weak);
    for (const auto& [who, spec] : byzantine) {
        if (who.is_manager()) throw ConfigError("the transaction manager is trusted and cannot be Byzantine");
        if (std::find(known.begin(), known.end(), who) == known.end())
            throw ConfigError("unknown participant " + to_string(who));
        if (spec.delay && *spec.delay < 0) throw ConfigError("strategy delay must be non-negative");
    }

    if (!patience.empty()) {
        if (!weak) throw ConfigError("patience applies to the weak variant only");
        if (patience.size() != n + 1) throw ConfigError("patience needs one entry per customer");
        for (const auto& p : patience)
            if (p && *p < 0) throw ConfigError("patience must be non-negative");
    }
    if (horizon && *horizon <= 0) throw ConfigError("horizon must be positive");
}

PaymentInstance payment_of(const Scenario& s) { return {s.instance, s.n, s.amount}; }

TimingParams resolve_timing(const Scenario& s) {
    if (const auto* p = std::get_if<TimingParams>(&s.timing)) {
        auto out = *p;
        out.validate();
        return out;
    }
    const auto bound = delay_bound(s.delay);
    if (!bound) throw ConfigError("automatic timing needs a delay bound");
    return derive_timeouts(s.n, *bound, s.pi, s.rho, s.epsilon, std::get<AutoTiming>(s.timing).margin);
}

Patience resolve_patience(const Scenario& s) {
    if (s.variant != Variant::Weak) return {};
    if (s.patience.empty()) return Patience(s.n + 1, std::nullopt);
    return s.patience;
}

Time resolve_horizon(const Scenario& s, const TimingParams& p) {
    if (s.horizon) return *s.horizon;
    Time base = termination_bound(p);
    if (const auto* ps = std::get_if<PartialSyncDelay>(&s.delay)) base += ps->gst;
    if (const auto* sc = std::get_if<ScriptedDelay>(&s.delay)) {
        Time worst = sc->fallback;
        for (const auto& r : sc->rules) worst = std::max(worst, r.delay);
        base += 4 * worst;
    }
    Time longest_patience{0};
    for (const auto& q : resolve_patience(s))
        if (q) longest_patience = std::max(longest_patience, *q);
    base += longest_patience * (1 + s.rho);
    return 4 * base;
}

std::map<ParticipantId, LocalClock> assign_clocks(const Scenario& s) {
    std::map<ParticipantId, LocalClock> out;
    const auto everyone = roster(s.n, s.variant == Variant::Weak);
    const Time fast = 1 + s.rho;
    const Time slow = 1 / fast;
    auto rng = detail::make_stream(s.seed, kClockStream);
    for (const auto& who : everyone) {
        Time rate{1};
        if (s.rho != Time{0} && !who.is_manager()) {
            switch (s.clock_mode) {
            case ClockMode::Identity: break;
            case ClockMode::Seeded: {
                const auto step = static_cast<std::int64_t>(detail::pick(rng, kRateSteps + 1));
                rate = slow + (fast - slow) * Time(step, kRateSteps);
                break;
            }
            case ClockMode::FastEscrows: rate = who.is_escrow() ? fast : slow; break;
            case ClockMode::SlowEscrows: rate = who.is_escrow() ? slow : fast; break;
            }
        }
        out.emplace(who, LocalClock(rate));
    }
    return out;
}

std::string to_string(Variant v) { return v == Variant::Strong ? "strong" : "weak"; }
std::string to_string(TieBreak t) { return t == TieBreak::ReceiveFirst ? "receive_first" : "timeout_first"; }
std::string to_string(ClockMode m) {
    switch (m) {
    case ClockMode::Identity: return "identity";
    case ClockMode::Seeded: return "seeded";
    case ClockMode::FastEscrows: return "fast_escrows";
    case ClockMode::SlowEscrows: return "slow_escrows";
    }
    return "?";
}

}  // namespace xpay
