#include "xpay/automaton.hpp"

#include "xpay/errors.hpp"

#include <algorithm>
#include <stdexcept>

namespace xpay {

bool matches(const PayloadPattern& pattern, const Envelope& env, ParticipantId sender, std::uint64_t instance) {
    if (env.from != sender) return false;
    const auto& msg = env.message;
    if (!verify(msg, pattern.signer.value_or(sender))) return false;
    const auto& p = msg.payload();
    if (p.kind() != pattern.kind || p.instance() != instance) return false;
    if (pattern.window) {
        if (auto g = p.as<Guarantee>(); g && g->window != *pattern.window) return false;
        if (auto pr = p.as<Promise>(); pr && pr->window != *pattern.window) return false;
    }
    if (pattern.amount) {
        if (auto m = p.as<Money>(); m && m->amount != *pattern.amount) return false;
    }
    if (pattern.escrow) {
        if (auto l = p.as<LockNotice>(); l && l->escrow != *pattern.escrow) return false;
    }
    return true;
}

Automaton::Automaton(ParticipantId id, std::uint64_t instance, std::vector<StateSpec> states, StateId initial,
                     SigningKey key, std::vector<std::string> start_assignments)
    : id_(id),
      instance_(instance),
      states_(std::make_shared<const std::vector<StateSpec>>(std::move(states))),
      current_(initial),
      key_(key),
      start_assignments_(std::move(start_assignments)) {
    const auto where = [&](const StateSpec& s) { return to_string(id_) + " state '" + s.name + "': "; };
    if (key_.owner() != id_) throw ConfigError("automaton " + to_string(id_) + " given a foreign key");
    if (current_ >= states_->size()) throw ConfigError("initial state out of range");
    for (const auto& s : *states_) {
        std::size_t sends = 0, timeouts = 0;
        for (const auto& t : s.transitions) {
            if (t.target >= states_->size()) throw ConfigError(where(s) + "transition target out of range");
            sends += std::holds_alternative<SendGuard>(t.guard);
            timeouts += std::holds_alternative<TimeoutGuard>(t.guard);
        }
        switch (s.kind) {
            case StateKind::Terminal:
                if (!s.transitions.empty()) throw ConfigError(where(s) + "terminal state with transitions");
                break;
            case StateKind::Output:
                if (s.transitions.size() != 1 || sends != 1)
                    throw ConfigError(where(s) + "output state needs exactly one send transition");
                if (s.transitions.front().emits.empty()) throw ConfigError(where(s) + "output state emits nothing");
                break;
            case StateKind::Input:
                if (sends != 0) throw ConfigError(where(s) + "input state with a send transition");
                if (timeouts > 1) throw ConfigError(where(s) + "more than one timeout guard");
                if (s.transitions.empty()) throw ConfigError(where(s) + "input state without transitions");
                break;
        }
    }
}

void Automaton::start(Time real_time) {
    const auto now = read_clock(clock_, real_time);
    for (const auto& v : start_assignments_) clock_vars_[v] = now;
}

void Automaton::deliver(Envelope env) { inbox_.push_back(std::move(env)); }

std::optional<std::size_t> Automaton::match_index(const ReceiveGuard& guard) const {
    for (std::size_t i = 0; i < inbox_.size(); ++i)
        if (matches(guard.pattern, inbox_[i], guard.sender, instance_)) return i;
    return std::nullopt;
}

std::optional<Time> Automaton::timeout_deadline() const {
    if (state().kind != StateKind::Input) return std::nullopt;
    for (const auto& t : state().transitions) {
        if (const auto* g = std::get_if<TimeoutGuard>(&t.guard)) {
            auto it = clock_vars_.find(g->clock_var);
            if (it == clock_vars_.end()) return std::nullopt;
            return it->second + g->after;
        }
    }
    return std::nullopt;
}

std::vector<std::size_t> Automaton::enabled_transitions(Time real_time) const {
    std::vector<std::pair<std::size_t, std::size_t>> receives;  // (inbox position, transition)
    std::vector<std::size_t> out;
    if (state().kind != StateKind::Input) return out;
    const auto& ts = state().transitions;
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (const auto* g = std::get_if<ReceiveGuard>(&ts[i].guard))
            if (auto pos = match_index(*g)) receives.emplace_back(*pos, i);
    std::stable_sort(receives.begin(), receives.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& r : receives) out.push_back(r.second);
    if (auto deadline = timeout_deadline(); deadline && read_clock(clock_, real_time) >= *deadline) {
        for (std::size_t i = 0; i < ts.size(); ++i)
            if (std::holds_alternative<TimeoutGuard>(ts[i].guard)) out.push_back(i);
    }
    return out;
}

StepResult Automaton::step(std::size_t transition, Time real_time) {
    if (terminal()) throw ProtocolComplete(to_string(id_) + " already in terminal state '" + state().name + "'");
    const auto& s = state();
    if (transition >= s.transitions.size()) throw std::logic_error("transition index out of range");
    const auto& t = s.transitions[transition];

    StepResult result;
    if (s.kind == StateKind::Input) {
        const auto enabled = enabled_transitions(real_time);
        if (std::find(enabled.begin(), enabled.end(), transition) == enabled.end())
            throw std::logic_error(to_string(id_) + ": transition not enabled in '" + s.name + "'");
        if (const auto* g = std::get_if<ReceiveGuard>(&t.guard)) {
            const auto pos = *match_index(*g);
            result.consumed = inbox_[pos];
            held_.insert_or_assign(result.consumed->message.payload().kind(), result.consumed->message);
            inbox_.erase(inbox_.begin() + static_cast<std::ptrdiff_t>(pos));
        } else {
            result.timed_out = true;
        }
    }

    const auto now = read_clock(clock_, real_time);
    for (const auto& v : t.assign) clock_vars_[v] = now;
    for (const auto& e : t.emits) {
        if (const auto* relay = std::get_if<Relay>(&e.what)) {
            auto it = held_.find(relay->kind);
            if (it == held_.end())
                throw std::logic_error(to_string(id_) + ": nothing held to relay as " + to_string(relay->kind));
            result.sent.push_back({e.to, it->second});
        } else {
            result.sent.push_back({e.to, sign(std::get<Payload>(e.what), id_, key_)});
        }
    }
    current_ = t.target;
    return result;
}

std::vector<Envelope> Automaton::discard_inbox() {
    std::vector<Envelope> out(inbox_.begin(), inbox_.end());
    inbox_.clear();
    return out;
}

}  // namespace xpay
