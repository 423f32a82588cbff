#include "xpay/simulator.hpp"

#include "rng.hpp"
#include "xpay/byzantine.hpp"
#include "xpay/errors.hpp"

#include <cstdio>
#include <queue>

namespace xpay {
namespace {

constexpr std::uint64_t kDelayStream = 2;
constexpr std::uint64_t kStrategyNonceBase = 1'000'000'000;
constexpr std::uint32_t kDefaultGridPoints = 4;

enum class EventKind : std::uint8_t { Delivery, Deferred, ProcessingDone, TimeoutFire };

struct Event {
    Time time;
    int rank = 0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::Delivery;
    /// Recipient for Delivery, sender for Deferred, the stepping node otherwise.
    ParticipantId target;
    ParticipantId to;
    std::uint64_t epoch = 0;
    std::optional<Envelope> env;
};

struct Later {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time) return a.time > b.time;
        if (a.rank != b.rank) return a.rank > b.rank;
        return a.seq > b.seq;
    }
};

int rank_of(EventKind k, TieBreak tb) {
    const bool receive_first = tb == TieBreak::ReceiveFirst;
    switch (k) {
    case EventKind::Delivery:
    case EventKind::Deferred: return receive_first ? 0 : 1;
    case EventKind::ProcessingDone: return 2;
    case EventKind::TimeoutFire: return receive_first ? 3 : 0;
    }
    return 0;
}

struct Node {
    ParticipantId id;
    LocalClock clock;
    std::optional<Automaton> automaton;
    std::unique_ptr<ByzantineStrategy> strategy;
    std::optional<SigningKey> strategy_key;
    MessageVault vault;
    std::uint64_t epoch = 0;
    bool compliant = true;
};

bool rule_matches(const DelayRule& r, ParticipantId from, ParticipantId to, const SignedMessage& m) {
    return (!r.from || *r.from == from) && (!r.to || *r.to == to) && (!r.kind || *r.kind == m.payload().kind());
}

class Simulation;

class NodeContext final : public ByzantineContext {
public:
    NodeContext(Simulation& sim, Node& node) : sim_(sim), node_(node) {}
    ParticipantId self() const override { return node_.id; }
    Time now() const override;
    const MessageVault& vault() const override { return node_.vault; }
    const PaymentInstance& payment() const override;
    Variant variant() const override;
    bool emit(ParticipantId to, const Payload& attempt, ParticipantId as_signer, Time hold) override;
    void send(ParticipantId to, const SignedMessage& msg, Time hold) override;

private:
    Simulation& sim_;
    Node& node_;
};

class Simulation {
public:
    Simulation(const Scenario& s, const SimulationOptions& opts)
        : scenario_(s), options_(opts), rng_(detail::make_stream(s.seed, kDelayStream)) {
        s.validate();
        pay_ = payment_of(s);
        params_ = resolve_timing(s);
        horizon_ = resolve_horizon(s, params_);
        const bool weak = s.variant == Variant::Weak;
        const auto patience = resolve_patience(s);
        const auto clocks = assign_clocks(s);
        const KeyAuthority keys;

        auto automata = weak ? make_weak_participants(params_, pay_, patience, keys)
                             : make_strong_participants(params_, pay_, keys);
        for (auto& [id, a] : options_.overrides) {
            if (a.id() != id) throw ConfigError("override for " + to_string(id) + " has a different owner");
            if (!automata.contains(id)) throw ConfigError("override for unknown participant " + to_string(id));
            automata.insert_or_assign(id, a);
        }

        std::map<ParticipantId, std::int64_t> opening;
        for (const auto& id : roster(s.n, weak)) {
            Node node;
            node.id = id;
            node.clock = clocks.at(id);
            if (auto it = s.byzantine.find(id); it != s.byzantine.end()) {
                node.compliant = false;
                node.strategy = make_strategy(it->second, id, s.variant, params_.delta);
                node.strategy_key.emplace(keys.issue(id, kStrategyNonceBase));
                if (node.strategy->follows_protocol()) node.automaton.emplace(automata.at(id));
            } else {
                node.automaton.emplace(automata.at(id));
            }
            if (node.automaton) node.automaton->set_clock(node.clock);
            nodes_.emplace(id, std::move(node));
            opening[id] = id.is_customer() && id.index < s.n ? s.amount : 0;
        }
        ledger_ = Ledger(opening);

        auto& h = trace_.header;
        h.digest = scenario_digest(s);
        h.variant = s.variant;
        h.payment = pay_;
        h.params = params_;
        h.opening = opening;
        h.byzantine = s.byzantine;
        h.patience = patience;
        h.patience_sufficient = s.patience_sufficient;
        h.horizon = horizon_;
        h.tie_break = s.tie_break;
        h.clocks = clocks;
    }

    SimulationResult run() {
        for (auto& [id, node] : nodes_) {
            if (!node.automaton) continue;
            node.automaton->start(Time{0});
            enter_state(node, true);
        }
        for (auto& [id, node] : nodes_) {
            if (!node.strategy) continue;
            NodeContext ctx(*this, node);
            node.strategy->on_start(ctx);
        }
        while (!queue_.empty()) {
            if (queue_.top().time > horizon_) {
                trace_.status = RunStatus::HorizonReached;
                now_ = horizon_;
                record(nodes_.at(queue_.top().target), HorizonRecord{});
                break;
            }
            auto ev = queue_.top();
            queue_.pop();
            now_ = ev.time;
            handle(ev);
        }

        SimulationResult out;
        for (const auto& [id, node] : nodes_) {
            FinalState f;
            f.compliant = node.compliant;
            f.balance = ledger_.balance(id);
            if (node.automaton) {
                f.state = node.automaton->state().name;
                f.terminal = node.automaton->terminal();
            } else {
                f.state = node.strategy->name();
            }
            out.finals.emplace(id, f);
        }
        out.trace = std::move(trace_);
        out.ledger = ledger_;
        return out;
    }

    Time now() const { return now_; }
    const PaymentInstance& payment() const { return pay_; }
    Variant variant() const { return scenario_.variant; }

    void record(const Node& node, Record r) {
        const auto seq = static_cast<std::uint64_t>(trace_.entries.size());
        trace_.entries.push_back({now_, seq, node.id, read_clock(node.clock, now_), std::move(r)});
    }

    /// Sends now, or schedules the send after `hold`.
    void dispatch(Node& node, ParticipantId to, const SignedMessage& msg, Time hold) {
        if (hold > 0) {
            push(now_ + hold, EventKind::Deferred, node.id, 0, Envelope{node.id, msg}, to);
            return;
        }
        transmit(node, to, msg);
    }

private:
    void push(Time t, EventKind kind, ParticipantId target, std::uint64_t epoch, std::optional<Envelope> env = {},
              ParticipantId to = {}) {
        queue_.push({t, rank_of(kind, scenario_.tie_break), next_event_++, kind, target, to, epoch, std::move(env)});
    }

    void handle(const Event& ev) {
        auto& node = nodes_.at(ev.target);
        switch (ev.kind) {
        case EventKind::Delivery: deliver(node, *ev.env); break;
        case EventKind::Deferred: transmit(node, ev.to, ev.env->message); break;
        case EventKind::ProcessingDone:
            if (ev.epoch == node.epoch) fire(node, send_transition(*node.automaton));
            break;
        case EventKind::TimeoutFire:
            if (ev.epoch == node.epoch) try_fire(node);
            break;
        }
    }

    static std::size_t send_transition(const Automaton& a) {
        const auto& ts = a.state().transitions;
        for (std::size_t i = 0; i < ts.size(); ++i)
            if (std::holds_alternative<SendGuard>(ts[i].guard)) return i;
        throw std::logic_error("output state without send transition");
    }

    void enter_state(Node& node, bool initial) {
        auto& a = *node.automaton;
        ++node.epoch;
        record(node, StateRecord{a.state().name});
        switch (a.state().kind) {
        case StateKind::Terminal:
            record(node, TerminalRecord{a.state().name, ledger_.balance(node.id)});
            for (auto& env : a.discard_inbox()) record(node, DiscardRecord{env.from, env.message});
            break;
        case StateKind::Output:
            // Initial announcements go out at time zero; every later step costs π.
            push(now_ + (initial ? Time{0} : scenario_.pi), EventKind::ProcessingDone, node.id, node.epoch);
            break;
        case StateKind::Input:
            if (auto deadline = a.timeout_deadline()) {
                const auto at = std::max(now_, real_time_of_deadline(node.clock, *deadline));
                push(at, EventKind::TimeoutFire, node.id, node.epoch);
            }
            try_fire(node);
            break;
        }
    }

    /// A delivery may only enable receives: an expired timeout waits for its
    /// own event so that same-instant deliveries are ordered by the policy.
    void try_fire(Node& node, bool receive_only = false) {
        if (!node.automaton) return;
        auto& a = *node.automaton;
        if (a.state().kind != StateKind::Input) return;
        const auto enabled = a.enabled_transitions(now_);
        if (enabled.empty()) return;
        auto pick = enabled.front();
        if (receive_only && !std::holds_alternative<ReceiveGuard>(a.state().transitions[pick].guard)) return;
        if (scenario_.tie_break == TieBreak::TimeoutFirst) {
            const auto& last = a.state().transitions[enabled.back()];
            if (std::holds_alternative<TimeoutGuard>(last.guard)) pick = enabled.back();
        }
        fire(node, pick);
    }

    void fire(Node& node, std::size_t transition) {
        auto& a = *node.automaton;
        const auto left = a.state().name;
        auto result = a.step(transition, now_);
        if (result.timed_out) record(node, TimeoutRecord{left});
        for (const auto& out : result.sent) {
            Time hold{0};
            if (node.strategy) {
                NodeContext ctx(*this, node);
                const auto h = node.strategy->on_prescribed_send(ctx, out);
                if (!h) continue;
                hold = *h;
            }
            dispatch(node, out.to, out.message, hold);
        }
        enter_state(node, false);
    }

    void reject(Node& node, ParticipantId to, const SignedMessage& msg, std::string reason) {
        record(node, RejectedRecord{to, to_string(msg.payload()), std::move(reason)});
    }

    void transmit(Node& node, ParticipantId to, const SignedMessage& msg) {
        if (!nodes_.contains(to)) return reject(node, to, msg, "unknown-recipient");
        const auto* money = msg.payload().as<Money>();
        if (money) {
            if (msg.signer() != node.id) return reject(node, to, msg, "foreign-money");
            if (!may_transfer(node.id, to)) return reject(node, to, msg, "not-adjacent");
            try {
                ledger_.withdraw(node.id, money->amount);
            } catch (const InsufficientFunds&) {
                if (node.compliant) record(node, ViolationRecord{"insufficient-funds"});
                else reject(node, to, msg, "insufficient-funds");
                return;
            }
        }
        const auto at = now_ + choose_delay(node.id, to, msg);
        record(node, SentRecord{to, msg, at});
        if (money) record(node, TransferRecord{node.id, to, money->amount, false});
        push(at, EventKind::Delivery, to, 0, Envelope{node.id, msg});
    }

    Time sample(const std::vector<Time>& grid, Time delta) {
        if (grid.empty()) {
            const auto fallback = uniform_grid(delta, kDefaultGridPoints);
            return fallback[detail::pick(rng_, fallback.size())];
        }
        return grid[detail::pick(rng_, grid.size())];
    }

    Time choose_delay(ParticipantId from, ParticipantId to, const SignedMessage& msg) {
        if (options_.chooser) {
            const auto d = options_.chooser->choose({now_, from, to, msg});
            if (d < 0) throw std::logic_error("delay chooser returned a negative delay");
            return d;
        }
        return std::visit(
            [&](const auto& m) -> Time {
                using M = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<M, SynchronousDelay>) {
                    return sample(m.grid, m.delta);
                } else if constexpr (std::is_same_v<M, PartialSyncDelay>) {
                    if (now_ >= m.gst) return sample(m.grid, m.delta);
                    for (const auto& r : m.pre_gst)
                        if (rule_matches(r, from, to, msg)) return r.delay;
                    return (m.gst - now_) + sample(m.grid, m.delta);
                } else {
                    for (const auto& r : m.rules)
                        if (rule_matches(r, from, to, msg)) return r.delay;
                    return m.fallback;
                }
            },
            scenario_.delay);
    }

    void deliver(Node& node, const Envelope& env) {
        record(node, DeliveredRecord{env.from, env.message});
        if (const auto* money = env.message.payload().as<Money>()) {
            ledger_.deposit(node.id, money->amount);
            record(node, TransferRecord{env.from, node.id, money->amount, true});
        }
        node.vault.observe(env.message);
        if (node.strategy) {
            NodeContext ctx(*this, node);
            node.strategy->on_deliver(ctx, env);
        }
        if (!node.automaton) return;
        if (node.automaton->terminal()) {
            record(node, DiscardRecord{env.from, env.message});
            return;
        }
        node.automaton->deliver(env);
        try_fire(node, true);
    }

    const Scenario& scenario_;
    const SimulationOptions& options_;
    std::mt19937_64 rng_;
    PaymentInstance pay_;
    TimingParams params_;
    Time horizon_;
    Time now_{0};
    std::map<ParticipantId, Node> nodes_;
    Ledger ledger_;
    Trace trace_;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::uint64_t next_event_ = 0;
};

Time NodeContext::now() const { return sim_.now(); }
const PaymentInstance& NodeContext::payment() const { return sim_.payment(); }
Variant NodeContext::variant() const { return sim_.variant(); }

bool NodeContext::emit(ParticipantId to, const Payload& attempt, ParticipantId as_signer, Time hold) {
    try {
        const auto msg = byzantine_emit(*node_.strategy_key, node_.vault, attempt, as_signer);
        sim_.dispatch(node_, to, msg, hold);
        return true;
    } catch (const ForgeryRejected&) {
        sim_.record(node_, RejectedRecord{to, to_string(attempt), "forgery"});
        return false;
    }
}

void NodeContext::send(ParticipantId to, const SignedMessage& msg, Time hold) { sim_.dispatch(node_, to, msg, hold); }

std::string render_rule(const DelayRule& r) {
    return (r.from ? to_string(*r.from) : "*") + ">" + (r.to ? to_string(*r.to) : "*") + ":" +
           (r.kind ? to_string(*r.kind) : "*") + "=" + format_time(r.delay);
}

std::string render_grid(const std::vector<Time>& g) {
    std::string out;
    for (const auto& t : g) out += format_time(t) + ",";
    return out;
}

}  // namespace

SimulationResult simulate(const Scenario& scenario, const SimulationOptions& options) {
    Simulation sim(scenario, options);
    return sim.run();
}

std::string scenario_digest(const Scenario& s) {
    std::string c = "variant=" + to_string(s.variant) + ";n=" + std::to_string(s.n) +
                    ";amount=" + std::to_string(s.amount) + ";instance=" + std::to_string(s.instance) +
                    ";rho=" + format_time(s.rho) + ";pi=" + format_time(s.pi) +
                    ";epsilon=" + (s.epsilon ? format_time(*s.epsilon) : "default") + ";delay=";
    std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, SynchronousDelay>) {
                c += "sync(" + format_time(m.delta) + "|" + render_grid(m.grid) + ")";
            } else if constexpr (std::is_same_v<M, PartialSyncDelay>) {
                c += "psync(" + format_time(m.gst) + "|" + format_time(m.delta) + "|" + render_grid(m.grid) + "|";
                for (const auto& r : m.pre_gst) c += render_rule(r) + ",";
                c += ")";
            } else {
                c += "script(" + (m.delta ? format_time(*m.delta) : std::string("none")) + "|" +
                     format_time(m.fallback) + "|";
                for (const auto& r : m.rules) c += render_rule(r) + ",";
                c += ")";
            }
        },
        s.delay);
    if (const auto* a = std::get_if<AutoTiming>(&s.timing)) {
        c += ";timing=auto(" + format_time(a->margin) + ")";
    } else {
        const auto& p = std::get<TimingParams>(s.timing);
        c += ";timing=explicit(" + render_grid(p.a) + "|" + render_grid(p.d) + ")";
    }
    c += ";byzantine=";
    for (const auto& [who, spec] : s.byzantine)
        c += to_string(who) + ":" + spec.name + "@" + (spec.delay ? format_time(*spec.delay) : "default") + ",";
    c += ";patience=";
    for (const auto& p : s.patience) c += (p ? format_time(*p) : "inf") + ",";
    c += std::string(";sufficient=") + (s.patience_sufficient ? "1" : "0");
    c += ";seed=" + std::to_string(s.seed);
    c += ";horizon=" + (s.horizon ? format_time(*s.horizon) : "default");
    c += ";clocks=" + to_string(s.clock_mode) + ";tie=" + to_string(s.tie_break);

    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : c) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace xpay
