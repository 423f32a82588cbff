#pragma once

#include "xpay/clock.hpp"
#include "xpay/message.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace xpay {

using StateId = std::uint32_t;

enum class StateKind : std::uint8_t { Input, Output, Terminal };

/// Shape of an acceptable message. Unset optionals match anything; the
/// signature must verify for `signer`, which defaults to the wire sender.
struct PayloadPattern {
    PayloadKind kind = PayloadKind::Certificate;
    std::optional<ParticipantId> signer{};
    std::optional<Time> window{};
    std::optional<std::int64_t> amount{};
    std::optional<std::uint32_t> escrow{};
};

bool matches(const PayloadPattern& pattern, const Envelope& env, ParticipantId sender, std::uint64_t instance);

/// r(sender, m)
struct ReceiveGuard {
    ParticipantId sender;
    PayloadPattern pattern;
};

/// now >= clock_var + after
struct TimeoutGuard {
    std::string clock_var;
    Time after;
};

/// Leaving an Output state once its processing time has elapsed.
struct SendGuard {};

/// Re-sends the most recently consumed message of this kind verbatim, so a
/// forwarded certificate still carries its author's signature.
struct Relay {
    PayloadKind kind;
};

struct Emit {
    ParticipantId to;
    /// A fresh payload is signed by the automaton itself.
    std::variant<Payload, Relay> what;
};

struct Transition {
    std::variant<ReceiveGuard, TimeoutGuard, SendGuard> guard;
    /// Each listed variable is set to the local clock reading when the
    /// transition fires.
    std::vector<std::string> assign;
    StateId target = 0;
    /// Only meaningful when leaving an Output state.
    std::vector<Emit> emits;
};

struct StateSpec {
    std::string name;
    StateKind kind = StateKind::Input;
    std::vector<Transition> transitions;
};

struct Outgoing {
    ParticipantId to;
    SignedMessage message;
};

struct StepResult {
    std::vector<Outgoing> sent;
    std::optional<Envelope> consumed;
    bool timed_out = false;
};

/// One participant's timed state machine. Input states wait for a buffered
/// message matching a receive guard, or for their timeout guard; Output
/// states leave through a single send transition; Terminal states are final.
///
/// The state table is shared between copies, everything else is a value.
class Automaton {
public:
    /// Throws ConfigError if the table is malformed: bad targets, an Output
    /// state without exactly one send transition, an Input state with more
    /// than one timeout guard or with send transitions, a Terminal state
    /// with transitions.
    Automaton(ParticipantId id, std::uint64_t instance, std::vector<StateSpec> states, StateId initial,
              SigningKey key, std::vector<std::string> start_assignments = {});

    ParticipantId id() const { return id_; }
    std::uint64_t instance() const { return instance_; }
    const LocalClock& clock() const { return clock_; }
    void set_clock(LocalClock clock) { clock_ = clock; }

    StateId current() const { return current_; }
    const StateSpec& state() const { return (*states_)[current_]; }
    const StateSpec& state(StateId id) const { return states_->at(id); }
    std::size_t state_count() const { return states_->size(); }
    bool terminal() const { return state().kind == StateKind::Terminal; }

    const std::map<std::string, Time>& clock_vars() const { return clock_vars_; }
    const std::deque<Envelope>& inbox() const { return inbox_; }
    /// Last consumed message of each kind.
    const std::map<PayloadKind, SignedMessage>& held() const { return held_; }

    /// Applies the start assignments (e.g. `start := now`) at real time t.
    void start(Time real_time);

    /// Buffers a message; matching happens in enabled_transitions.
    void deliver(Envelope env);

    /// Indices into state().transitions enabled at real time t, receive
    /// transitions first in order of their matched message's arrival, then
    /// the timeout transition. Empty unless the current state is Input.
    std::vector<std::size_t> enabled_transitions(Time real_time) const;

    /// Local deadline of the current Input state's timeout guard, if it has
    /// one whose clock variable is assigned.
    std::optional<Time> timeout_deadline() const;

    /// Fires `transition` at real time t: consumes the matched message (if
    /// any), applies clock assignments, moves to the target and signs the
    /// emitted payloads. Throws ProtocolComplete in a Terminal state and
    /// std::logic_error when the transition is not enabled.
    StepResult step(std::size_t transition, Time real_time);

    /// Empties the buffer, returning what was there.
    std::vector<Envelope> discard_inbox();

private:
    std::optional<std::size_t> match_index(const ReceiveGuard& guard) const;

    ParticipantId id_;
    std::uint64_t instance_;
    std::shared_ptr<const std::vector<StateSpec>> states_;
    StateId current_;
    SigningKey key_;
    LocalClock clock_;
    std::vector<std::string> start_assignments_;
    std::map<std::string, Time> clock_vars_;
    std::deque<Envelope> inbox_;
    std::map<PayloadKind, SignedMessage> held_;
};

}  // namespace xpay
