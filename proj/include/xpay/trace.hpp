#pragma once

#include "xpay/clock.hpp"
#include "xpay/message.hpp"
#include "xpay/protocol.hpp"
#include "xpay/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace xpay {

/// A message left `who` towards `to`; it arrives at real time `deliver_at`.
struct SentRecord {
    ParticipantId to;
    SignedMessage message;
    Time deliver_at;
};

/// A message reached `who`.
struct DeliveredRecord {
    ParticipantId from;
    SignedMessage message;
};

/// An emission attempt the system refused: a forgery, or money that may not
/// move. `attempt` is the payload rendering.
struct RejectedRecord {
    ParticipantId to;
    std::string attempt;
    std::string reason;
};

/// `state` is the Input state the timeout left.
struct TimeoutRecord {
    std::string state;
};

struct StateRecord {
    std::string state;
};

/// Debit when money leaves the sender, credit when it reaches the recipient.
struct TransferRecord {
    ParticipantId from;
    ParticipantId to;
    std::int64_t amount = 0;
    bool credit = false;
};

struct TerminalRecord {
    std::string state;
    std::int64_t balance = 0;
};

/// A message that arrived after `who` terminated, or was still buffered then.
struct DiscardRecord {
    ParticipantId from;
    SignedMessage message;
};

/// The protocol prescribed something impossible for a compliant participant.
struct ViolationRecord {
    std::string reason;
};

struct HorizonRecord {};

using Record = std::variant<SentRecord, DeliveredRecord, RejectedRecord, TimeoutRecord, StateRecord,
                            TransferRecord, TerminalRecord, DiscardRecord, ViolationRecord, HorizonRecord>;

struct TraceEntry {
    Time real;
    std::uint64_t seq = 0;
    ParticipantId who;
    Time local;
    Record record;
};

/// Everything the property checkers need besides the events.
struct TraceHeader {
    std::string digest;
    Variant variant = Variant::Strong;
    PaymentInstance payment;
    TimingParams params;
    std::map<ParticipantId, std::int64_t> opening;
    std::map<ParticipantId, StrategySpec> byzantine;
    Patience patience;
    bool patience_sufficient = false;
    Time horizon;
    TieBreak tie_break = TieBreak::ReceiveFirst;
    std::map<ParticipantId, LocalClock> clocks;
};

enum class RunStatus : std::uint8_t { Completed, HorizonReached };

struct Trace {
    TraceHeader header;
    std::vector<TraceEntry> entries;
    RunStatus status = RunStatus::Completed;

    bool compliant(ParticipantId id) const { return !header.byzantine.contains(id); }
    bool all_compliant() const { return header.byzantine.empty(); }
};

/// "t=<n/d> seq=<k> p=<id> lt=<n/d> ev=<KIND> key=value..."
std::string format_entry(const TraceEntry& e);

/// "SENT", "DELIVERED", ...
std::string record_kind(const Record& r);

/// Header lines prefixed with "#", then one line per entry.
void write_trace(std::ostream& out, const Trace& trace);
std::string trace_to_string(const Trace& trace);

}  // namespace xpay
