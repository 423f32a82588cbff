#pragma once

#include "xpay/automaton.hpp"
#include "xpay/message.hpp"
#include "xpay/protocol.hpp"
#include "xpay/scenario.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace xpay {

/// Signed messages a participant has seen. Replaying one of them is the only
/// way to emit something under another participant's signature.
class MessageVault {
public:
    void observe(const SignedMessage& msg);
    /// An observed message with this payload and signer.
    std::optional<SignedMessage> find(const Payload& payload, ParticipantId signer) const;
    const std::vector<SignedMessage>& all() const { return seen_; }

private:
    std::vector<SignedMessage> seen_;
};

/// Signs `attempt` when `as_signer` is the key's owner; otherwise returns a
/// matching vault message verbatim. Throws ForgeryRejected when neither works.
SignedMessage byzantine_emit(SigningKey& own_key, const MessageVault& vault, const Payload& attempt,
                             ParticipantId as_signer);

/// What a strategy may do. The simulator implements it per node.
class ByzantineContext {
public:
    virtual ~ByzantineContext() = default;
    virtual ParticipantId self() const = 0;
    virtual Time now() const = 0;
    virtual const MessageVault& vault() const = 0;
    virtual const PaymentInstance& payment() const = 0;
    virtual Variant variant() const = 0;
    /// Signs or replays through byzantine_emit and sends after `hold`. A
    /// refused forgery is logged and yields false.
    virtual bool emit(ParticipantId to, const Payload& attempt, ParticipantId as_signer, Time hold) = 0;
    /// Sends an already signed message after `hold`.
    virtual void send(ParticipantId to, const SignedMessage& msg, Time hold) = 0;
};

/// Deviation policy of one faulty participant. When follows_protocol() is
/// true the node still runs its prescribed automaton and the strategy filters
/// that automaton's sends.
class ByzantineStrategy {
public:
    virtual ~ByzantineStrategy() = default;
    virtual std::string name() const = 0;
    virtual bool follows_protocol() const { return true; }
    virtual void on_start(ByzantineContext&) {}
    virtual void on_deliver(ByzantineContext&, const Envelope&) {}
    /// Extra hold before a prescribed send goes out, or nullopt to drop it.
    virtual std::optional<Time> on_prescribed_send(ByzantineContext&, const Outgoing&) { return Time{0}; }
};

/// Known names: silent, delay_own_sends, withhold_certificate,
/// premature_certificate, greedy_escrow, replayer, impatient_abort. Throws
/// ConfigError for an unknown name or one that does not fit `who`.
std::unique_ptr<ByzantineStrategy> make_strategy(const StrategySpec& spec, ParticipantId who, Variant variant,
                                                 Time delta);

/// Every strategy applicable to `who`.
std::vector<StrategySpec> strategy_battery(ParticipantId who, Variant variant);

/// Participants `who` exchanges messages with in the protocol.
std::vector<ParticipantId> neighbours(ParticipantId who, std::uint32_t n, Variant variant);

}  // namespace xpay
