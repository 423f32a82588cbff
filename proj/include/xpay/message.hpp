#pragma once

#include "xpay/participant.hpp"
#include "xpay/rational.hpp"

#include <cstdint>
#include <string>
#include <variant>

namespace xpay {

// Message bodies. G(d) and P(a) carry their local-time windows.
struct Guarantee {
    Time window;
    bool operator==(const Guarantee&) const = default;
};
struct Promise {
    Time window;
    bool operator==(const Promise&) const = default;
};
struct Money {
    std::int64_t amount = 0;
    bool operator==(const Money&) const = default;
};
struct Certificate {
    bool operator==(const Certificate&) const = default;
};
struct AbortCert {
    bool operator==(const AbortCert&) const = default;
};
struct CommitCert {
    bool operator==(const CommitCert&) const = default;
};
struct LockNotice {
    std::uint32_t escrow = 0;
    bool operator==(const LockNotice&) const = default;
};
struct CommitReq {
    bool operator==(const CommitReq&) const = default;
};
struct AbortReq {
    bool operator==(const AbortReq&) const = default;
};

enum class PayloadKind : std::uint8_t {
    Guarantee,
    Promise,
    Money,
    Certificate,
    AbortCert,
    CommitCert,
    LockNotice,
    CommitReq,
    AbortReq,
};

/// Message content bound to one payment instance. The instance id travels
/// inside the signed content, so a certificate from another payment never
/// matches a guard of this one.
class Payload {
public:
    using Body = std::variant<Guarantee, Promise, Money, Certificate, AbortCert, CommitCert, LockNotice,
                              CommitReq, AbortReq>;

    /// Throws std::invalid_argument for non-positive windows or amounts.
    Payload(Body body, std::uint64_t instance);

    static Payload guarantee(Time d, std::uint64_t instance) { return {Guarantee{d}, instance}; }
    static Payload promise(Time a, std::uint64_t instance) { return {Promise{a}, instance}; }
    static Payload money(std::int64_t amount, std::uint64_t instance) { return {Money{amount}, instance}; }
    static Payload certificate(std::uint64_t instance) { return {Certificate{}, instance}; }
    static Payload abort_cert(std::uint64_t instance) { return {AbortCert{}, instance}; }
    static Payload commit_cert(std::uint64_t instance) { return {CommitCert{}, instance}; }
    static Payload lock_notice(std::uint32_t escrow, std::uint64_t instance) { return {LockNotice{escrow}, instance}; }
    static Payload commit_req(std::uint64_t instance) { return {CommitReq{}, instance}; }
    static Payload abort_req(std::uint64_t instance) { return {AbortReq{}, instance}; }

    PayloadKind kind() const { return static_cast<PayloadKind>(body_.index()); }
    const Body& body() const { return body_; }
    std::uint64_t instance() const { return instance_; }

    template <class T>
    const T* as() const {
        return std::get_if<T>(&body_);
    }

    bool operator==(const Payload&) const = default;

private:
    Body body_;
    std::uint64_t instance_ = 0;
};

/// "G(23/10)", "P(21/10)", "$(1)", "CHI", "CHI_A", "CHI_C", "LOCK(0)",
/// "COMMIT_REQ", "ABORT_REQ".
std::string to_string(const Payload& p);
std::string to_string(PayloadKind k);
PayloadKind parse_payload_kind(std::string_view text);

class SigningKey;
class SignedMessage;
SignedMessage sign(const Payload& payload, ParticipantId signer, SigningKey& key);

/// Capability to sign as one participant. Only a KeyAuthority can mint one,
/// and the simulator hands each participant exactly its own. The key also
/// carries the participant's nonce counter.
class SigningKey {
public:
    ParticipantId owner() const { return owner_; }

private:
    friend class KeyAuthority;
    friend SignedMessage sign(const Payload&, ParticipantId, SigningKey&);
    SigningKey(ParticipantId owner, std::uint64_t first_nonce) : owner_(owner), next_nonce_(first_nonce) {}

    ParticipantId owner_;
    std::uint64_t next_nonce_;
};

class KeyAuthority {
public:
    SigningKey issue(ParticipantId owner, std::uint64_t first_nonce = 1) const { return {owner, first_nonce}; }
};

/// A payload wrapped with an unforgeable signer tag. There is no public
/// constructor: a value exists only because `sign` produced it with the
/// signer's own key, or because someone copied (replayed) one.
class SignedMessage {
public:
    const Payload& payload() const { return payload_; }
    ParticipantId signer() const { return signer_; }
    std::uint64_t nonce() const { return nonce_; }

    bool operator==(const SignedMessage&) const = default;

private:
    friend SignedMessage sign(const Payload&, ParticipantId, SigningKey&);
    SignedMessage(Payload payload, ParticipantId signer, std::uint64_t nonce)
        : payload_(std::move(payload)), signer_(signer), nonce_(nonce) {}

    Payload payload_;
    ParticipantId signer_;
    std::uint64_t nonce_;
};

/// Throws AuthorizationError when `key` does not belong to `signer`.
SignedMessage sign(const Payload& payload, ParticipantId signer, SigningKey& key);

/// True iff `msg` was signed with `claimed_signer`'s key.
bool verify(const SignedMessage& msg, ParticipantId claimed_signer);

/// A message as it arrives: the network authenticates the point-to-point
/// sender, the signature authenticates the content's author.
struct Envelope {
    ParticipantId from;
    SignedMessage message;
    bool operator==(const Envelope&) const = default;
};

}  // namespace xpay
