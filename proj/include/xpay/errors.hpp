#pragma once

#include <stdexcept>
#include <string>

namespace xpay {

/// Invalid scenario, roster index or timing parameters.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A signing capability was used for an identity it does not belong to.
struct AuthorizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A transfer asked for more than the account holds. When a compliant
/// participant hits this, the protocol prescribed an impossible step.
struct InsufficientFunds : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A Byzantine participant tried to emit a message under someone else's
/// signature that it had never observed.
struct ForgeryRejected : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when stepping an automaton that already sits in a terminal state.
/// Signals completion, not a fault.
struct ProtocolComplete : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace xpay
