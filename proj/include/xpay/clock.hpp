#pragma once

#include "xpay/rational.hpp"

namespace xpay {

/// Affine drifting clock: local(t) = offset + rate * t, rate > 0.
class LocalClock {
public:
    LocalClock() = default;
    /// Throws std::invalid_argument unless rate > 0.
    explicit LocalClock(Time rate, Time offset = 0);

    Time rate() const { return rate_; }
    Time offset() const { return offset_; }

    bool operator==(const LocalClock&) const = default;

private:
    Time rate_{1};
    Time offset_{0};
};

/// Local reading at real time t.
Time read_clock(const LocalClock& clock, Time real_time);

/// The unique real instant at which the clock shows `local_deadline`.
/// Throws std::invalid_argument when the deadline lies before the clock's offset.
Time real_time_of_deadline(const LocalClock& clock, Time local_deadline);

}  // namespace xpay
