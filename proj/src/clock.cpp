#include "xpay/clock.hpp"

#include <stdexcept>

namespace xpay {

LocalClock::LocalClock(Time rate, Time offset) : rate_(rate), offset_(offset) {
    if (rate_ <= 0) throw std::invalid_argument("clock rate must be positive");
}

Time read_clock(const LocalClock& clock, Time real_time) { return clock.offset() + clock.rate() * real_time; }

Time real_time_of_deadline(const LocalClock& clock, Time local_deadline) {
    if (local_deadline < clock.offset()) throw std::invalid_argument("deadline precedes the clock's origin");
    return (local_deadline - clock.offset()) / clock.rate();
}

}  // namespace xpay
