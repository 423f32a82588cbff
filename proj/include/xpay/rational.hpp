#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace xpay {

/// Exact time value. Real time, local clock readings and durations all use it,
/// so timeout boundaries compare without rounding.
using Time = boost::rational<std::int64_t>;

/// Parses "21/10", "-3", "2" or a plain decimal such as "0.25".
/// Throws std::invalid_argument on malformed input or a zero denominator.
Time parse_time(std::string_view text);

/// Always renders as "<num>/<den>", e.g. "5/1".
std::string format_time(const Time& t);

}  // namespace xpay
