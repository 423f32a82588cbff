#include "xpay/rational.hpp"

#include <charconv>
#include <stdexcept>

namespace xpay {
namespace {

std::int64_t parse_int(std::string_view s, std::string_view whole) {
    std::int64_t v = 0;
    if (s.empty()) throw std::invalid_argument("malformed rational: '" + std::string(whole) + "'");
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::invalid_argument("malformed rational: '" + std::string(whole) + "'");
    return v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

}  // namespace

Time parse_time(std::string_view text) {
    const auto s = trim(text);
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        const auto num = parse_int(s.substr(0, slash), s);
        const auto den = parse_int(s.substr(slash + 1), s);
        if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(s) + "'");
        return Time(num, den);
    }
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        auto int_part = s.substr(0, dot);
        auto frac_part = s.substr(dot + 1);
        bool negative = !int_part.empty() && int_part.front() == '-';
        if (negative) int_part.remove_prefix(1);
        if (frac_part.size() > 15) throw std::invalid_argument("too many decimals in '" + std::string(s) + "'");
        std::int64_t den = 1;
        for (std::size_t i = 0; i < frac_part.size(); ++i) den *= 10;
        const auto whole = int_part.empty() ? 0 : parse_int(int_part, s);
        const auto frac = frac_part.empty() ? 0 : parse_int(frac_part, s);
        if (frac < 0) throw std::invalid_argument("malformed rational: '" + std::string(s) + "'");
        Time value = Time(whole) + Time(frac, den);
        return negative ? -value : value;
    }
    return Time(parse_int(s, s));
}

std::string format_time(const Time& t) {
    return std::to_string(t.numerator()) + "/" + std::to_string(t.denominator());
}

}  // namespace xpay
