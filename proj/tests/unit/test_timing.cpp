#include "xpay/errors.hpp"
#include "xpay/timing.hpp"
#include "xpay/trace.hpp"

#include <doctest.h>

using namespace xpay;

namespace {

/// Hop budgets summed directly: the last hop needs 2Δ + π, every hop
/// further upstream 4Δ + 4π more, all stretched by (1+ρ) per level.
Time oracle_a(std::uint32_t n, std::uint32_t i, Time delta, Time pi, Time rho, Time mu) {
    Time a = (1 + rho) * (2 * delta + pi) + mu;
    for (std::uint32_t k = n - 1; k > i; --k) a = (1 + rho) * ((1 + rho) * a + 4 * delta + 4 * pi) + mu;
    return a;
}

}  // namespace

TEST_CASE("derived windows at one hop") {
    const auto p = derive_timeouts(1, Time(1), Time(1, 10), Time(0), std::nullopt, Time(0));
    CHECK(p.a[0] == Time(21, 10));
    CHECK(p.d[0] == Time(23, 10));
    CHECK(p.epsilon == Time(1, 10));
    CHECK(termination_bound(p) == Time(54, 10));
}

TEST_CASE("derived windows at two hops") {
    const auto p = derive_timeouts(2, Time(1), Time(1, 10), Time(0), std::nullopt, Time(0));
    CHECK(p.a[1] == Time(21, 10));
    CHECK(p.a[0] == Time(65, 10));
    CHECK(p.d[0] == Time(67, 10));
    CHECK(termination_bound(p) == Time(98, 10));
}

TEST_CASE("derived windows match the summed budgets") {
    for (std::uint32_t n = 1; n <= 5; ++n)
        for (const Time rho : {Time(0), Time(1, 10), Time(1, 2)})
            for (const Time mu : {Time(0), Time(1, 7)}) {
                const auto p = derive_timeouts(n, Time(3, 2), Time(1, 5), rho, std::nullopt, mu);
                for (std::uint32_t i = 0; i < n; ++i) {
                    CHECK(p.a[i] == oracle_a(n, i, Time(3, 2), Time(1, 5), rho, mu));
                    CHECK(p.d[i] == p.a[i] + 2 * (1 + rho) * Time(1, 5) + mu);
                    if (i + 1 < n) CHECK(p.a[i] > p.a[i + 1]);
                }
                CHECK(p.epsilon == (1 + rho) * Time(1, 5));
                CHECK_NOTHROW(p.validate());
            }
    const auto explicit_eps = derive_timeouts(1, Time(1), Time(0), Time(0), Time(1, 3), Time(0));
    CHECK(explicit_eps.epsilon == Time(1, 3));
    CHECK_THROWS_AS(derive_timeouts(0, Time(1), Time(0), Time(0), std::nullopt, Time(0)), ConfigError);
    CHECK_THROWS_AS(derive_timeouts(1, Time(0), Time(0), Time(0), std::nullopt, Time(0)), ConfigError);
    CHECK_THROWS_AS(derive_timeouts(1, Time(1), Time(-1), Time(0), std::nullopt, Time(0)), ConfigError);
}

TEST_CASE("derived windows survive the worst case and are tight") {
    for (std::uint32_t n = 1; n <= 2; ++n) {
        const auto p = derive_timeouts(n, Time(1), Time(1, 10), Time(0), std::nullopt, Time(0));
        const auto r = validate_timeouts(p, Time(1, 10));
        CHECK(r.passed);
        CHECK(r.success_holds);
        CHECK(r.promises_hold);
        CHECK(r.termination_holds);
        CHECK(r.tight());
        CHECK(r.tightness.size() == n);
        CHECK_NOTHROW(require_valid(r));
    }
}

TEST_CASE("drift-blind windows fail under drift") {
    auto p = derive_timeouts(1, Time(1), Time(1, 10), Time(1, 10), std::nullopt, Time(0));
    p.a = {Time(21, 10)};
    const auto r = validate_timeouts(p, Time(1, 10));
    CHECK_FALSE(r.passed);
    REQUIRE(r.counterexample);
    CHECK_FALSE(r.counterexample->entries.empty());
    CHECK_FALSE(r.first_failure.empty());
    CHECK_THROWS_AS(require_valid(r), ValidationFailed);
}
