#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "sr/ruler.hpp"
#include "sr/schedule.hpp"

using namespace sr;

TEST_CASE("ruler requires a < b", "[ruler]") {
    REQUIRE_THROWS_AS(Ruler(1.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(Ruler(2.0, 1.0), std::invalid_argument);
}

TEST_CASE("ruler samples lie in range with the uniform mean", "[ruler]") {
    Ruler theta(0.0, 2.0);
    RngStream g(99);
    const int n = 1000000;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = theta.sample(g);
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 2.0);
        total += v;
    }
    const double mean = total / n;
    const double se = theta.width() / std::sqrt(12.0 * n);
    REQUIRE(std::abs(mean - 1.0) < 3.0 * se);
}

TEST_CASE("degenerate-width ruler concentrates at a", "[ruler]") {
    const double eps = 1e-12;
    Ruler theta(1.0, 1.0 + eps);
    RngStream g(4);
    for (int i = 0; i < 1000; ++i) {
        const double v = theta.sample(g);
        REQUIRE(std::abs(v - 1.0) <= eps);
    }
}

TEST_CASE("ruler CDF fraction below a point matches the uniform law", "[ruler]") {
    // Pr(theta < 0.7) for theta(-0.5, 1.9) is 1.2 / 2.4 = 0.5.
    Ruler theta(-0.5, 1.9);
    RngStream g(21);
    const int n = 1000000;
    int below = 0;
    for (int i = 0; i < n; ++i)
        if (theta.sample(g) < 0.7) ++below;
    const double frac = static_cast<double>(below) / n;
    const double se = std::sqrt(0.25 / n);
    REQUIRE(std::abs(frac - 0.5) < 4.0 * se);
}

TEST_CASE("ruler coverage diagnostic counts outliers", "[ruler]") {
    Ruler theta(0.0, 1.0);
    std::vector<double> obs = {0.2, 0.9, 1.1, -0.3, 0.5};
    REQUIRE(theta.count_outside(obs) == 2);
}

TEST_CASE("constant schedule returns m everywhere", "[schedule]") {
    auto s = TestSchedule::constant(5);
    for (std::int64_t k : {0, 1, 10, 1000000}) REQUIRE(s.tests_at(k) == 5);
}

TEST_CASE("default schedule starts at one and grows without bound", "[schedule]") {
    auto s = TestSchedule::default_schedule();
    REQUIRE(s.tests_at(0) == 1);
    REQUIRE(s.tests_at(2) == 1);
    REQUIRE(s.tests_at(3) == 2);
    REQUIRE(s.tests_at(62) == 5);
    REQUIRE(s.tests_at(126) == 6);

    std::int64_t prev = 0;
    for (std::int64_t k = 0; k < 100000; ++k) {
        const auto m = s.tests_at(k);
        REQUIRE(m >= prev);
        prev = m;
    }
    // exceeds any bound for large enough k
    REQUIRE(s.tests_at((std::int64_t{1} << 40)) >= 40);
}

TEST_CASE("log schedule variants and linear schedule", "[schedule]") {
    auto slow = TestSchedule::log_growth(0, 3);
    REQUIRE(slow.tests_at(0) == 1);
    REQUIRE(slow.tests_at(6) == 1);
    REQUIRE(slow.tests_at(7) == 2);
    REQUIRE(slow.tests_at(62) == 2);
    REQUIRE(slow.tests_at(63) == 3);

    auto lin = TestSchedule::linear();
    REQUIRE(lin.tests_at(0) == 1);
    REQUIRE(lin.tests_at(1) == 1);
    REQUIRE(lin.tests_at(17) == 17);

    auto lin2 = TestSchedule::linear(2);
    REQUIRE(lin2.tests_at(10) == 5);
}

TEST_CASE("schedule parsing round-trips", "[schedule]") {
    for (const char* spec : {"constant:5", "log2:1:1", "log2:0:3", "linear:1", "linear:4"}) {
        auto s = TestSchedule::parse(spec);
        REQUIRE(s.describe() == spec);
    }
    REQUIRE(TestSchedule::parse("log2").describe() == "log2:1:1");
    REQUIRE_THROWS_AS(TestSchedule::parse("bogus"), std::invalid_argument);
    REQUIRE_THROWS_AS(TestSchedule::parse("constant:0"), std::invalid_argument);
}
