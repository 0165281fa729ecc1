#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "gporder/heuristics.hpp"

using namespace gporder;

TEST_CASE("cohen_lenstra_3 values and monotonicity") {
    CHECK(heuristics::cohen_lenstra_3(2) == Catch::Approx(1.0 / 9.0).epsilon(1e-12));
    CHECK(heuristics::cohen_lenstra_3(40) == Catch::Approx(0.159811).margin(1e-6));
    double prev = 0.0;
    for (int k = 2; k <= 24; ++k) {
        double cur = heuristics::cohen_lenstra_3(k);
        REQUIRE(cur > prev);
        prev = cur;
    }
    CHECK(heuristics::cohen_lenstra_3(40) < 0.16);
    CHECK_THROWS_AS(heuristics::cohen_lenstra_3(1), Error);
}

TEST_CASE("combined_probability values") {
    CHECK(heuristics::combined_probability(0.0) == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(heuristics::combined_probability(1.0) == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(heuristics::combined_probability() == Catch::Approx(0.439874).margin(1e-6));
}

TEST_CASE("gv_expectation value, limits, and monotonicity") {
    double v = heuristics::gv_expectation(593, 0.66);
    CHECK(v == Catch::Approx(0.007).margin(0.002));
    CHECK(heuristics::gv_expectation(593, 0.0) == 0.0);
    double v1000 = heuristics::gv_expectation(1000, 0.66);
    double v5000 = heuristics::gv_expectation(5000, 0.66);
    CHECK(v > v1000);
    CHECK(v1000 > v5000);
    CHECK(v5000 > 0.0);
    CHECK_THROWS_AS(heuristics::gv_expectation(2, 0.66), Error);
}

TEST_CASE("quadrature is stable under depth doubling") {
    auto a = heuristics::gv_expectation_quadrature(593, 0.66, 12);
    auto b = heuristics::gv_expectation_quadrature(593, 0.66, 13);
    REQUIRE(a.value > 0.0);
    CHECK(std::abs(a.value - b.value) / a.value < 0.01);
    CHECK(a.outer_tail_bound < 1e-4);
    CHECK(a.inner_tail_bound < 1e-12);
    CHECK(b.outer_panels == 2 * a.outer_panels);
}

TEST_CASE("discrete Sophie Germain sum stays below the integral") {
    const std::uint32_t limit = 10'000'000;
    std::vector<bool> comp(limit + 1, false);
    for (std::uint32_t i = 2; static_cast<std::uint64_t>(i) * i <= limit; ++i)
        if (!comp[i])
            for (std::uint64_t j = static_cast<std::uint64_t>(i) * i; j <= limit; j += i)
                comp[j] = true;
    std::vector<std::uint32_t> primes;
    std::vector<double> prefix;  // prefix[k] = sum of 1/p^2 over the first k primes
    prefix.push_back(0.0);
    for (std::uint32_t i = 2; i <= limit; ++i)
        if (!comp[i]) {
            primes.push_back(i);
            prefix.push_back(prefix.back() + 1.0 / (static_cast<double>(i) * i));
        }
    double total = prefix.back();

    double sum = 0.0;
    for (std::uint32_t r = 593; r <= 100'000; ++r) {
        if (comp[r] || comp[2 * r + 1]) continue;  // need r and 2r+1 both prime
        auto it = std::upper_bound(primes.begin(), primes.end(), 2 * r);
        sum += total - prefix[static_cast<std::size_t>(it - primes.begin())];
    }
    double integral = heuristics::gv_expectation(593, heuristics::kTwinPrimeConstant);
    REQUIRE(sum > 0.0);
    REQUIRE(sum < integral);
}

TEST_CASE("heuristic_constants bundle") {
    auto hc = heuristics::heuristic_constants();
    CHECK(hc.twin_prime_C == Catch::Approx(0.66016181584686957).epsilon(1e-15));
    for (double v : {hc.twin_prime_C, hc.cohen_lenstra_3, hc.combined_prob, hc.gv_expectation}) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
    auto rounded = heuristics::heuristic_constants(64, 593.0, 0.66);
    CHECK(rounded.twin_prime_C == 0.66);
}
