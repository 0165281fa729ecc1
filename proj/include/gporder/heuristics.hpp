#pragma once

// Numerical constants behind the density predictions: the Cohen-Lenstra
// 3-divisibility probability, the combined unit/class-number probability, and
// the expected count of Sophie-Germain-driven exceptions expressed as a
// double integral, evaluated by composite Simpson quadrature after moving
// both unbounded domains to logarithmic variables.

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "gporder/errors.hpp"

namespace gporder::heuristics {

// Hardy-Littlewood twin prime constant, full double precision.
inline constexpr double kTwinPrimeConstant = 0.66016181584686957;

struct HeuristicConstants {
    double twin_prime_C = kTwinPrimeConstant;
    double cohen_lenstra_3 = 0.0;
    double combined_prob = 0.0;
    double gv_expectation = 0.0;
};

// 1 - prod_{k=2}^{k_max} (1 - 3^-k); the dropped tail is below 3^-k_max.
inline double cohen_lenstra_3(int k_max) {
    if (k_max < 2) throw Error("product needs at least the k = 2 factor");
    double prod = 1.0;
    double pw = 1.0 / 9.0;
    for (int k = 2; k <= k_max; ++k, pw /= 3.0) prod *= 1.0 - pw;
    return 1.0 - prod;
}

// 1 - (1 - 1/3) * (1 - p3): the chance that at least one of the two
// independent conditions (unit congruent to 1, 3 | class number) holds.
inline double combined_probability(double p3) { return 1.0 - (2.0 / 3.0) * (1.0 - p3); }

inline double combined_probability() { return combined_probability(cohen_lenstra_3(64)); }

namespace detail {

template <class F>
double simpson(F f, double a, double b, std::size_t panels) {
    double h = (b - a) / static_cast<double>(2 * panels);
    double acc = f(a) + f(b);
    for (std::size_t i = 1; i < 2 * panels; ++i)
        acc += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace detail

struct GvQuadrature {
    double value = 0.0;
    double outer_cutoff_log_r = 0.0;   // integration stops at r = e^this
    double outer_tail_bound = 0.0;     // analytic bound on the dropped outer tail
    double inner_tail_bound = 0.0;     // worst analytic bound on a dropped inner tail
    std::size_t outer_panels = 0;
    std::size_t inner_panels = 0;
};

// E = int_{r_min}^inf 2C/ln^2 r * ( int_{2r+1}^inf dl / (l^2 ln l) ) dr.
//
// Substituting l = e^v turns the inner integral into int e^-v / v dv from
// v0 = ln(2r+1); truncating at v0 + W drops less than e^-(v0+W)/(v0+W),
// which is the classical 1/(L ln L) bound at the cutoff L = e^(v0+W).
// Substituting r = e^u turns the outer integral into
// int 2C/u^2 * e^u * inner(u) du from u0 = ln r_min; since
// inner(u) < 1/(2 e^u u) the integrand is below C/u^3 and the tail beyond
// U is below C/(2U^2).
inline GvQuadrature gv_expectation_quadrature(double r_min, double C, int depth = 12) {
    if (r_min < 3) throw Error("lower endpoint must be at least 3");
    if (depth < 4 || depth > 24) throw Error("subdivision depth out of range");
    GvQuadrature out;
    const double W = 45.0;
    const double U = 60.0;
    const double u0 = std::log(r_min);
    out.outer_cutoff_log_r = U;
    out.outer_panels = std::size_t(1) << depth;
    out.inner_panels = std::size_t(1) << (depth - 2);
    out.outer_tail_bound = C / (2.0 * U * U);
    {
        double v0 = std::log(2.0 * r_min + 1.0);
        out.inner_tail_bound = std::exp(-(v0 + W)) / (v0 + W);
    }
    auto inner = [&](double u) {
        double v0 = std::log(2.0 * std::exp(u) + 1.0);
        return detail::simpson([](double v) { return std::exp(-v) / v; }, v0, v0 + W,
                               out.inner_panels);
    };
    out.value = detail::simpson(
        [&](double u) { return 2.0 * C / (u * u) * std::exp(u) * inner(u); }, u0, U,
        out.outer_panels);
    return out;
}

inline double gv_expectation(double r_min, double C) {
    return gv_expectation_quadrature(r_min, C).value;
}

inline HeuristicConstants heuristic_constants(int k_max = 64, double r_min = 593.0,
                                              double C = kTwinPrimeConstant) {
    HeuristicConstants hc;
    hc.twin_prime_C = C;
    hc.cohen_lenstra_3 = cohen_lenstra_3(k_max);
    hc.combined_prob = combined_probability(hc.cohen_lenstra_3);
    hc.gv_expectation = gv_expectation(r_min, C);
    return hc;
}

}  // namespace gporder::heuristics
