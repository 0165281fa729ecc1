#pragma once

// The Ducci map on Z^p (cyclic absolute differences), eventual-period
// detection, and the equivalence checks tying Ducci periods to the index of
// x+1 in F_2[x]/Phi_p, the index of the period element, and the fundamental
// unit mod 2.
//
// Every integer orbit collapses to vectors with entries in {0, c}; from then
// on the dynamics are F_2-linear (w -> w XOR rot(w)), so we iterate integers
// until the collapse, bit-pack, and find the exact cycle length with Brent's
// algorithm (constant memory), followed by the standard walk for the exact
// transient length.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gporder/arith.hpp"
#include "gporder/cyclo.hpp"
#include "gporder/errors.hpp"
#include "gporder/quadratic.hpp"

namespace gporder::ducci {

using arith::Int;

struct DucciState {
    std::vector<std::uint64_t> entries;
};

inline DucciState ducci_step(const DucciState& v) {
    const std::size_t p = v.entries.size();
    DucciState out;
    out.entries.resize(p);
    for (std::size_t i = 0; i < p; ++i) {
        std::uint64_t a = v.entries[i], b = v.entries[(i + 1) % p];
        out.entries[i] = a > b ? a - b : b - a;
    }
    return out;
}

namespace detail {

// p-bit state packed little-endian into 64-bit words; bits >= p stay zero.
struct Packed {
    std::uint64_t p = 0;
    std::vector<std::uint64_t> w;

    friend bool operator==(const Packed&, const Packed&) = default;
};

inline Packed pack(const DucciState& v) {
    Packed out;
    out.p = v.entries.size();
    out.w.assign((out.p + 63) / 64, 0);
    for (std::size_t i = 0; i < out.p; ++i)
        if (v.entries[i]) out.w[i / 64] |= std::uint64_t(1) << (i % 64);
    return out;
}

// One linear step: bit i becomes bit i XOR bit (i+1 mod p).
inline void step(Packed& s) {
    const std::size_t W = s.w.size();
    std::uint64_t bit0 = s.w[0] & 1;
    std::uint64_t carry = bit0 << ((s.p - 1) % 64);
    for (std::size_t k = 0; k < W; ++k) {
        std::uint64_t shifted = s.w[k] >> 1;
        if (k + 1 < W) shifted |= s.w[k + 1] << 63;
        if (k == W - 1) shifted |= carry;
        s.w[k] ^= shifted;
    }
}

// True when all nonzero entries share one common value (includes all-zero).
inline bool collapsed(const DucciState& v) {
    std::uint64_t c = 0;
    for (std::uint64_t x : v.entries) {
        if (!x) continue;
        if (!c)
            c = x;
        else if (x != c)
            return false;
    }
    return true;
}

}  // namespace detail

struct OrbitInfo {
    std::uint64_t transient = 0;  // least T with the orbit periodic from step T
    std::uint64_t period = 0;     // exact eventual period
};

// Reasonable budget for one orbit: integer collapse is empirically short and
// the binary cycle length divides p * (2^((p-1)/2) - 1); Brent's walk plus the
// transient walk fit in a small multiple of that.
inline std::uint64_t default_step_cap(std::uint64_t p) {
    std::uint64_t n = (p - 1) / 2;
    if (n >= 58) return ~std::uint64_t(0);
    return 4 * p * (std::uint64_t(1) << n);
}

inline OrbitInfo orbit_info(const DucciState& v, std::uint64_t max_steps) {
    const std::uint64_t p = v.entries.size();
    if (p < 3 || !arith::is_prime_u64(p)) throw Error("state length must be an odd prime");
    std::uint64_t used = 0;
    auto spend = [&](std::uint64_t k) {
        used += k;
        if (used > max_steps) throw BudgetExhausted("step budget exhausted in orbit search");
    };

    DucciState cur = v;
    std::uint64_t t_int = 0;
    while (!detail::collapsed(cur)) {
        cur = ducci_step(cur);
        ++t_int;
        spend(1);
    }

    detail::Packed x0 = detail::pack(cur);
    // Brent: find the cycle length lambda of the tail starting at x0.
    std::uint64_t power = 1, lambda = 1;
    detail::Packed tortoise = x0;
    detail::Packed hare = x0;
    detail::step(hare);
    spend(1);
    while (!(tortoise == hare)) {
        if (power == lambda) {
            tortoise = hare;
            power *= 2;
            lambda = 0;
        }
        detail::step(hare);
        spend(1);
        ++lambda;
    }
    // Exact transient: advance one pointer lambda steps, then walk together.
    detail::Packed a = x0, b = x0;
    for (std::uint64_t i = 0; i < lambda; ++i) {
        detail::step(b);
        spend(1);
    }
    std::uint64_t mu = 0;
    while (!(a == b)) {
        detail::step(a);
        detail::step(b);
        spend(2);
        ++mu;
    }
    return OrbitInfo{t_int + mu, lambda};
}

inline std::uint64_t eventual_period(const DucciState& v, std::uint64_t max_steps) {
    return orbit_info(v, max_steps).period;
}

// ord(x+1) in F_2[x]/Phi_p = p * ord(period element); requires 2 to be a
// primitive root mod p and a factorization of 2^((p-1)/2) - 1.
inline Int algebraic_period(std::uint64_t p, std::uint64_t budget = arith::kDefaultFactorBudget) {
    if (!arith::is_prime_u64(p) || p < 3) throw Error("length must be an odd prime");
    Int pm1 = static_cast<unsigned long>(p - 1);
    if (arith::order_mod(2, static_cast<unsigned long>(p), arith::factorize(pm1)) != pm1)
        throw HypothesisViolated("2 must be a primitive root mod p");
    auto ctx = cyclo::make_context(p, 2);
    return Int(static_cast<unsigned long>(p) * cyclo::full_order(cyclo::gauss_period(ctx), budget));
}

struct SamplePolicy {
    bool exhaustive = false;   // enumerate all of {0,1}^p
    std::uint64_t samples = 0; // number of random integer starts otherwise (0 = skip)
    std::uint64_t seed = 0;
};

inline SamplePolicy default_policy(std::uint64_t p) {
    if (p <= 13) return {true, 0, 0};
    return {false, 1000, 20240513};
}

struct OrbitRow {
    std::string start_encoding;
    std::uint64_t transient = 0;
    std::uint64_t period = 0;
};

struct CorollaryReport {
    std::uint64_t p = 0;
    bool ind_two_element_div3 = false;  // 3 | ind(x+1) in the full residue field
    bool ind_period_div3 = false;       // 3 | ind(period element)
    bool unit_condition = false;        // unit = 1 mod 2 or 3 | class number
    bool equivalences_hold = false;     // the three booleans above coincide
    bool ducci_checked = false;
    bool periods_divide = false;        // all tested periods divide `bound`
    Int bound;                          // p * (2^((p-1)/2) - 1) / 3
    std::uint64_t starts_tested = 0;
    bool exhaustive = false;
    std::optional<std::vector<std::uint64_t>> witness;  // start with period not dividing bound
    bool ok = false;
};

inline CorollaryReport verify_corollary(std::uint64_t p, const SamplePolicy& policy,
                                        std::vector<OrbitRow>* rows = nullptr) {
    if (!arith::is_prime_u64(p) || p % 8 != 5)
        throw HypothesisViolated("corollary requires a prime p = 5 mod 8");
    Int pm1 = static_cast<unsigned long>(p - 1);
    if (arith::order_mod(2, static_cast<unsigned long>(p), arith::factorize(pm1)) != pm1)
        throw HypothesisViolated("2 must be a primitive root mod p");

    CorollaryReport rep;
    rep.p = p;
    auto ctx = cyclo::make_context(p, 2);
    auto one = cyclo::cyclo_one(ctx);

    // (1): 3 | ind(x+1) within the full multiplicative group of size 2^(p-1)-1,
    // equivalent to (x+1)^((2^(p-1)-1)/3) = 1.
    Int full_group;
    mpz_ui_pow_ui(full_group.get_mpz_t(), 2, p - 1);
    full_group -= 1;
    auto two_elem = cyclo::cyclo_element(ctx, {1, 1});
    rep.ind_two_element_div3 = cyclo::cyclo_pow(two_elem, Int(full_group / 3)) == one;

    // (2): 3 | ind(period element) within the group of size 2^((p-1)/2)-1.
    rep.ind_period_div3 = cyclo::index_gcd(cyclo::gauss_period(ctx), 3) == 3;

    // (4): fundamental unit = 1 mod 2, or 3 divides the class number.
    auto ring = quadratic::quad_ring(2, p % 8);
    bool unit_is_one = quadratic::unit_mod_q(static_cast<unsigned long>(p), 2) ==
                       quadratic::quad_one(ring);
    Int h = quadratic::class_number_real(static_cast<unsigned long>(p));
    rep.unit_condition = unit_is_one || h % 3 == 0;

    rep.equivalences_hold = rep.ind_two_element_div3 == rep.ind_period_div3 &&
                            rep.ind_period_div3 == rep.unit_condition;

    Int sub_group;
    mpz_ui_pow_ui(sub_group.get_mpz_t(), 2, (p - 1) / 2);
    sub_group -= 1;
    rep.bound = Int(static_cast<unsigned long>(p) * sub_group / 3);

    std::uint64_t cap = default_step_cap(p);
    auto consider = [&](const DucciState& start, const std::string& enc) {
        OrbitInfo info = orbit_info(start, cap);
        if (rows) rows->push_back({enc, info.transient, info.period});
        ++rep.starts_tested;
        if (rep.bound % static_cast<unsigned long>(info.period) != 0 && !rep.witness)
            rep.witness = start.entries;
    };

    if (policy.exhaustive) {
        rep.ducci_checked = true;
        rep.exhaustive = true;
        for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << p); ++mask) {
            DucciState s;
            s.entries.resize(p);
            for (std::uint64_t i = 0; i < p; ++i) s.entries[i] = (mask >> i) & 1;
            consider(s, std::to_string(mask));
        }
    } else if (policy.samples > 0) {
        rep.ducci_checked = true;
        std::mt19937_64 rng(policy.seed);
        for (std::uint64_t k = 0; k < policy.samples; ++k) {
            DucciState s;
            s.entries.resize(p);
            std::string enc;
            for (std::uint64_t i = 0; i < p; ++i) {
                s.entries[i] = rng() & 0xFFFF;
                if (i) enc += ';';
                enc += std::to_string(s.entries[i]);
            }
            consider(s, enc);
        }
    }

    rep.periods_divide = rep.ducci_checked && !rep.witness;
    bool common = rep.ind_period_div3;
    rep.ok = rep.equivalences_hold &&
             (!rep.ducci_checked || (common ? rep.periods_divide : rep.witness.has_value()));
    return rep;
}

inline CorollaryReport verify_corollary(std::uint64_t p) {
    return verify_corollary(p, default_policy(p));
}

}  // namespace gporder::ducci
