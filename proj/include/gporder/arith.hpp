#pragma once

// Integer arithmetic toolkit: primality, factoring, Jacobi symbols and
// multiplicative orders.  Everything downstream builds on this header.

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "gporder/errors.hpp"

namespace gporder::arith {

using Int = mpz_class;

// ---- basic modular helpers -------------------------------------------

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = m == 1 ? 0 : 1;
    a %= m;
    while (e > 0) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}

inline Int powmod(const Int& a, const Int& e, const Int& m) {
    Int r;
    mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    return r;
}

inline Int isqrt(const Int& n) {
    Int r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

inline std::uint64_t to_u64(const Int& n) { return mpz_get_ui(n.get_mpz_t()); }

// ---- primality --------------------------------------------------------

namespace detail {

// Strong probable prime test; n odd, n > 2, 1 < a < n - 1.
inline bool sprp_u64(std::uint64_t n, std::uint64_t a) {
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    std::uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mulmod_u64(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

inline bool sprp_mpz(const Int& n, const Int& a) {
    Int d = n - 1;
    unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
    d >>= s;
    Int x = powmod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (unsigned long i = 1; i < s; ++i) {
        x = (x * x) % n;
        if (x == n - 1) return true;
    }
    return false;
}

}  // namespace detail

// Deterministic for n < 2^64 via the 12-witness Miller-Rabin set; above
// that, 64 pseudo-random strong tests (error probability < 2^-128).
inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                            23ull, 29ull, 31ull, 37ull}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                            23ull, 29ull, 31ull, 37ull}) {
        if (!detail::sprp_u64(n, a)) return false;
    }
    return true;
}

inline bool is_prime(const Int& n) {
    if (n < 2) return false;
    if (mpz_fits_ulong_p(n.get_mpz_t()) && sizeof(unsigned long) == 8)
        return is_prime_u64(mpz_get_ui(n.get_mpz_t()));
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                            23ull, 29ull, 31ull, 37ull}) {
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return n == p;
    }
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    for (int round = 0; round < 64; ++round) {
        Int a = 2 + Int(rng()) % (n - 3);
        if (!detail::sprp_mpz(n, a)) return false;
    }
    return true;
}

inline bool is_prime(std::uint64_t n) { return is_prime_u64(n); }

// ---- factorization -----------------------------------------------------

// Prime factors in ascending order with multiplicities; value is their
// product (the factored integer).
struct Factorization {
    Int value;
    std::vector<std::pair<Int, unsigned>> factors;
};

inline constexpr std::uint64_t kDefaultFactorBudget = 50'000'000;

namespace detail {

// Brent-cycle Pollard rho on 64-bit values.  Returns a nontrivial factor
// of composite odd n, or 0 if the iteration budget ran out.
inline std::uint64_t rho_u64(std::uint64_t n, std::uint64_t& budget, std::uint64_t seed) {
    std::uint64_t c = seed;
    while (true) {
        c = c * 6364136223846793005ull + 1442695040888963407ull;
        std::uint64_t inc = c % (n - 1) + 1;
        std::uint64_t y = c % n, r = 1, q = 1, g = 1, x = 0, ys = 0;
        while (g == 1) {
            x = y;
            for (std::uint64_t i = 0; i < r; ++i) y = (mulmod_u64(y, y, n) + inc) % n;
            std::uint64_t k = 0;
            while (k < r && g == 1) {
                ys = y;
                std::uint64_t lim = std::min<std::uint64_t>(128, r - k);
                for (std::uint64_t i = 0; i < lim; ++i) {
                    y = (mulmod_u64(y, y, n) + inc) % n;
                    q = mulmod_u64(q, x > y ? x - y : y - x, n);
                }
                if (budget < lim) return 0;
                budget -= lim;
                g = std::gcd(q, n);
                k += lim;
            }
            r *= 2;
        }
        if (g == n) {
            g = 1;
            while (g == 1) {
                ys = (mulmod_u64(ys, ys, n) + inc) % n;
                if (budget == 0) return 0;
                --budget;
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            }
        }
        if (g != n) return g;
    }
}

// Same scheme over mpz for values above 64 bits.
inline Int rho_mpz(const Int& n, std::uint64_t& budget, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    while (true) {
        Int inc = 1 + Int(rng()) % (n - 1);
        Int y = Int(rng()) % n, q = 1, g = 1, x = 0, ys = 0;
        std::uint64_t r = 1;
        while (g == 1) {
            x = y;
            for (std::uint64_t i = 0; i < r; ++i) y = (y * y + inc) % n;
            std::uint64_t k = 0;
            while (k < r && g == 1) {
                ys = y;
                std::uint64_t lim = std::min<std::uint64_t>(128, r - k);
                for (std::uint64_t i = 0; i < lim; ++i) {
                    y = (y * y + inc) % n;
                    q = q * abs(x - y) % n;
                }
                if (budget < lim) return 0;
                budget -= lim;
                g = gcd(q, n);
                k += lim;
            }
            r *= 2;
        }
        if (g == n) {
            g = 1;
            while (g == 1) {
                ys = (ys * ys + inc) % n;
                if (budget == 0) return 0;
                --budget;
                g = gcd(abs(x - ys), n);
            }
        }
        if (g != n) return g;
    }
}

inline void factor_rec(const Int& n, std::vector<Int>& out, std::uint64_t& budget) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    Int d;
    if (mpz_fits_ulong_p(n.get_mpz_t()) && sizeof(unsigned long) == 8) {
        std::uint64_t f = rho_u64(mpz_get_ui(n.get_mpz_t()), budget, out.size() + 1);
        d = f == 0 ? Int(0) : Int(static_cast<unsigned long>(f));
    } else {
        d = rho_mpz(n, budget, out.size() + 1);
    }
    if (d == 0)
        throw FactorizationTimeout("factorize: iteration budget exhausted on composite " +
                                   n.get_str());
    factor_rec(d, out, budget);
    factor_rec(n / d, out, budget);
}

}  // namespace detail

inline Factorization factorize(const Int& n, std::uint64_t budget = kDefaultFactorBudget) {
    if (n < 1) throw Error("factorize: argument must be positive, got " + n.get_str());
    Factorization f;
    f.value = n;
    Int rem = n;
    std::vector<Int> primes;
    for (std::uint64_t p = 2; p < 100'000 && Int(p) * p <= rem; p += (p == 2 ? 1 : 2)) {
        while (mpz_divisible_ui_p(rem.get_mpz_t(), p)) {
            primes.push_back(Int(static_cast<unsigned long>(p)));
            rem /= p;
        }
    }
    if (rem > 1) detail::factor_rec(rem, primes, budget);
    std::sort(primes.begin(), primes.end());
    for (const Int& p : primes) {
        if (!f.factors.empty() && f.factors.back().first == p)
            ++f.factors.back().second;
        else
            f.factors.emplace_back(p, 1);
    }
    return f;
}

inline Factorization factorize(std::uint64_t n, std::uint64_t budget = kDefaultFactorBudget) {
    return factorize(Int(static_cast<unsigned long>(n)), budget);
}

// ---- Jacobi symbol ------------------------------------------------------

// jacobi(a, n) for odd positive n; 0 when gcd(a, n) > 1.
inline int jacobi(const Int& a, const Int& n) {
    if (n <= 0 || mpz_even_p(n.get_mpz_t()))
        throw Error("jacobi: modulus must be odd and positive, got " + n.get_str());
    return mpz_jacobi(a.get_mpz_t(), n.get_mpz_t());
}

inline int jacobi(std::int64_t a, std::int64_t n) { return jacobi(Int(a), Int(n)); }

// ---- generic power / order machinery ------------------------------------

// MSB-first square-and-multiply in any monoid.
template <class T, class Mul>
T power(const T& base, const Int& exp, const T& one, Mul mul) {
    if (exp < 0) throw Error("power: negative exponent");
    if (exp == 0) return one;
    std::size_t bits = mpz_sizeinbase(exp.get_mpz_t(), 2);
    T acc = base;
    for (std::size_t i = bits - 1; i-- > 0;) {
        acc = mul(acc, acc);
        if (mpz_tstbit(exp.get_mpz_t(), i)) acc = mul(acc, base);
    }
    return acc;
}

// Exact multiplicative order of a from a factored multiple of it.  For each
// prime l^k dividing the multiple, the l-part of the order is recovered by
// repeated l-th powering; a^multiple == one is a precondition.
template <class T, class Mul, class Eq>
Int order_from_multiple(const T& a, const Factorization& multiple, const T& one, Mul mul, Eq eq) {
    if (!eq(power(a, multiple.value, one, mul), one))
        throw NotAUnit("order_from_multiple: element order does not divide " +
                       multiple.value.get_str());
    Int order = 1;
    for (const auto& [l, k] : multiple.factors) {
        Int cofactor = multiple.value;
        for (unsigned i = 0; i < k; ++i) cofactor /= l;
        T t = power(a, cofactor, one, mul);
        while (!eq(t, one)) {
            t = power(t, l, one, mul);
            order *= l;
        }
    }
    return order;
}

// ---- orders mod n --------------------------------------------------------

// Multiplicative order of a mod n given a factored multiple of the order
// (typically the group order).
inline Int order_mod(const Int& a, const Int& n, const Factorization& group_order) {
    Int r = a % n;
    if (r < 0) r += n;
    if (gcd(r, n) != 1)
        throw NotAUnit("order_mod: " + a.get_str() + " is not a unit mod " + n.get_str());
    auto mul = [&n](const Int& x, const Int& y) { return Int(x * y % n); };
    auto eq = [](const Int& x, const Int& y) { return x == y; };
    Int one = Int(1) % n;
    return order_from_multiple(r, group_order, one, mul, eq);
}

// Does <-1, q> generate all of (Z/pZ)*?  True when ord_p(q) = p - 1, or
// when ord_p(q) = (p-1)/2 is odd (so -1 lies outside <q>).
inline bool generated_by_minus_one_and_q(const Int& q, const Int& p,
                                         std::uint64_t budget = kDefaultFactorBudget) {
    if (p < 3 || !is_prime(p))
        throw Error("generated_by_minus_one_and_q: p must be an odd prime, got " + p.get_str());
    if (q % p == 0) return p == 3;
    Int d = order_mod(q, p, factorize(Int(p - 1), budget));
    if (d == p - 1) return true;
    return mpz_odd_p(d.get_mpz_t()) && 2 * d == p - 1;
}

}  // namespace gporder::arith
