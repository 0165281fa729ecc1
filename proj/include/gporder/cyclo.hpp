#pragma once

// Arithmetic in R = F_q[x] / Phi_p(x), the quotient of the polynomial ring
// over the prime field F_q by the p-th cyclotomic polynomial, together with
// multiplicative order and index computations for elements of R.
//
// Elements are represented by coefficient vectors of length p-1 with entries
// reduced mod q (Phi_p has degree p-1).  Reduction uses x^p = 1 followed by
// x^(p-1) = -(1 + x + ... + x^(p-2)).
//
// Contexts require the subgroup generated by -1 and q to be all of (Z/pZ)^*;
// under that hypothesis the residue x + x^(p-1) (the period zeta + zeta^-1)
// generates a field of degree n = (p-1)/2 inside R, and multiplicative orders
// of its powers divide q^n - 1.

#include <cstdint>
#include <vector>

#include "gporder/arith.hpp"
#include "gporder/errors.hpp"

namespace gporder::cyclo {

using arith::Int;

struct CycloContext {
    std::uint64_t p = 0;  // odd prime, cyclotomic level
    std::uint64_t q = 0;  // prime coefficient modulus, q != p
    std::uint64_t n = 0;  // (p-1)/2, degree of the field generated by the period

    friend bool operator==(const CycloContext&, const CycloContext&) = default;
};

struct CycloElem {
    CycloContext ctx;
    std::vector<std::uint64_t> coeffs;  // length p-1, entries in [0, q)

    friend bool operator==(const CycloElem&, const CycloElem&) = default;
};

// Multiplicative group order of the field generated by the period: q^n - 1.
inline Int group_order(const CycloContext& ctx) {
    Int g;
    mpz_ui_pow_ui(g.get_mpz_t(), ctx.q, ctx.n);
    return Int(g - 1);
}

inline CycloContext make_context(std::uint64_t p, std::uint64_t q) {
    if (p < 3 || !arith::is_prime_u64(p)) throw Error("cyclotomic level must be an odd prime");
    if (!arith::is_prime_u64(q)) throw Error("coefficient modulus must be prime");
    if (q % p == 0) throw HypothesisViolated("coefficient modulus must not equal the cyclotomic level");
    if (!arith::generated_by_minus_one_and_q(q, p))
        throw HypothesisViolated("-1 and q must generate the full unit group mod p");
    // Convolution coefficients are sums of at most p-1 products < q^2, plus a
    // wrap-around fold that can double them; keep everything inside uint64.
    unsigned __int128 worst = (unsigned __int128)2 * p * q * q;
    if (worst >> 64) throw Error("p * q^2 too large for the convolution accumulator");
    CycloContext ctx{p, q, (p - 1) / 2};
    // The period is fixed by the n-th power of the Frobenius exactly when
    // q^n = +-1 mod p; this follows from the hypothesis, but assert it anyway.
    std::uint64_t s = arith::powmod_u64(q % p, ctx.n, p);
    if (s != 1 && s != p - 1) throw Error("internal: q^n is not +-1 mod p");
    return ctx;
}

namespace detail {

// Reduce a raw convolution (length <= 2p-3, unreduced sums) to the canonical
// length p-1 representation.  Safe while entries stay below 2^63.
inline std::vector<std::uint64_t> canonicalize(const CycloContext& ctx,
                                               std::vector<std::uint64_t> raw) {
    const std::uint64_t p = ctx.p, q = ctx.q;
    raw.resize(std::max<std::size_t>(raw.size(), p), 0);
    // x^k = x^(k-p) for k >= p
    for (std::size_t k = raw.size(); k-- > p;) {
        raw[k - p] += raw[k];
        raw[k] = 0;
    }
    // x^(p-1) = -(1 + x + ... + x^(p-2))
    std::uint64_t top = raw[p - 1] % q;
    std::vector<std::uint64_t> out(p - 1);
    for (std::size_t i = 0; i < p - 1; ++i) out[i] = (raw[i] + q - top) % q;
    return out;
}

}  // namespace detail

// Build an element from arbitrary coefficients (any length, any values);
// coefficient i multiplies x^i and indices are folded mod x^p = 1.
inline CycloElem cyclo_element(const CycloContext& ctx, const std::vector<std::uint64_t>& coeffs) {
    std::vector<std::uint64_t> raw(ctx.p, 0);
    for (std::size_t i = 0; i < coeffs.size(); ++i) raw[i % ctx.p] += coeffs[i] % ctx.q;
    return CycloElem{ctx, detail::canonicalize(ctx, std::move(raw))};
}

inline CycloElem cyclo_zero(const CycloContext& ctx) {
    return CycloElem{ctx, std::vector<std::uint64_t>(ctx.p - 1, 0)};
}

inline CycloElem cyclo_one(const CycloContext& ctx) {
    std::vector<std::uint64_t> c(ctx.p - 1, 0);
    c[0] = 1 % ctx.q;
    return CycloElem{ctx, c};
}

inline bool is_zero(const CycloElem& e) {
    for (std::uint64_t c : e.coeffs)
        if (c) return false;
    return true;
}

// The period zeta + zeta^-1, i.e. x + x^(p-1) reduced:
// x^(p-1) = -(1 + ... + x^(p-2)), so all coefficients are -1 except index 1.
inline CycloElem gauss_period(const CycloContext& ctx) {
    std::vector<std::uint64_t> c(ctx.p - 1, ctx.q - 1);
    c[1] = 0;  // -1 + 1 from the x term
    return CycloElem{ctx, c};
}

inline CycloElem cyclo_mul(const CycloElem& u, const CycloElem& v) {
    if (!(u.ctx == v.ctx)) throw ContextMismatch("cyclotomic elements from different contexts");
    const std::size_t d = u.ctx.p - 1;
    std::vector<std::uint64_t> conv(2 * d - 1, 0);
    for (std::size_t i = 0; i < d; ++i) {
        const std::uint64_t ui = u.coeffs[i];
        if (!ui) continue;
        const std::uint64_t* vv = v.coeffs.data();
        std::uint64_t* out = conv.data() + i;
        for (std::size_t j = 0; j < d; ++j) out[j] += ui * vv[j];
    }
    return CycloElem{u.ctx, detail::canonicalize(u.ctx, std::move(conv))};
}

inline CycloElem cyclo_pow(const CycloElem& base, const Int& exp) {
    return arith::power(base, exp, cyclo_one(base.ctx),
                        [](const CycloElem& a, const CycloElem& b) { return cyclo_mul(a, b); });
}

// k-th power of the Frobenius endomorphism: x -> x^(q^k), a coefficient
// permutation (plus refold) costing O(p) instead of a full exponentiation.
inline CycloElem frobenius(const CycloElem& e, std::uint64_t k = 1) {
    const std::uint64_t p = e.ctx.p;
    std::uint64_t t = arith::powmod_u64(e.ctx.q % p, k, p);
    std::vector<std::uint64_t> raw(p, 0);
    for (std::uint64_t i = 0; i + 1 < p; ++i)
        raw[static_cast<std::uint64_t>(static_cast<unsigned __int128>(i) * t % p)] += e.coeffs[i];
    return CycloElem{e.ctx, detail::canonicalize(e.ctx, std::move(raw))};
}

// Exact multiplicative order; requires factoring q^n - 1, so only feasible
// when that number is small or smooth.  Throws FactorizationTimeout when the
// budget runs out and NotAUnit when the element is not invertible.
inline Int full_order(const CycloElem& e, std::uint64_t budget = arith::kDefaultFactorBudget) {
    if (is_zero(e)) throw ZeroElement("order of the zero element");
    Int g = group_order(e.ctx);
    arith::Factorization f = arith::factorize(g, budget);
    return arith::order_from_multiple(
        e, f, cyclo_one(e.ctx), [](const CycloElem& a, const CycloElem& b) { return cyclo_mul(a, b); },
        [](const CycloElem& a, const CycloElem& b) { return a == b; });
}

// Index of e in the multiplicative group: (q^n - 1) / ord(e).
inline Int full_index(const CycloElem& e, std::uint64_t budget = arith::kDefaultFactorBudget) {
    return Int(group_order(e.ctx) / full_order(e, budget));
}

// gcd(index of e, m) for a divisor m of q^n - 1, computed without factoring
// q^n - 1: raise e to (q^n - 1)/m, take the order d of the result inside the
// cyclic group of size m (only m needs factoring), and return m/d.
inline Int index_gcd(const CycloElem& e, const Int& m,
                     std::uint64_t budget = arith::kDefaultFactorBudget) {
    if (is_zero(e)) throw ZeroElement("index of the zero element");
    if (m <= 0) throw NotADivisor("modulus for index_gcd must be positive");
    Int g = group_order(e.ctx);
    if (g % m != 0) throw NotADivisor("m must divide q^n - 1");
    arith::Factorization fm = arith::factorize(m, budget);
    CycloElem b = cyclo_pow(e, Int(g / m));
    Int d = arith::order_from_multiple(
        b, fm, cyclo_one(e.ctx), [](const CycloElem& a, const CycloElem& c) { return cyclo_mul(a, c); },
        [](const CycloElem& a, const CycloElem& c) { return a == c; });
    return Int(m / d);
}

// Left-hand side of the main comparison: gcd(ind(period), q^2 - 1) computed
// entirely inside R, independent of any quadratic-field machinery.  When n is
// even the exponent (q^n - 1)/(q^2 - 1) is the geometric series over q^2, so
// the power of the period is a product of n/2 Frobenius twists; this replaces
// thousands of ring multiplications by n/2 of them.
inline Int lhs_theorem(std::uint64_t p, std::uint64_t q,
                       std::uint64_t budget = arith::kDefaultFactorBudget) {
    CycloContext ctx = make_context(p, q);
    Int m = Int(static_cast<unsigned long>(q)) * Int(static_cast<unsigned long>(q)) - 1;
    CycloElem alpha = gauss_period(ctx);
    if (ctx.n % 2 != 0) return index_gcd(alpha, m, budget);
    CycloElem acc = alpha;
    CycloElem cur = alpha;
    for (std::uint64_t j = 1; j < ctx.n / 2; ++j) {
        cur = frobenius(cur, 2);
        acc = cyclo_mul(acc, cur);
    }
    Int d = arith::order_from_multiple(
        acc, arith::factorize(m, budget), cyclo_one(ctx),
        [](const CycloElem& a, const CycloElem& b) { return cyclo_mul(a, b); },
        [](const CycloElem& a, const CycloElem& b) { return a == b; });
    return Int(m / d);
}

}  // namespace gporder::cyclo
