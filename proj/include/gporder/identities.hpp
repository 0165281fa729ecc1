#pragma once

// Exact integer verification of the norm identities linking products of
// cyclotomic units to powers of the fundamental unit of Q(sqrt(p)).
//
// sqrt(p) is modelled inside Z[x]/Phi_p(x) by the quadratic Gauss sum
// G(x) = sum_k (k|p) x^k, which satisfies G^2 = p exactly.  All checks are
// pure integer polynomial identities; no floating point is involved beyond
// obtaining the class number h_p (which the identities then certify).

#include <cstdint>
#include <vector>

#include "gporder/arith.hpp"
#include "gporder/errors.hpp"
#include "gporder/quadratic.hpp"

namespace gporder::identities {

using arith::Int;

// A residue class in Z[x]/Phi_p(x), stored as the unique representative of
// degree < p-1.  Reduction applies x^p = 1, then x^(p-1) = -(1+...+x^(p-2)).
struct IntCycloPoly {
    std::uint64_t p = 0;
    std::vector<Int> coeffs;  // length p-1

    friend bool operator==(const IntCycloPoly&, const IntCycloPoly&) = default;
};

namespace detail {

inline IntCycloPoly canonicalize(std::uint64_t p, std::vector<Int> raw) {
    raw.resize(std::max<std::size_t>(raw.size(), p));
    for (std::size_t k = raw.size(); k-- > p;) {
        raw[k - p] += raw[k];
        raw[k] = 0;
    }
    Int top = raw[p - 1];
    std::vector<Int> out(p - 1);
    for (std::size_t i = 0; i + 1 < p; ++i) out[i] = raw[i] - top;
    return IntCycloPoly{p, std::move(out)};
}

}  // namespace detail

inline IntCycloPoly poly_zero(std::uint64_t p) {
    return IntCycloPoly{p, std::vector<Int>(p - 1)};
}

inline IntCycloPoly poly_constant(std::uint64_t p, const Int& c) {
    IntCycloPoly out = poly_zero(p);
    out.coeffs[0] = c;
    return out;
}

// x^k with k interpreted mod p.
inline IntCycloPoly poly_monomial(std::uint64_t p, std::uint64_t k) {
    std::vector<Int> raw(p);
    raw[k % p] = 1;
    return detail::canonicalize(p, std::move(raw));
}

inline IntCycloPoly poly_add(const IntCycloPoly& a, const IntCycloPoly& b) {
    if (a.p != b.p) throw ContextMismatch("polynomials over different cyclotomic levels");
    IntCycloPoly out = a;
    for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] += b.coeffs[i];
    return out;
}

inline IntCycloPoly poly_sub(const IntCycloPoly& a, const IntCycloPoly& b) {
    if (a.p != b.p) throw ContextMismatch("polynomials over different cyclotomic levels");
    IntCycloPoly out = a;
    for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] -= b.coeffs[i];
    return out;
}

inline IntCycloPoly poly_scale(const IntCycloPoly& a, const Int& c) {
    IntCycloPoly out = a;
    for (auto& x : out.coeffs) x *= c;
    return out;
}

inline IntCycloPoly poly_mul(const IntCycloPoly& a, const IntCycloPoly& b) {
    if (a.p != b.p) throw ContextMismatch("polynomials over different cyclotomic levels");
    const std::size_t d = a.p - 1;
    std::vector<Int> conv(2 * d - 1);
    for (std::size_t i = 0; i < d; ++i) {
        if (a.coeffs[i] == 0) continue;
        for (std::size_t j = 0; j < d; ++j) {
            if (b.coeffs[j] == 0) continue;
            conv[i + j] += a.coeffs[i] * b.coeffs[j];
        }
    }
    return detail::canonicalize(a.p, std::move(conv));
}

// Quadratic Gauss sum G(x) = sum_{k=1}^{p-1} (k|p) x^k for p = 1 mod 4;
// satisfies G^2 = p in Z[x]/Phi_p (checked at construction).
inline IntCycloPoly gauss_sum_poly(std::uint64_t p) {
    if (p % 4 != 1 || !arith::is_prime_u64(p)) throw Error("level must be a prime = 1 mod 4");
    std::vector<Int> raw(p);
    for (std::uint64_t k = 1; k < p; ++k)
        raw[k] = arith::jacobi(static_cast<std::int64_t>(k), static_cast<std::int64_t>(p));
    IntCycloPoly g = detail::canonicalize(p, std::move(raw));
    if (poly_mul(g, g) != poly_constant(p, static_cast<unsigned long>(p)))
        throw Error("internal: Gauss sum square is not p");
    return g;
}

// Outcome of an identity check.  `sign` records which square root of p made
// the identity hold: +1 for G, -1 for -G, 0 if the check never involved G or
// failed for both signs.
struct VerifyResult {
    bool ok = false;
    int sign = 0;

    explicit operator bool() const { return ok; }
};

namespace detail {

// (u + v*G)/1 with sign s applied to G.
inline IntCycloPoly combine(const IntCycloPoly& g, const Int& u, const Int& v, int s) {
    return poly_add(poly_constant(g.p, u), poly_scale(g, s == -1 ? Int(-v) : v));
}

inline VerifyResult check_with_sign(const IntCycloPoly& lhs, const IntCycloPoly& g, const Int& u,
                                    const Int& v) {
    if (lhs == combine(g, u, v, +1)) return {true, +1};
    if (lhs == combine(g, u, v, -1)) return {true, -1};
    return {false, 0};
}

}  // namespace detail

// First norm identity: with eps^(2h) = (u + v sqrt(p))/2,
//   2 * prod_{k=1}^{(p-1)/2} (x^(k^2) + 1)  =  u + v G     (p = 5 mod 8)
//   prod_{k=1}^{(p-1)/2} (x^(k^2) + 1)      =  1           (p = 1 mod 8)
inline VerifyResult verify_norm_identity_one(std::uint64_t p) {
    IntCycloPoly g = gauss_sum_poly(p);
    IntCycloPoly prod = poly_constant(p, 1);
    for (std::uint64_t k = 1; k <= (p - 1) / 2; ++k) {
        std::uint64_t e = arith::mulmod_u64(k % p, k % p, p);
        prod = poly_mul(prod, poly_add(poly_monomial(p, e), poly_constant(p, 1)));
    }
    Int h = quadratic::class_number_real(static_cast<unsigned long>(p));
    auto eps = quadratic::fundamental_unit(static_cast<unsigned long>(p));
    auto pw = quadratic::unit_power(eps, Int(2 * h));
    if ((pw.a - pw.b) % 2 != 0) throw Error("internal: unit power is not a half-integer pair");
    if (p % 8 == 1) return {prod == poly_constant(p, 1), 0};
    return detail::check_with_sign(poly_scale(prod, 2), g, pw.a, pw.b);
}

// Second norm identity: with eps^h = (s + t sqrt(p))/2 and m the count of
// residues in ((p-1)/4, (p-1)/2] that are squares mod p,
//   2 * prod_{r square, 0<r<=(p-1)/2} (x^r + x^(p-r))  =  (-1)^m (-s + t G)   (p = 5 mod 8)
//   prod_{r square, 0<r<=(p-1)/2} (x^r + x^(p-r))      =  (-1)^m             (p = 1 mod 8)
// The norm on the left equals (-1)^m eps^(-h): the conjugate unit power, with
// coefficient pair (-s, t).
inline VerifyResult verify_norm_identity_two(std::uint64_t p) {
    IntCycloPoly g = gauss_sum_poly(p);
    IntCycloPoly prod = poly_constant(p, 1);
    for (std::uint64_t r = 1; r <= (p - 1) / 2; ++r) {
        if (arith::jacobi(static_cast<std::int64_t>(r), static_cast<std::int64_t>(p)) != 1) continue;
        prod = poly_mul(prod, poly_add(poly_monomial(p, r), poly_monomial(p, p - r)));
    }
    Int h = quadratic::class_number_real(static_cast<unsigned long>(p));
    auto eps = quadratic::fundamental_unit(static_cast<unsigned long>(p));
    auto pw = quadratic::unit_power(eps, h);
    if ((pw.a - pw.b) % 2 != 0) throw Error("internal: unit power is not a half-integer pair");
    Int m = quadratic::class_number_imag(static_cast<unsigned long>(p)).m_count;
    int parity = mpz_odd_p(m.get_mpz_t()) ? -1 : 1;
    if (p % 8 == 1) return {prod == poly_constant(p, parity), 0};
    Int s = parity * Int(-pw.a);
    Int t = parity * pw.b;
    return detail::check_with_sign(poly_scale(prod, 2), g, s, t);
}

// Product identity for prod_{k=1}^{(p-1)/2} (1 - x^(a k^2)):
// the product equals sqrt(p) * eps^(-(a|p) h).  With eps^h = (s + t sqrt(p))/2:
//   (a|p) = +1:  prod * (s + t G) = 2 G
//   (a|p) = -1:  2 * prod         = s G + t p
inline VerifyResult verify_sun_identity(std::uint64_t p, std::int64_t a) {
    if (p % 4 != 1 || !arith::is_prime_u64(p)) throw Error("level must be a prime = 1 mod 4");
    std::int64_t amod = a % static_cast<std::int64_t>(p);
    if (amod < 0) amod += static_cast<std::int64_t>(p);
    if (amod == 0) throw Error("twist must be coprime to the level");
    IntCycloPoly g = gauss_sum_poly(p);
    IntCycloPoly prod = poly_constant(p, 1);
    for (std::uint64_t k = 1; k <= (p - 1) / 2; ++k) {
        std::uint64_t e = arith::mulmod_u64(static_cast<std::uint64_t>(amod),
                                            arith::mulmod_u64(k, k, p), p);
        prod = poly_mul(prod, poly_sub(poly_constant(p, 1), poly_monomial(p, e)));
    }
    Int h = quadratic::class_number_real(static_cast<unsigned long>(p));
    auto eps = quadratic::fundamental_unit(static_cast<unsigned long>(p));
    auto pw = quadratic::unit_power(eps, h);
    int chi = arith::jacobi(a, static_cast<std::int64_t>(p));
    for (int sign : {+1, -1}) {
        IntCycloPoly gs = sign == 1 ? g : poly_scale(g, -1);
        bool ok;
        if (chi == 1) {
            IntCycloPoly lhs =
                poly_mul(prod, poly_add(poly_constant(p, pw.a), poly_scale(gs, pw.b)));
            ok = lhs == poly_scale(gs, 2);
        } else {
            IntCycloPoly rhs = poly_add(poly_scale(gs, pw.a),
                                        poly_constant(p, Int(pw.b * static_cast<unsigned long>(p))));
            ok = poly_scale(prod, 2) == rhs;
        }
        if (ok) return {true, sign};
    }
    return {false, 0};
}

}  // namespace gporder::identities
