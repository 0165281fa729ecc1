#pragma once

// Invariants of the real quadratic field K = Q(sqrt(p)) for primes
// p ≡ 1 mod 4: the fundamental unit of O_K = Z[(1+sqrt(p))/2] computed from
// the continued fraction of (1+sqrt(p))/2, its reduction modulo inert
// primes q, multiplicative indices in the residue field O_K/q ≅ F_{q^2},
// and the class numbers of K and of Q(sqrt(-p)).

#include <mpfr.h>

#include <cmath>
#include <cstdint>
#include <utility>

#include "gporder/arith.hpp"
#include "gporder/errors.hpp"

namespace gporder::quadratic {

using arith::Int;

// ---- fundamental units --------------------------------------------------

// epsilon_p = (x + y*sqrt(p))/2 > 1 with x^2 - p*y^2 = -4 and y least.
struct FundamentalUnit {
    Int p, x, y;
};

// x, y reduced mod m.
struct UnitResidue {
    Int x, y;
};

namespace detail {

inline void require_p_1mod4(const Int& p, const char* who) {
    if (p % 4 != 1 || !arith::is_prime(p))
        throw Error(std::string(who) + ": p must be a prime congruent to 1 mod 4, got " +
                    p.get_str());
}

}  // namespace detail

// Continued fraction of w = (1+sqrt(p))/2.  The tail theta_1 = 1/(w - a_0)
// is reduced, so the state (P, Q) cycles; one primitive period yields the
// fundamental unit as y = k_{l-1}, x = 2*k_l - (2*a_0 - 1)*k_{l-1} where
// k_j are the convergent denominators of w.
inline FundamentalUnit fundamental_unit(const Int& p) {
    detail::require_p_1mod4(p, "fundamental_unit");
    Int s = arith::isqrt(p);
    Int a0 = (1 + s) / 2;
    Int P1 = 2 * a0 - 1;
    Int Q1 = (p - P1 * P1) / 2;
    Int P = P1, Q = Q1;
    Int km1 = 0, k0 = 1;  // k_{-1}, k_0
    while (true) {
        Int a = (P + s) / Q;
        Int knew = a * k0 + km1;
        km1 = k0;
        k0 = knew;
        P = a * Q - P;
        Q = (p - P * P) / Q;
        if (P == P1 && Q == Q1) break;
    }
    FundamentalUnit u;
    u.p = p;
    u.y = km1;
    u.x = 2 * k0 - (2 * a0 - 1) * km1;
    if (u.x * u.x - p * u.y * u.y != -4)
        throw Error("fundamental_unit: norm check failed for p = " + p.get_str());
    return u;
}

// Same walk carrying the convergent denominators only mod m; the exact
// (P, Q) state stays O(sqrt(p)).
inline UnitResidue fundamental_unit_mod(const Int& p, const Int& m) {
    detail::require_p_1mod4(p, "fundamental_unit_mod");
    if (m < 1) throw Error("fundamental_unit_mod: modulus must be positive");
    if (mpz_fits_ulong_p(p.get_mpz_t()) && p < (Int(1) << 40) && m < (Int(1) << 31)) {
        std::uint64_t pu = arith::to_u64(p), mu = arith::to_u64(m);
        std::uint64_t s = arith::to_u64(arith::isqrt(p));
        std::uint64_t a0 = (1 + s) / 2;
        std::uint64_t P1 = 2 * a0 - 1;
        std::uint64_t Q1 = (pu - P1 * P1) / 2;
        std::uint64_t P = P1, Q = Q1;
        std::uint64_t km1 = 0, k0 = 1 % mu;
        while (true) {
            std::uint64_t a = (P + s) / Q;
            std::uint64_t knew = (a % mu * k0 + km1) % mu;
            km1 = k0;
            k0 = knew;
            P = a * Q - P;
            Q = (pu - P * P) / Q;
            if (P == P1 && Q == Q1) break;
        }
        std::uint64_t x = ((2 * k0) % mu + mu * 2 - (2 * a0 - 1) % mu * km1 % mu) % mu;
        return {Int(static_cast<unsigned long>(x)), Int(static_cast<unsigned long>(km1))};
    }
    Int s = arith::isqrt(p);
    Int a0 = (1 + s) / 2;
    Int P1 = 2 * a0 - 1;
    Int Q1 = (p - P1 * P1) / 2;
    Int P = P1, Q = Q1;
    Int km1 = 0, k0 = Int(1) % m;
    while (true) {
        Int a = (P + s) / Q;
        Int knew = (a * k0 + km1) % m;
        km1 = k0;
        k0 = knew;
        P = a * Q - P;
        Q = (p - P * P) / Q;
        if (P == P1 && Q == Q1) break;
    }
    Int x = (2 * k0 - (2 * a0 - 1) * km1) % m;
    if (x < 0) x += m;
    return {x, km1};
}

// ---- exact (a + b*sqrt(p))/2 arithmetic ----------------------------------

// Element (a + b*sqrt(p))/2 of O_K; a ≡ b mod 2 is maintained.
struct HalfElem {
    Int a, b;
};

inline HalfElem half_mul(const Int& p, const HalfElem& u, const HalfElem& v) {
    return {(u.a * v.a + p * u.b * v.b) / 2, (u.a * v.b + u.b * v.a) / 2};
}

// Exact e-th power (e >= 0) of (x + y*sqrt(p))/2.
inline HalfElem unit_power(const FundamentalUnit& u, const Int& e) {
    HalfElem base{u.x, u.y};
    HalfElem one{2, 0};
    auto mul = [&u](const HalfElem& l, const HalfElem& r) { return half_mul(u.p, l, r); };
    return arith::power(base, e, one, mul);
}

// ---- the inert residue ring ----------------------------------------------

// O_K/mO_K presented as (Z/m)[X]/(X^2 - X + c) with c = (1-p)/4 mod m.
// For m = 2 the class of p mod 8 decides c; p ≡ 5 mod 8 gives c = 1 and the
// field F_4.  p_class records the defining residue (mod 8 when m = 2).
struct QuadRing {
    std::uint64_t m = 0;
    std::uint64_t p_class = 0;
    std::uint64_t c = 0;

    bool operator==(const QuadRing&) const = default;
};

inline QuadRing quad_ring(std::uint64_t m, std::uint64_t p_class) {
    QuadRing r;
    r.m = m;
    r.p_class = p_class;
    if (m == 2) {
        if (p_class % 8 != 5)
            throw HypothesisViolated("quad_ring: modulus 2 needs p ≡ 5 mod 8, got p ≡ " +
                                     std::to_string(p_class % 8));
        r.c = 1;
        return r;
    }
    if (m % 2 == 0 || m < 3) throw Error("quad_ring: modulus must be 2 or odd >= 3");
    Int inv4;
    Int four = 4, mm = static_cast<unsigned long>(m);
    mpz_invert(inv4.get_mpz_t(), four.get_mpz_t(), mm.get_mpz_t());
    Int c = (1 - Int(static_cast<unsigned long>(p_class % m))) * inv4 % mm;
    if (c < 0) c += mm;
    r.c = arith::to_u64(c);
    return r;
}

struct QuadElem {
    QuadRing ring;
    std::uint64_t a = 0, b = 0;  // a + b*X

    bool operator==(const QuadElem&) const = default;
};

inline QuadElem quad_elem(const QuadRing& r, std::uint64_t a, std::uint64_t b) {
    return {r, a % r.m, b % r.m};
}

inline QuadElem quad_one(const QuadRing& r) { return {r, 1 % r.m, 0}; }

inline bool is_zero(const QuadElem& e) { return e.a == 0 && e.b == 0; }

// (a1 + b1 X)(a2 + b2 X) with X^2 = X - c.
inline QuadElem quad_mul(const QuadElem& u, const QuadElem& v) {
    if (!(u.ring == v.ring)) throw ContextMismatch("quad_mul: elements from different rings");
    std::uint64_t m = u.ring.m;
    std::uint64_t bb = u.b * v.b % m;
    std::uint64_t a = (u.a * v.a % m + (m - u.ring.c) * bb) % m;
    std::uint64_t b = (u.a * v.b + u.b * v.a + bb) % m;
    return {u.ring, a, b};
}

inline QuadElem quad_pow(const QuadElem& e, const Int& exp) {
    auto mul = [](const QuadElem& x, const QuadElem& y) { return quad_mul(x, y); };
    return arith::power(e, exp, quad_one(e.ring), mul);
}

// ---- reductions of the fundamental unit ----------------------------------

inline bool is_inert(const Int& p, const Int& q) {
    if (q == 2) return p % 8 == 5;
    return arith::jacobi(p, q) == -1;
}

// epsilon_p mod qO_K as an element of F_{q^2} = (Z/q)[X]/(X^2 - X + c),
// using sqrt(p) = 2X - 1:  (x + y*sqrt(p))/2 = (x - y)/2 + y*X.
inline QuadElem unit_mod_q(const Int& p, const Int& q) {
    detail::require_p_1mod4(p, "unit_mod_q");
    if (!arith::is_prime(q)) throw Error("unit_mod_q: q must be prime, got " + q.get_str());
    if (!is_inert(p, q))
        throw NotInert("unit_mod_q: q = " + q.get_str() + " is not inert in Q(sqrt(" +
                       p.get_str() + "))");
    UnitResidue r = fundamental_unit_mod(p, 2 * q);
    Int d = r.x - r.y;
    if (d < 0) d += 2 * q;
    // x ≡ y mod 2, so the division is exact in Z/(2q) -> Z/q.
    Int a = (d / 2) % q;
    Int b = r.y % q;
    QuadRing ring = quad_ring(arith::to_u64(q),
                              q == 2 ? arith::to_u64(p % 8) : arith::to_u64(p % q));
    return quad_elem(ring, arith::to_u64(a), arith::to_u64(b));
}

// Index of e in F_{q^2}^* : (q^2 - 1) / ord(e).
inline Int quad_index(const QuadElem& e, const Int& q) {
    if (Int(static_cast<unsigned long>(e.ring.m)) != q)
        throw ContextMismatch("quad_index: element modulus " + std::to_string(e.ring.m) +
                              " does not match q = " + q.get_str());
    if (is_zero(e)) throw ZeroElement("quad_index: zero element");
    Int disc = (1 - 4 * Int(static_cast<unsigned long>(e.ring.c))) %
               Int(static_cast<unsigned long>(e.ring.m));
    if (q != 2 && arith::jacobi(disc, q) != -1)
        throw NotInert("quad_index: ring modulus X^2 - X + " + std::to_string(e.ring.c) +
                       " is not a field mod " + q.get_str());
    Int group = q * q - 1;
    auto mul = [](const QuadElem& x, const QuadElem& y) { return quad_mul(x, y); };
    auto eq = [](const QuadElem& x, const QuadElem& y) { return x == y; };
    Int ord = arith::order_from_multiple(e, arith::factorize(group), quad_one(e.ring), mul, eq);
    return group / ord;
}

// ind(epsilon_p^h mod q): the right-hand side of the main identity.
inline Int rhs_theorem(const Int& p, const Int& q, const Int& h) {
    QuadElem u = unit_mod_q(p, q);
    return quad_index(quad_pow(u, h), q);
}

// ---- class numbers --------------------------------------------------------

namespace detail {

// Minimal RAII wrapper over one mpfr_t.
class Real {
  public:
    explicit Real(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
    Real(const Real&) = delete;
    Real& operator=(const Real&) = delete;
    ~Real() { mpfr_clear(v_); }
    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }

  private:
    mpfr_t v_;
};

}  // namespace detail

// h of Q(sqrt(p)) by numeric inversion of
//   prod_{k=1}^{(p-1)/2} |1 - e^{2 pi i k^2 / p}| = sqrt(p) * eps_p^{-h}:
//   h = (log(sqrt(p)) - sum_k log(2 sin(pi (k^2 mod p) / p))) / log(eps_p).
// The result is certified to lie within 2^-10 of an integer, else
// PrecisionInsufficient is raised.
inline Int class_number_real(const Int& p, mpfr_prec_t precision_bits) {
    detail::require_p_1mod4(p, "class_number_real");
    if (precision_bits < 32) throw Error("class_number_real: precision must be >= 32 bits");
    FundamentalUnit u = fundamental_unit(p);

    detail::Real pi(precision_bits), term(precision_bits), sum(precision_bits),
        t(precision_bits), h(precision_bits), nearest(precision_bits);
    mpfr_const_pi(pi.get(), MPFR_RNDN);
    mpfr_set_zero(sum.get(), 1);
    Int half = (p - 1) / 2;
    for (Int k = 1; k <= half; ++k) {
        Int r = k * k % p;
        mpfr_mul_z(term.get(), pi.get(), r.get_mpz_t(), MPFR_RNDN);
        mpfr_div_z(term.get(), term.get(), p.get_mpz_t(), MPFR_RNDN);
        mpfr_sin(term.get(), term.get(), MPFR_RNDN);
        mpfr_mul_ui(term.get(), term.get(), 2, MPFR_RNDN);
        mpfr_log(term.get(), term.get(), MPFR_RNDN);
        mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
    }
    // t = log(sqrt(p)) - sum
    mpfr_set_z(t.get(), p.get_mpz_t(), MPFR_RNDN);
    mpfr_log(t.get(), t.get(), MPFR_RNDN);
    mpfr_div_ui(t.get(), t.get(), 2, MPFR_RNDN);
    mpfr_sub(t.get(), t.get(), sum.get(), MPFR_RNDN);
    // h = t / log((x + y*sqrt(p))/2)
    mpfr_set_z(term.get(), p.get_mpz_t(), MPFR_RNDN);
    mpfr_sqrt(term.get(), term.get(), MPFR_RNDN);
    mpfr_mul_z(term.get(), term.get(), u.y.get_mpz_t(), MPFR_RNDN);
    mpfr_add_z(term.get(), term.get(), u.x.get_mpz_t(), MPFR_RNDN);
    mpfr_div_ui(term.get(), term.get(), 2, MPFR_RNDN);
    mpfr_log(term.get(), term.get(), MPFR_RNDN);
    mpfr_div(h.get(), t.get(), term.get(), MPFR_RNDN);

    mpfr_round(nearest.get(), h.get());
    mpfr_sub(t.get(), h.get(), nearest.get(), MPFR_RNDN);
    mpfr_abs(t.get(), t.get(), MPFR_RNDN);
    if (mpfr_cmp_d(t.get(), 1.0 / 1024.0) >= 0)
        throw PrecisionInsufficient("class_number_real: residual too far from an integer at " +
                                    std::to_string(precision_bits) + " bits for p = " +
                                    p.get_str());
    Int result;
    mpfr_get_z(result.get_mpz_t(), nearest.get(), MPFR_RNDN);
    if (result < 1)
        throw PrecisionInsufficient("class_number_real: nonpositive rounding for p = " +
                                    p.get_str());
    return result;
}

// Adaptive driver: the starting precision covers the class number formula
// bound h*log2(eps) <= sqrt(p)*(log(p)/2 + 1)/log(2), doubling on failure.
inline Int class_number_real(const Int& p) {
    double pd = p.get_d();
    auto bits = static_cast<mpfr_prec_t>(
        64 + std::ceil(std::sqrt(pd) * (0.5 * std::log(pd) + 1.0) / std::log(2.0)));
    for (int attempt = 0; attempt < 6; ++attempt) {
        try {
            return class_number_real(p, bits);
        } catch (const PrecisionInsufficient&) {
            bits *= 2;
        }
    }
    throw PrecisionInsufficient("class_number_real: no certificate up to " +
                                std::to_string(bits) + " bits for p = " + p.get_str());
}

// h(-p) (discriminant -4p) by the residue count
//   m = #{ (p+3)/4 <= r <= (p-1)/2 : (r/p) = 1 },  h = (p-1)/2 - 4m.
struct ImagClassNumber {
    Int h;
    Int m_count;
};

inline ImagClassNumber class_number_imag(const Int& p) {
    detail::require_p_1mod4(p, "class_number_imag");
    Int m = 0;
    for (Int r = (p + 3) / 4; r <= (p - 1) / 2; ++r)
        if (arith::jacobi(r, p) == 1) ++m;
    return {(p - 1) / 2 - 4 * m, m};
}

// Independent oracle: count reduced primitive binary quadratic forms
// (A, B, C) of discriminant -4p, i.e. -A < B <= A <= C, B >= 0 when
// |B| = A or A = C, gcd(A, B, C) = 1.
inline Int class_number_imag_forms(const Int& p) {
    detail::require_p_1mod4(p, "class_number_imag_forms");
    Int count = 0;
    Int amax = arith::isqrt(4 * p / 3);
    for (Int A = 1; A <= amax; ++A) {
        for (Int B = -A + 1; B <= A; ++B) {
            if (mpz_odd_p(B.get_mpz_t())) continue;  // even discriminant
            Int num = B * B + 4 * p;
            if (num % (4 * A) != 0) continue;
            Int C = num / (4 * A);
            if (C < A) continue;
            if ((abs(B) == A || A == C) && B < 0) continue;
            Int g = gcd(gcd(A, abs(B)), C);
            if (g != 1) continue;
            ++count;
        }
    }
    return count;
}

// Aggregate record for one p.
struct ClassData {
    Int p;
    Int h_real;
    Int h_imag;
    Int m_count;
};

inline ClassData class_data(const Int& p) {
    ImagClassNumber im = class_number_imag(p);
    return {p, class_number_real(p), im.h, im.m_count};
}

}  // namespace gporder::quadratic
