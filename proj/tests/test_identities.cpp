#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <random>
#include <vector>

#include "gporder/arith.hpp"
#include "gporder/identities.hpp"
#include "gporder/quadratic.hpp"

using namespace gporder;
using arith::Int;

namespace {

// Evaluation oracle: a canonical class in Z[x]/Phi_p is determined by its
// values at the nontrivial p-th roots of unity.  We realize those roots in a
// prime field F_Q with p | Q-1 and compare evaluations.
struct RootEval {
    std::uint64_t Q;
    std::vector<std::uint64_t> roots;  // w, w^2, ..., w^(p-1), all of order p

    static RootEval make(std::uint64_t p) {
        std::uint64_t Q = 2 * p + 1;
        while (!arith::is_prime_u64(Q)) Q += p;  // keep Q = 1 mod p
        std::uint64_t w = 0;
        for (std::uint64_t g = 2; g < Q; ++g) {
            std::uint64_t cand = arith::powmod_u64(g, (Q - 1) / p, Q);
            if (cand != 1) {
                w = cand;
                break;
            }
        }
        RootEval ev{Q, {}};
        std::uint64_t r = w;
        for (std::uint64_t j = 1; j < p; ++j, r = arith::mulmod_u64(r, w, ev.Q))
            ev.roots.push_back(r);
        return ev;
    }

    std::uint64_t eval(const identities::IntCycloPoly& f, std::uint64_t root) const {
        std::uint64_t acc = 0;  // Horner from the top coefficient down
        for (std::size_t i = f.coeffs.size(); i-- > 0;) {
            Int c = f.coeffs[i] % static_cast<unsigned long>(Q);
            if (c < 0) c += static_cast<unsigned long>(Q);
            acc = (arith::mulmod_u64(acc, root, Q) + c.get_ui()) % Q;
        }
        return acc;
    }
};

identities::IntCycloPoly random_poly(std::uint64_t p, std::mt19937_64& rng) {
    identities::IntCycloPoly f = identities::poly_zero(p);
    for (auto& c : f.coeffs) c = static_cast<long>(static_cast<std::int64_t>(rng() % 41) - 20);
    return f;
}

}  // namespace

TEST_CASE("poly reduction basics") {
    // x^p reduces to 1
    CHECK(identities::poly_monomial(5, 5) == identities::poly_constant(5, 1));
    CHECK(identities::poly_monomial(13, 26) == identities::poly_constant(13, 1));
    // x^(p-1) = -(1 + x + ... + x^(p-2))
    auto top = identities::poly_monomial(5, 4);
    identities::IntCycloPoly expect = identities::poly_zero(5);
    for (auto& c : expect.coeffs) c = -1;
    CHECK(top == expect);
}

TEST_CASE("poly_mul agrees with the root-evaluation oracle") {
    std::mt19937_64 rng(424242);
    for (std::uint64_t p : {5ull, 13ull, 17ull}) {
        auto ev = RootEval::make(p);
        for (int trial = 0; trial < 30; ++trial) {
            auto a = random_poly(p, rng);
            auto b = random_poly(p, rng);
            auto ab = identities::poly_mul(a, b);
            for (std::uint64_t r : ev.roots)
                REQUIRE(ev.eval(ab, r) ==
                        arith::mulmod_u64(ev.eval(a, r), ev.eval(b, r), ev.Q));
        }
    }
}

TEST_CASE("gauss_sum_poly fixed values and square") {
    auto g5 = identities::gauss_sum_poly(5);
    // x - x^2 - x^3 + x^4 reduced
    auto expected = identities::poly_sub(
        identities::poly_add(identities::poly_monomial(5, 1), identities::poly_monomial(5, 4)),
        identities::poly_add(identities::poly_monomial(5, 2), identities::poly_monomial(5, 3)));
    CHECK(g5 == expected);

    auto g13 = identities::gauss_sum_poly(13);
    auto sq = identities::poly_mul(g13, g13);
    CHECK(sq.coeffs[0] == 13);
    CHECK(sq == identities::poly_constant(13, 13));

    // construction asserts G^2 = p for every level
    for (std::uint64_t p = 5; p <= 113; p += 4)
        if (arith::is_prime_u64(p)) CHECK_NOTHROW(identities::gauss_sum_poly(p));
    CHECK_THROWS_AS(identities::gauss_sum_poly(7), Error);
    CHECK_THROWS_AS(identities::gauss_sum_poly(21), Error);
}

TEST_CASE("first norm identity holds") {
    for (std::uint64_t p : {5ull, 13ull, 17ull, 29ull, 37ull, 41ull, 53ull, 61ull, 73ull}) {
        auto r = identities::verify_norm_identity_one(p);
        INFO("p = " << p);
        REQUIRE(r.ok);
        if (p % 8 == 5) REQUIRE(r.sign == +1);
    }
}

TEST_CASE("second norm identity holds") {
    for (std::uint64_t p : {5ull, 13ull, 17ull, 29ull, 37ull, 41ull, 53ull, 61ull, 73ull}) {
        auto r = identities::verify_norm_identity_two(p);
        INFO("p = " << p);
        REQUIRE(r.ok);
        if (p % 8 == 5) REQUIRE(r.sign == +1);
    }
}

TEST_CASE("product identity holds on both character branches") {
    CHECK(identities::verify_sun_identity(5, 1).ok);
    CHECK(identities::verify_sun_identity(5, 2).ok);  // 2 is a non-residue mod 5
    CHECK(identities::verify_sun_identity(13, 1).ok);
    for (std::uint64_t p : {5ull, 13ull, 17ull, 29ull, 37ull}) {
        for (std::int64_t a : {1ll, 2ll, 3ll, -1ll, 7ll, 100ll}) {
            if (a % static_cast<std::int64_t>(p) == 0) continue;
            INFO("p = " << p << ", a = " << a);
            REQUIRE(identities::verify_sun_identity(p, a).ok);
        }
    }
    CHECK_THROWS_AS(identities::verify_sun_identity(5, 10), Error);
    CHECK_THROWS_AS(identities::verify_sun_identity(5, 0), Error);
}

TEST_CASE("squared second identity reproduces the first") {
    // For p = 5 mod 8: (2 prod_2)^2 = 2u - 2vG where eps^(2h) = (u+v sqrt p)/2,
    // i.e. squaring the conjugate-unit relation lands on the inverse of the
    // relation certified by the first identity.
    for (std::uint64_t p : {5ull, 13ull, 29ull, 37ull, 53ull, 61ull}) {
        auto g = identities::gauss_sum_poly(p);
        auto prod = identities::poly_constant(p, 1);
        for (std::uint64_t r = 1; r <= (p - 1) / 2; ++r) {
            if (arith::jacobi(static_cast<std::int64_t>(r), static_cast<std::int64_t>(p)) != 1)
                continue;
            prod = identities::poly_mul(
                prod, identities::poly_add(identities::poly_monomial(p, r),
                                           identities::poly_monomial(p, p - r)));
        }
        auto lhs = identities::poly_mul(identities::poly_scale(prod, 2),
                                        identities::poly_scale(prod, 2));
        Int h = quadratic::class_number_real(static_cast<unsigned long>(p));
        auto eps = quadratic::fundamental_unit(static_cast<unsigned long>(p));
        auto pw = quadratic::unit_power(eps, Int(2 * h));
        auto rhs = identities::poly_sub(identities::poly_constant(p, Int(2 * pw.a)),
                                        identities::poly_scale(g, Int(2 * pw.b)));
        INFO("p = " << p);
        REQUIRE(lhs == rhs);
    }
}

TEST_CASE("unit powers are integral in the half-coordinate lattice") {
    for (std::uint64_t p = 5; p <= 197; p += 4) {
        if (!arith::is_prime_u64(p)) continue;
        Int h = quadratic::class_number_real(static_cast<unsigned long>(p));
        auto eps = quadratic::fundamental_unit(static_cast<unsigned long>(p));
        auto one_pow = quadratic::unit_power(eps, h);
        auto two_pow = quadratic::unit_power(eps, Int(2 * h));
        REQUIRE((one_pow.a - one_pow.b) % 2 == 0);
        REQUIRE((two_pow.a - two_pow.b) % 2 == 0);
    }
}
