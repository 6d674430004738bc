#include <doctest.h>

#include <random>
#include <set>

#include "rectint/padic.hpp"

using namespace rectint;

namespace {

PAdicApprox pint(const PrimeContext& ctx, long v) { return PAdicApprox::from_long(ctx, v); }

// Independent decision of r in P_n for an exact integer: enumerate n-th
// powers modulo p^(ord r + 2 ord n + 1); Hensel pins down the rest.
bool pn_by_enumeration(const PrimeContext& ctx, long r, long n) {
    long e = ord_of_integer(ctx.p, mpz_class(n));
    long v = ord_of_integer(ctx.p, mpz_class(r));
    long big = v + 2 * e + 1;
    mpz_class mod = ctx.pow_p(big);
    mpz_class target = mpz_class(r) % mod;
    for (mpz_class y = 0; y < mod; ++y) {
        mpz_class yn;
        mpz_powm_ui(yn.get_mpz_t(), y.get_mpz_t(), static_cast<unsigned long>(n), mod.get_mpz_t());
        if (yn == target) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("field arithmetic on integer embeddings") {
    PrimeContext c7(7, 8);
    auto nine = mul(c7, pint(c7, 3), pint(c7, 3));
    CHECK(nine.valuation() == 0);
    CHECK(nine.digits()[0] == 2);
    CHECK(nine.digits()[1] == 1);  // 9 = 2 + 1*7
    CHECK(nine == pint(c7, 9));

    PrimeContext c5(5, 8);
    auto x = pint(c5, 1234);
    CHECK(add(c5, x, negate(c5, x)).is_zero());

    PrimeContext c3(3, 8);
    auto t = inv(c3, pint(c3, 3));
    CHECK(t.valuation() == -1);
    CHECK(t.digits()[0] == 1);
    for (int i = 1; i < t.known_digits(); ++i) CHECK(t.digits()[static_cast<std::size_t>(i)] == 0);

    CHECK_THROWS_AS(inv(c3, PAdicApprox::zero_value()), division_by_zero);
    CHECK_THROWS_AS(pow_int(c3, PAdicApprox::zero_value(), -1), division_by_zero);
}

TEST_CASE("valuation laws on random samples") {
    PrimeContext ctx(5, 10);
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<long> units(1, 5 * 5 * 5 * 5 - 1);
    std::uniform_int_distribution<long> vals(-3, 3);
    for (int trial = 0; trial < 200; ++trial) {
        long u1 = units(rng), u2 = units(rng);
        if (u1 % 5 == 0 || u2 % 5 == 0) continue;
        long v1 = vals(rng), v2 = vals(rng);
        auto a = PAdicApprox::from_unit(ctx, v1, mpz_class(u1), ctx.precision);
        auto b = PAdicApprox::from_unit(ctx, v2, mpz_class(u2), ctx.precision);
        CHECK(mul(ctx, a, b).valuation() == v1 + v2);
        auto s = add(ctx, a, b);
        if (v1 != v2) {
            CHECK(s.valuation() == std::min(v1, v2));
        } else if (!s.is_zero()) {
            CHECK(s.valuation() >= v1);
        }
        CHECK(pow_int(ctx, a, 3).valuation() == 3 * v1);
        CHECK(pow_int(ctx, a, -2).valuation() == -2 * v1);
    }
}

TEST_CASE("hensel lifting") {
    PrimeContext c7(7, 8);
    std::vector<mpz_class> f{-2, 0, 1};  // t^2 - 2

    // Expected root fixed by enumeration: the unique x mod 49 with
    // x^2 = 2 (mod 49) and x = 3 (mod 7).
    long expected = -1;
    for (long xx = 0; xx < 49; ++xx)
        if ((xx * xx) % 49 == 2 && xx % 7 == 3) expected = xx;
    REQUIRE(expected == 10);

    auto root = hensel_lift(c7, f, pint(c7, 3), 0);
    CHECK(root.valuation() == 0);
    auto r49 = root.unit_residue(c7, 2);
    CHECK(r49 == expected);
    // residual actually vanishes at working precision
    auto resid = add(c7, mul(c7, root, root), pint(c7, -2));
    CHECK(resid.is_zero());

    PrimeContext c5(5, 8);
    auto exact = hensel_lift(c5, {-5, 1}, pint(c5, 5), 0);  // t - 5 at alpha = 5
    CHECK(exact == pint(c5, 5));

    CHECK_THROWS_AS(hensel_lift(c7, {-7, 0, 1}, pint(c7, 3), 0), hypothesis_failed);

    // Uniqueness: two starting points in the same Hensel basin give the
    // same digits.
    auto root2 = hensel_lift(c7, f, pint(c7, 10), 0);
    CHECK(root == root2);
}

TEST_CASE("nth roots on the unit filtration") {
    PrimeContext c3(3, 8);
    CHECK(nth_root(c3, pint(c3, 1), 5, 2) == pint(c3, 1));

    auto y = pint(c3, 10);  // 1 + 9 lies in R^(2)
    auto sq = mul(c3, y, y);
    auto back = nth_root(c3, sq, 2, 2);
    int agree = std::min(back.known_digits(), y.known_digits());
    CHECK(back.valuation() == y.valuation());
    CHECK(back.unit_residue(c3, agree) == y.unit_residue(c3, agree));

    auto bad = pint(c3, 4);  // angular 1 + 3, not 1 mod 9
    CHECK_THROWS_AS(nth_root(c3, bad, 2, 2), not_in_range);
}

TEST_CASE("nth_root o pow is the identity, exhaustively at N = 5") {
    // All classes of R^(k)/p^N for the smallest admissible k.
    for (std::uint32_t p : {2u, 3u, 5u}) {
        for (long n : {2L, 3L}) {
            PrimeContext ctx(p, 5);
            long e = ord_of_integer(p, mpz_class(n));
            int k = static_cast<int>(e) + 1;
            long pk = 1;
            for (int i = 0; i < k; ++i) pk *= p;
            long pn2 = 1;
            for (int i = 0; i < ctx.precision; ++i) pn2 *= p;
            for (long v = 0; v < 2; ++v) {
                for (long u = 1; pk * u < pn2; ++u) {
                    long unit = 1 + pk * u;
                    if (unit % p == 0) continue;
                    auto x = PAdicApprox::from_unit(ctx, v, mpz_class(unit), ctx.precision);
                    REQUIRE(member_rk(ctx, x, k));
                    auto xn = pow_int(ctx, x, n);
                    auto back = nth_root(ctx, xn, n, k);
                    // documented precision loss: ord(n) digits
                    int agree = ctx.precision - static_cast<int>(e);
                    CHECK(back.valuation() == x.valuation());
                    CHECK(back.unit_residue(ctx, agree) == x.unit_residue(ctx, agree));
                }
            }
        }
    }
}

TEST_CASE("membership in R^(k)") {
    PrimeContext c2(2, 8);
    CHECK(member_rk(c2, pint(c2, 6), 1));
    PrimeContext c3(3, 8);
    CHECK_FALSE(member_rk(c3, pint(c3, 2), 1));
    CHECK(member_rk(c3, pint(c3, 3), 1));
    CHECK_FALSE(member_rk(c3, PAdicApprox::zero_value(), 1));

    // monotone in k
    std::mt19937_64 rng(7);
    for (int t = 0; t < 100; ++t) {
        long u = static_cast<long>(rng() % 6561);
        if (u == 0 || u % 3 == 0) continue;
        auto x = PAdicApprox::from_unit(c3, 0, mpz_class(u), c3.precision);
        for (int k = 1; k + 1 <= 4; ++k)
            if (member_rk(c3, x, k + 1)) CHECK(member_rk(c3, x, k));
    }
}

TEST_CASE("membership in P_n") {
    PrimeContext c7(7, 8);
    CHECK(member_pn(c7, pint(c7, 2), 2));   // 3^2 = 9 = 2 mod 7, lift
    CHECK_FALSE(member_pn(c7, pint(c7, 7), 2));
    CHECK(member_pn(c7, pint(c7, 1), 2));
    CHECK(member_pn(c7, pint(c7, 1), 12));
    CHECK_THROWS_AS(member_pn(c7, PAdicApprox::zero_value(), 2), zero_input);
}

TEST_CASE("P_n agrees with exhaustive powering for p in {2,3,5}") {
    for (std::uint32_t p : {2u, 3u, 5u}) {
        for (long n : {2L, 3L}) {
            int N = 6;
            PrimeContext ctx(p, N);
            long pN = 1;
            for (int i = 0; i < N; ++i) pN *= p;
            // precompute the set of n-th powers mod p^big
            long e = ord_of_integer(p, mpz_class(n));
            long big = (N - 1) + 2 * e + 1;
            mpz_class mod = ctx.pow_p(big);
            std::set<long> powers;
            for (mpz_class y = 0; y < mod; ++y) {
                mpz_class yn;
                mpz_powm_ui(yn.get_mpz_t(), y.get_mpz_t(), static_cast<unsigned long>(n),
                            mod.get_mpz_t());
                powers.insert(yn.get_si());
            }
            for (long r = 1; r < pN; ++r) {
                long v = ord_of_integer(p, mpz_class(r));
                long rbig = r % mod.get_si();
                bool expected = powers.count(rbig % mod.get_si()) > 0;
                // enumeration decides r itself; (v + 2e + 1)-digit window
                (void)v;
                bool got = member_pn(ctx, PAdicApprox::from_integer(ctx, mpz_class(r)), n);
                CHECK_MESSAGE(got == expected,
                              "p=", p, " n=", n, " r=", r, " got=", got, " want=", expected);
            }
        }
    }
}

TEST_CASE("spot-check the enumeration oracle itself") {
    PrimeContext c7(7, 8);
    CHECK(pn_by_enumeration(c7, 2, 2));
    CHECK_FALSE(pn_by_enumeration(c7, 7, 2));
}

TEST_CASE("precision guards fail loudly") {
    PrimeContext shallow(3, 2);
    // digits 1,1: a known digit already refutes k = 2, no guess needed
    CHECK_FALSE(member_rk(shallow, PAdicApprox::from_long(shallow, 4), 2));
    // digits 1,0: consistent prefix, but k = 3 needs an unknown digit
    CHECK_THROWS_AS(member_rk(shallow, PAdicApprox::from_long(shallow, 1), 3),
                    precision_exhausted);
    // membership in P_n needs 2 ord(n) + 1 digits
    PrimeContext c2(2, 2);
    CHECK_THROWS_AS(member_pn(c2, PAdicApprox::from_long(c2, 3), 4), precision_exhausted);
    // a one-digit context still works for plain arithmetic
    PrimeContext c1(5, 1);
    CHECK(mul(c1, PAdicApprox::from_long(c1, 2), PAdicApprox::from_long(c1, 3)).digits()[0] == 1);
}
