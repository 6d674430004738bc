#include <doctest.h>

#include <random>

#include "rectint/integrate.hpp"
#include "rectint/oracle.hpp"

using namespace rectint;

namespace {

mpq_class qp(long q, long e) {
    mpz_class n;
    mpz_ui_pow_ui(n.get_mpz_t(), static_cast<unsigned long>(q),
                  static_cast<unsigned long>(e < 0 ? -e : e));
    if (e >= 0) return mpq_class(n);
    mpq_class r(1);
    r /= n;
    return r;
}

GeneralCell nonzero_ring_cell(const PrimeContext& ctx) {
    // {t in R : t != 0} as a cell: t in P_1, ord 1 <= ord t
    GeneralCell cell;
    cell.base.k = 1;
    cell.base.lPrime = 1;
    cell.base.l = 0;
    cell.center = ParamMonomial::one(0);
    cell.center_is_zero = true;
    cell.lambda = PAdicApprox::from_long(ctx, 1);
    cell.n = 1;
    ParamMonomial lo;
    lo.coeff = CoeffExpr::constant(0);
    cell.lower = lo;
    return cell;
}

}  // namespace

TEST_CASE("integrate_rect_factor closed forms") {
    // k=1, mu=0, nu=0 at q=2: the measure of R^(1) in Q_2 is 1
    auto r = integrate_rect_factor(1, 0, 0);
    CHECK(evaluate(r, 2, 5) == 1);

    // k=1, mu=1, nu=0 at q=3, s=2: (1/3)/(1 - 3^-3) = 9/26
    auto r2 = integrate_rect_factor(1, 1, 0);
    CHECK(evaluate(r2, 3, 2) == mpq_class(9, 26));

    CHECK_THROWS_AS(integrate_rect_factor(1, 0, -1), divergent);
}

TEST_CASE("integrate_rect_factor matches q^-k/(1 - q^-(mu s + nu + 1)) on samples") {
    std::mt19937_64 rng(31);
    int done = 0;
    while (done < 20) {
        int k = 1 + static_cast<int>(rng() % 2);
        long mu = static_cast<long>(rng() % 4);
        long nu = static_cast<long>(rng() % 5) - 2;
        long q = (rng() % 2) ? 3 : 5;
        long s = 1 + static_cast<long>(rng() % 4);
        if (!(mu > 0 || (mu == 0 && nu + 1 > 0))) continue;
        if (mu * s + nu + 1 <= 0) continue;
        auto r = integrate_rect_factor(k, mu, nu);
        mpq_class expect = qp(q, -k) / (1 - qp(q, -(mu * s + nu + 1)));
        CHECK(evaluate(r, q, s) == expect);
        ++done;
    }
}

TEST_CASE("sum_gamma examples") {
    SymbolTable table;
    ParamInstance inst;
    GammaRegion interval{{{GammaBound{CoeffExpr::constant(2), {}}}}};
    BivarPoly p = sum_gamma(interval, {1}, {0}, table, inst);
    BivarPoly expect;
    expect.add_term(0, 0, 1);
    expect.add_term(1, 0, 1);
    expect.add_term(2, 0, 1);
    CHECK(p == expect);

    GammaRegion tri{{{GammaBound{CoeffExpr::constant(1), {}}},
                     {GammaBound{CoeffExpr::constant(0), {1}}}}};
    BivarPoly pu = sum_gamma(tri, {0, 0}, {1, 1}, table, inst);
    BivarPoly expect2;
    expect2.add_term(0, 0, 1);
    expect2.add_term(0, 1, 1);
    expect2.add_term(0, 2, 1);
    CHECK(pu == expect2);

    GammaRegion empty;
    CHECK(sum_gamma(empty, {}, {}, table, inst) == BivarPoly::one());

    CHECK_THROWS_AS(sum_gamma(interval, {-1}, {0}, table, inst), negative_degree);
}

TEST_CASE("|x|^s over R minus 0 in Q_3: the classical rational function") {
    PrimeContext ctx(3, 10);
    SymbolTable table;
    GeneralCell cell = nonzero_ring_cell(ctx);
    Integrand ig;
    ig.f = ParamMonomial{CoeffExpr::constant(0), {1}};  // |t|^s (fiber exponent)
    ig.g = ParamMonomial::one(1);
    auto parts = rectify_cell(cell, {ig.f, ig.g}, table, ctx);
    ParamInstance inst;
    RationalInTU r = integrate_parts(parts, ig, table, inst);
    CHECK(evaluate(r, 3, 1) == mpq_class(3, 4));
    CHECK(evaluate(r, 3, 2) == mpq_class(9, 13));
    // independent truncated oracle at depth 12
    for (long s : {1L, 2L}) {
        auto rep = truncated_integral(cell, ig, table, inst, ctx, 3, s, 12);
        mpq_class v = evaluate(r, 3, s);
        CHECK(v >= rep.value);
        CHECK(v <= rep.value + rep.tail_bound);
    }
}

TEST_CASE("f = g = 1 over R^(1) x R^(1) in Q_2 integrates to 1") {
    PrimeContext ctx(2, 8);
    SymbolTable table;
    RectSet r;
    r.k = 1;
    r.lPrime = 1;
    r.l = 2;
    Integrand ig;
    ig.f = ParamMonomial::one(2);
    ig.g = ParamMonomial::one(2);
    auto parts = rectify(SetSpec{r}, {ig.f, ig.g}, table, ctx);
    ParamInstance inst;
    RationalInTU result = integrate_parts(parts, ig, table, inst);
    CHECK(evaluate(result, 2, 3) == 1);
}

TEST_CASE("denominator multiset is identical across instances") {
    PrimeContext ctx(3, 8);
    SymbolTable table;
    table.declare("beta", SymbolRole::OrderOnly);
    ECellSpec e;
    e.base.k = 1;
    e.base.lPrime = 1;
    e.base.l = 1;
    e.bound.coeff = CoeffExpr::symbol("beta");
    e.bound.exps = {1};
    Integrand ig;
    ig.f = ParamMonomial{CoeffExpr::constant(0), {1, 1}};
    ig.g = ParamMonomial::one(2);
    auto parts = rectify_e(e, {ig.f, ig.g}, table, ctx);

    DenomFactors q0;
    BivarPoly n0;
    for (long b : {0L, 5L}) {
        ParamInstance inst;
        inst.entries["beta"] = InstanceEntry{false, b, std::nullopt};
        RationalInTU r = integrate_parts(parts, ig, table, inst);
        if (b == 0) {
            q0 = r.den;
            n0 = r.num;
        } else {
            CHECK(r.den == q0);          // Q does not depend on xi
            CHECK_FALSE(r.num == n0);    // the numerator does
        }
    }
}

TEST_CASE("linearity over a two-part disjoint partition") {
    PrimeContext ctx(3, 8);
    SymbolTable table;
    GeneralCell cell = nonzero_ring_cell(ctx);
    Integrand ig;
    ig.f = ParamMonomial{CoeffExpr::constant(0), {1}};
    ig.g = ParamMonomial::one(1);
    auto parts = rectify_cell(cell, {ig.f, ig.g}, table, ctx);
    REQUIRE(parts.size() == 2);
    ParamInstance inst;
    RationalInTU whole = integrate_parts(parts, ig, table, inst);
    RationalInTU first = integrate_parts({parts[0]}, ig, table, inst);
    RationalInTU second = integrate_parts({parts[1]}, ig, table, inst);
    for (long s : {1L, 3L}) {
        CHECK(evaluate(whole, 3, s) ==
              evaluate(first, 3, s) + evaluate(second, 3, s));
    }
}

TEST_CASE("evaluate pole and convergence guards") {
    RationalInTU r;
    r.num = BivarPoly::one();
    r.den.add(1, 1);
    r.s0_finite = true;
    r.s0 = -1;
    CHECK_THROWS_AS(evaluate(r, 3, -1), pole_at);  // 1 - 3^0 = 0
    RationalInTU r2;
    r2.num = BivarPoly::one();
    r2.den.add(2, 1);
    r2.s0_finite = true;
    r2.s0 = mpq_class(-1, 2);
    CHECK_THROWS_AS(evaluate(r2, 3, -1), not_convergent);
    RationalInTU c;
    c.num = BivarPoly::one();
    CHECK(evaluate(c, 5, 7) == 1);
}

TEST_CASE("u/(1-TU) evaluates to 9/26 at q=3, s=2") {
    RationalInTU r;
    r.num = BivarPoly::monomial(0, 1);
    r.den.add(1, 1);
    CHECK(evaluate(r, 3, 2) == mpq_class(9, 26));
}

TEST_CASE("numerator degree grows at most linearly in the instance orders") {
    PrimeContext ctx(3, 8);
    SymbolTable table;
    table.declare("beta", SymbolRole::OrderOnly);
    ECellSpec e;
    e.base.k = 1;
    e.base.lPrime = 1;
    e.base.l = 1;
    e.bound.coeff = CoeffExpr::symbol("beta");
    e.bound.exps = {1};
    Integrand ig;
    ig.f = ParamMonomial{CoeffExpr::constant(0), {1, 1}};
    ig.g = ParamMonomial::one(2);
    auto parts = rectify_e(e, {ig.f, ig.g}, table, ctx);
    std::vector<long> degs;
    for (long v = 1; v <= 10; ++v) {
        ParamInstance inst;
        inst.entries["beta"] = InstanceEntry{false, v, std::nullopt};
        RationalInTU r = integrate_parts(parts, ig, table, inst);
        degs.push_back(r.num.max_deg_t());
    }
    // slope bounded: deg(2v) - deg(v) <= C * v with a single fitted C
    long C = 8;
    for (long v = 1; v <= 5; ++v)
        CHECK(degs[static_cast<std::size_t>(2 * v - 1)] -
                  degs[static_cast<std::size_t>(v - 1)] <=
              C * v);
}
