#include <doctest.h>

#include "rectint/oracle.hpp"

using namespace rectint;

namespace {

Integrand unit_integrand(int dim) {
    Integrand ig;
    ig.f = ParamMonomial::one(static_cast<std::size_t>(dim));
    ig.g = ig.f;
    return ig;
}

mpq_class qp(long q, long e) {
    mpq_class r(1);
    mpz_class n;
    mpz_ui_pow_ui(n.get_mpz_t(), static_cast<unsigned long>(q),
                  static_cast<unsigned long>(e < 0 ? -e : e));
    if (e >= 0) return mpq_class(n);
    r /= n;
    return r;
}

}  // namespace

TEST_CASE("measure of R^(1) over Q_2 truncated at depth 10") {
    PrimeContext ctx(2, 12);
    SymbolTable table;
    ParamInstance inst;
    RectSet r;
    r.k = 1;
    r.lPrime = 1;
    r.l = 1;
    auto rep = truncated_integral(r, unit_integrand(1), table, inst, ctx, 2, 0, 10);
    CHECK(rep.value == 1 - qp(2, -10));
    CHECK(rep.tail_bound == qp(2, -10));
}

TEST_CASE("|x|^s over R^(1) in Q_3 brackets the closed form 3/8") {
    PrimeContext ctx(3, 12);
    SymbolTable table;
    ParamInstance inst;
    RectSet r;
    r.k = 1;
    r.lPrime = 1;
    r.l = 1;
    Integrand ig = unit_integrand(1);
    ig.f.exps = {1};
    auto rep = truncated_integral(r, ig, table, inst, ctx, 3, 1, 12);
    mpq_class expect = 0;
    for (long n = 0; n < 12; ++n) expect += qp(3, -n) * qp(3, -n - 1);
    CHECK(rep.value == expect);
    mpq_class closed(3, 8);  // U/(1 - TU) at q = 3, s = 1
    CHECK(closed >= rep.value);
    CHECK(closed <= rep.value + rep.tail_bound);
    CHECK(rep.tail_bound <= qp(3, -20));
}

TEST_CASE("empty gamma region: zero value, zero tail") {
    PrimeContext ctx(3, 8);
    SymbolTable table;
    ParamInstance inst;
    RectSet r;
    r.k = 1;
    r.lPrime = 2;
    r.l = 1;
    r.delta.push_coordinate(GammaBound{CoeffExpr::constant(-1), {}});
    auto rep = truncated_integral(r, unit_integrand(1), table, inst, ctx, 3, 0, 8);
    CHECK(rep.value == 0);
    CHECK(rep.tail_bound == 0);
}

TEST_CASE("monotone refinement in the depth") {
    PrimeContext ctx(3, 12);
    SymbolTable table;
    ParamInstance inst;
    RectSet r;
    r.k = 1;
    r.lPrime = 1;
    r.l = 2;
    Integrand ig = unit_integrand(2);
    ig.f.exps = {1, 0};
    ig.g.exps = {0, 1};
    mpq_class prev_value = -1, prev_upper = 100;
    for (int depth = 3; depth <= 9; ++depth) {
        auto rep = truncated_integral(r, ig, table, inst, ctx, 3, 2, depth);
        CHECK(rep.value >= prev_value);
        CHECK(rep.value + rep.tail_bound <= prev_upper);
        prev_value = rep.value;
        prev_upper = rep.value + rep.tail_bound;
    }
}

TEST_CASE("d = 0 rect block measure equals the closed form") {
    PrimeContext ctx(3, 12);
    SymbolTable table;
    ParamInstance inst;
    RectSet r;
    r.k = 1;
    r.lPrime = 1;
    r.l = 2;
    auto rep = oracle_measure(r, table, inst, ctx, 10);
    // (q^-k / (1 - q^-1))^2 = 1/4 at q = 3, k = 1
    mpq_class closed(1, 4);
    mpq_class partial = (1 - qp(3, -10)) / 2;
    CHECK(rep.value == partial * partial);
    CHECK(closed >= rep.value);
    CHECK(closed <= rep.value + rep.tail_bound);
}

TEST_CASE("compare_set_image on identity, swap and a corrupted shear") {
    PrimeContext ctx(2, 10);
    SymbolTable table;
    ParamInstance inst;

    RectSet r1;
    r1.k = 1;
    r1.lPrime = 1;
    r1.l = 1;
    TransformProgram ident;
    ident.domain = r1;
    ident.codomain = r1;
    CHECK(compare_set_image(ident, table, inst, ctx, 4).ok);

    RectSet r2 = r1;
    r2.l = 2;
    TransformProgram sw;
    sw.domain = r2;
    sw.codomain = r2;
    sw.steps.push_back(StepSwap{0, 1});
    CHECK(compare_set_image(sw, table, inst, ctx, 4).ok);

    // corrupted shear: x0 -> x0 x1 is injective but lands on a skewed
    // subset, so the image cannot tile the codomain
    TransformProgram bad;
    bad.domain = r2;
    bad.codomain = r2;
    StepF2 f2;
    f2.target = 0;
    f2.coeff = CoeffExpr::constant(0);
    f2.exps = {0, 1};
    bad.steps.push_back(f2);
    auto res = compare_set_image(bad, table, inst, ctx, 4);
    CHECK_FALSE(res.ok);
    CHECK(!res.witness.empty());
}

TEST_CASE("ball transport matches the jacobian order") {
    PrimeContext ctx(3, 10);
    SymbolTable table;
    ParamInstance inst;
    RectSet r;
    r.k = 1;
    r.lPrime = 1;
    r.l = 1;
    TransformProgram sq;
    sq.domain = r;
    sq.codomain = r;
    sq.steps.push_back(StepF1{{Scalar{PAdicApprox::from_long(ctx, 1)}}, {2},
                             HenselData{2, 1, 1}});
    SymbolTable mint = table;
    sq.jacCert = jacobian_certificate(sq, mint, ctx);
    PointClass ball{CoordClass{false, 2, 4, 1 + 3}};
    auto res = check_ball_transport(sq, table, inst, ctx, ball);
    CHECK(res.ok);
}
