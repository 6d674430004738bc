#include "rectint/rectilinear.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace rectint {

using nlohmann::json;

namespace {

long ord_p_long(std::uint32_t p, long a) {
    if (a == 0) throw error("ord of 0");
    if (a < 0) a = -a;
    long v = 0;
    while (a % p == 0) {
        a /= p;
        ++v;
    }
    return v;
}

long pow_long(long b, long e) {
    long r = 1;
    for (long i = 0; i < e; ++i) r *= b;
    return r;
}

// Widen a step acting on the first coordinates of a larger space.
Step extend_step(Step s, std::size_t dim, const PrimeContext& ctx) {
    if (auto* f1 = std::get_if<StepF1>(&s)) {
        while (f1->alphas.size() < dim) {
            f1->alphas.push_back(Scalar{PAdicApprox::from_long(ctx, 1)});
            f1->exps.push_back(1);
        }
    } else if (auto* f2 = std::get_if<StepF2>(&s)) {
        while (f2->exps.size() < dim) f2->exps.push_back(0);
    }
    return s;
}

std::vector<Step> extend_steps(const std::vector<Step>& steps, std::size_t dim,
                               const PrimeContext& ctx) {
    std::vector<Step> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(extend_step(s, dim, ctx));
    return out;
}

PartPredicate merge_pred(PartPredicate a, const std::vector<std::string>& nonzero,
                         const std::vector<std::string>& zero) {
    for (const auto& s : nonzero)
        if (std::find(a.require_nonzero.begin(), a.require_nonzero.end(), s) ==
            a.require_nonzero.end())
            a.require_nonzero.push_back(s);
    for (const auto& s : zero)
        if (std::find(a.require_zero.begin(), a.require_zero.end(), s) == a.require_zero.end())
            a.require_zero.push_back(s);
    return a;
}

PartPredicate with_cond(PartPredicate a, CoeffExpr expr, long c, bool at_least) {
    a.ord_conds.push_back(OrdCond{std::move(expr), c, at_least});
    return a;
}

struct EmitCtx {
    SetSpec input;
    std::vector<ParamMonomial> tracked;  // over the centered codomain coordinates
    bool strip_tc_for_certs = false;
    long cert_div = 1;
    SymbolTable* table = nullptr;
    const PrimeContext* ctx = nullptr;
    std::vector<RectifiedPart>* out = nullptr;
};

void emit_part(EmitCtx& E, RectSet target, std::vector<Step> steps, const PartPredicate& pred,
               const std::string& trace) {
    target.validate();
    TransformProgram prog;
    prog.steps = std::move(steps);
    prog.domain = target;
    prog.codomain = E.input;

    TransformProgram cert_prog = prog;
    if (E.strip_tc_for_certs && !cert_prog.steps.empty() &&
        std::holds_alternative<StepTc>(cert_prog.steps.back()))
        cert_prog.steps.pop_back();
    std::vector<ParamMonomial> certs = certify_orders(cert_prog, E.tracked, *E.table);
    if (E.cert_div > 1) {
        for (auto& c : certs) {
            for (auto& e : c.exps) {
                if (e % E.cert_div != 0)
                    throw unsupported_spec(
                        "tracked order is not a monomial order after division by n");
                e /= E.cert_div;
            }
            c.coeff = E.table->reduce(c.coeff, E.cert_div, DivMode::Exact);
        }
    }
    prog.jacCert = jacobian_certificate(prog, *E.table, *E.ctx);

    RectifiedPart part;
    part.target = std::move(target);
    part.program = std::move(prog);
    part.predicate = pred;
    part.certificates = std::move(certs);
    part.case_trace = trace;
    E.out->push_back(std::move(part));
}

// Residue representatives 1 + p^k j covering R^(k) by cosets of R^(kt).
std::vector<long> angular_reps(const PrimeContext& ctx, int k, int kt) {
    std::vector<long> out;
    long pk = pow_long(ctx.p, k);
    long cnt = pow_long(ctx.p, kt - k);
    for (long j = 0; j < cnt; ++j) out.push_back(1 + pk * j);
    return out;
}

// floor((X + sum c_i g_i)/d) with d | c_i splits as floor(X/d) + sum (c_i/d) g_i.
GammaBound simplify_bound(GammaBound b, SymbolTable& table) {
    if (b.div == 1) return b;
    for (long c : b.coeffs)
        if (c % b.div != 0) return b;
    for (auto& c : b.coeffs) c /= b.div;
    b.bound = table.reduce(b.bound, b.div, DivMode::Floor);
    b.div = 1;
    return b;
}

// Transformed Gamma region under gamma_j = a_j + nu * gamma'_j.
GammaRegion power_gamma(const GammaRegion& delta, const std::vector<long>& ord_reps, long nu,
                        SymbolTable& table) {
    GammaRegion out;
    for (std::size_t j = 0; j < delta.bounds.size(); ++j) {
        std::vector<GammaBound> conj;
        for (const GammaBound& b : delta.bounds[j]) {
            // old:  a_j + nu g'_j <= floor((X + sum c_i (a_i + nu g'_i)) / d)
            // new:  g'_j <= floor((X + sum c_i a_i - a_j d + nu sum c_i g'_i) / (d nu))
            long shift = -ord_reps[j] * b.div;
            for (std::size_t i = 0; i < b.coeffs.size(); ++i) shift += b.coeffs[i] * ord_reps[i];
            GammaBound nb;
            nb.bound = b.bound;
            nb.bound += shift;
            nb.div = b.div * nu;
            nb.coeffs.reserve(b.coeffs.size());
            for (long c : b.coeffs) nb.coeffs.push_back(c * nu);
            conj.push_back(simplify_bound(std::move(nb), table));
        }
        out.bounds.push_back(std::move(conj));
    }
    return out;
}

// Flip gamma coordinate j around its single bound B_j: x_j -> p^(B_j) / x_j.
// Rewrites the later bounds and the pending monomial, and appends the steps
// realizing the flip (mapping new coordinates to old) to `tail`.
void flip_gamma_coord(RectSet& base, ParamMonomial& bound, int j) {
    auto& conj = base.delta.bounds[static_cast<std::size_t>(j)];
    if (conj.size() != 1 || conj[0].div != 1)
        throw unsupported_spec(
            "cannot flip a gamma coordinate carrying composite bounds");
    GammaBound bj = conj[0];

    // rewrite later gamma bounds referencing gamma_j
    for (std::size_t jj = static_cast<std::size_t>(j) + 1; jj < base.delta.bounds.size(); ++jj) {
        for (auto& b : base.delta.bounds[jj]) {
            if (b.coeffs.size() <= static_cast<std::size_t>(j)) continue;
            long n = b.coeffs[static_cast<std::size_t>(j)];
            if (n == 0) continue;
            b.bound += bj.bound.scaled(n);
            for (std::size_t i = 0; i < bj.coeffs.size(); ++i)
                b.coeffs[i] += n * bj.coeffs[i];
            b.coeffs[static_cast<std::size_t>(j)] = -n;
        }
    }
    // rewrite the pending bound monomial
    long nu = bound.exps[static_cast<std::size_t>(j)];
    if (nu != 0) {
        bound.coeff += bj.bound.scaled(nu);
        for (std::size_t i = 0; i < bj.coeffs.size(); ++i) bound.exps[i] += nu * bj.coeffs[i];
        bound.exps[static_cast<std::size_t>(j)] = -nu;
    }
}

void rectify_e_impl(const ECellSpec& e, EmitCtx& E, const std::vector<Step>& post,
                    const PartPredicate& pred, const std::string& trace, int guard);

// ---------------------------------------------------------------------------
// Lower-bounded blocks: D = { (x, t) : ord t >= ord(bound(x)) } inside
// base x R^(k): the dual of the E-set induction.
// ---------------------------------------------------------------------------

struct DSpec {
    RectSet base;         // coordinates 0..m-2
    ParamMonomial bound;  // exponents over the base coordinates

    int m() const { return base.l + 1; }
    void validate() const {
        base.validate();
        if (bound.exps.size() != static_cast<std::size_t>(base.l))
            throw error("DSpec: bound arity mismatch");
    }
};

void rectify_d_impl(DSpec d, EmitCtx& E, const std::vector<Step>& post, PartPredicate pred,
                    const std::string& trace, int guard);

// Lift children built in dimension m-1 into dimension m: extend their steps,
// refine the appended R^(k) coordinate into cosets of the child's finer
// congruence level, then run `tail` steps followed by `post`.
void lift_append_coord(EmitCtx& E, std::vector<RectifiedPart>&& children, int m, int k_orig,
                       const std::vector<Step>& tail, const std::vector<Step>& post,
                       const std::string& suffix) {
    for (auto& child : children) {
        int kt = child.target.k;
        for (long u : angular_reps(*E.ctx, k_orig, kt)) {
            RectSet target = child.target;
            target.l += 1;
            std::vector<Step> steps =
                extend_steps(child.program.steps, static_cast<std::size_t>(m), *E.ctx);
            if (u != 1 || kt > k_orig) {
                StepF1 fix;
                fix.exps.assign(static_cast<std::size_t>(m), 1);
                for (int i = 0; i < m; ++i)
                    fix.alphas.push_back(
                        Scalar{PAdicApprox::from_long(*E.ctx, i == m - 1 ? u : 1)});
                steps.push_back(fix);
            }
            steps.insert(steps.end(), tail.begin(), tail.end());
            steps.insert(steps.end(), post.begin(), post.end());
            emit_part(E, std::move(target), std::move(steps), child.predicate,
                      child.case_trace + suffix);
        }
    }
}

std::vector<RectifiedPart> run_child(EmitCtx& E, const SetSpec& child_input,
                                     const std::function<void(EmitCtx&)>& body) {
    std::vector<RectifiedPart> children;
    EmitCtx childE = E;
    childE.out = &children;
    childE.tracked.clear();
    childE.strip_tc_for_certs = false;
    childE.cert_div = 1;
    childE.input = child_input;
    body(childE);
    return children;
}

// Gamma-coordinate flip with proper steps (helper above rewrites the data).
void flip_with_steps(RectSet& base, ParamMonomial& bound, int j, int ambient_dim,
                     std::vector<Step>& tail_steps, const PrimeContext& ctx) {
    auto& conj = base.delta.bounds[static_cast<std::size_t>(j)];
    if (conj.size() != 1 || conj[0].div != 1)
        throw unsupported_spec("cannot flip a gamma coordinate carrying composite bounds");
    GammaBound bj = conj[0];

    StepF1 invstep;
    invstep.exps.assign(static_cast<std::size_t>(ambient_dim), 1);
    invstep.exps[static_cast<std::size_t>(j)] = -1;
    for (int i = 0; i < ambient_dim; ++i)
        invstep.alphas.push_back(Scalar{PAdicApprox::from_long(ctx, 1)});
    StepF2 mulstep;
    mulstep.target = j;
    mulstep.coeff = bj.bound;
    mulstep.exps.assign(static_cast<std::size_t>(ambient_dim), 0);
    for (std::size_t i = 0; i < bj.coeffs.size(); ++i) mulstep.exps[i] = bj.coeffs[i];

    flip_gamma_coord(base, bound, j);

    tail_steps.push_back(invstep);
    tail_steps.push_back(mulstep);
}

void rectify_d_impl(DSpec d, EmitCtx& E, const std::vector<Step>& post, PartPredicate pred,
                    const std::string& trace, int guard) {
    if (guard > 64) throw error("rectify_d: recursion guard tripped");
    d.validate();
    const PrimeContext& ctx = *E.ctx;
    int m = d.m();
    int lp = d.base.lPrime;
    int k = d.base.k;
    int fiber = m - 1;

    // a vanishing coefficient makes the lower bound infinite: empty block
    for (const auto& term : d.bound.coeff.terms)
        pred = merge_pred(pred, {term.first}, {});

    // 1. flip gamma coordinates with negative exponents
    std::vector<Step> flips;
    for (int i = 0; i < lp - 1; ++i) {
        if (d.bound.exps[static_cast<std::size_t>(i)] < 0)
            flip_with_steps(d.base, d.bound, i, m, flips, ctx);
    }
    if (!flips.empty()) {
        std::vector<Step> post2 = flips;
        post2.insert(post2.end(), post.begin(), post.end());
        rectify_d_impl(d, E, post2, pred, trace + " [flip]", guard + 1);
        return;
    }

    // 2. window scan
    int wlo = lp - 1, whi = m - 2;
    if (wlo <= whi) {
        long nu_last = d.bound.exps[static_cast<std::size_t>(whi)];
        int nonzero = 0;
        int pick = -1;
        for (int i = wlo; i <= whi; ++i)
            if (d.bound.exps[static_cast<std::size_t>(i)] != 0) {
                ++nonzero;
                pick = i;
            }
        if (nonzero == 0) {
            // peel the last coordinate as a free factor
            DSpec inner;
            inner.base = d.base;
            inner.base.l -= 1;
            inner.bound = d.bound;
            inner.bound.exps.pop_back();
            auto children = run_child(E, SetSpec{inner.base}, [&](EmitCtx& CE) {
                rectify_d_impl(inner, CE, {}, pred, trace + " [d-peel]", guard + 1);
            });
            std::vector<Step> tail{Step{StepSwap{m - 2, m - 1}}};
            lift_append_coord(E, std::move(children), m, k, tail, post, " d-peel");
            return;
        }
        if (nonzero > 1)
            throw unsupported_spec(
                "lower-bounded block with several interacting free exponents");
        if (pick != whi) {
            std::swap(d.bound.exps[static_cast<std::size_t>(pick)],
                      d.bound.exps[static_cast<std::size_t>(whi)]);
            std::vector<Step> post2{Step{StepSwap{pick, whi}}};
            post2.insert(post2.end(), post.begin(), post.end());
            rectify_d_impl(d, E, post2, pred, trace + " [d-swap]", guard + 1);
            return;
        }
        long nu = nu_last;
        long absnu = nu < 0 ? -nu : nu;
        if (absnu > 1) {
            // residue partition; every coordinate except the window one is
            // raised to the |nu|-th power
            long e_nu = ord_p_long(ctx.p, absnu);
            int kt = std::max<int>(k, static_cast<int>(e_nu) + 1);
            int ktp = kt + static_cast<int>(e_nu);
            std::vector<std::vector<PAdicApprox>> choices(static_cast<std::size_t>(m));
            for (int i = 0; i < m; ++i) {
                std::vector<PAdicApprox> reps;
                if (i == whi) {
                    for (long u : angular_reps(ctx, k, kt))
                        reps.push_back(PAdicApprox::from_long(ctx, u));
                } else {
                    for (long a = 0; a < absnu; ++a)
                        for (long u : angular_reps(ctx, k, ktp))
                            reps.push_back(
                                PAdicApprox::from_long(ctx, u * pow_long(ctx.p, a)));
                }
                choices[static_cast<std::size_t>(i)] = std::move(reps);
            }
            std::vector<PAdicApprox> alpha(static_cast<std::size_t>(m), PAdicApprox());
            auto rec = [&](auto&& self, int i) -> void {
                if (i == m) {
                    std::vector<long> ord_reps;
                    for (int t = 0; t < m; ++t)
                        ord_reps.push_back(alpha[static_cast<std::size_t>(t)].valuation());
                    DSpec tilde;
                    tilde.base.k = kt;
                    tilde.base.lPrime = lp;
                    tilde.base.l = m - 1;
                    tilde.base.delta = power_gamma(d.base.delta, ord_reps, absnu, *E.table);
                    tilde.bound.exps = d.bound.exps;
                    tilde.bound.exps[static_cast<std::size_t>(whi)] = nu < 0 ? -1 : 1;
                    long shift = -ord_reps[static_cast<std::size_t>(fiber)];
                    for (int t = 0; t < whi; ++t)
                        shift += d.bound.exps[static_cast<std::size_t>(t)] *
                                 ord_reps[static_cast<std::size_t>(t)];
                    CoeffExpr inner = d.bound.coeff;
                    inner += shift;
                    tilde.bound.coeff = E.table->reduce(inner, absnu, DivMode::Ceil);

                    StepF1 power;
                    power.hensel = HenselData{absnu, kt, ktp};
                    for (int t = 0; t < m; ++t) {
                        power.alphas.push_back(Scalar{alpha[static_cast<std::size_t>(t)]});
                        power.exps.push_back(t == whi ? 1 : absnu);
                    }
                    std::vector<Step> post2{Step{power}};
                    post2.insert(post2.end(), post.begin(), post.end());
                    rectify_d_impl(tilde, E, post2, pred, trace + " [d-power]", guard + 1);
                    return;
                }
                for (const auto& g : choices[static_cast<std::size_t>(i)]) {
                    alpha[static_cast<std::size_t>(i)] = g;
                    self(self, i + 1);
                }
            };
            rec(rec, 0);
            return;
        }
        if (nu == 1) {
            // P1: ord t >= ord x_j; divide through and recurse
            {
                DSpec dd = d;
                dd.bound.exps[static_cast<std::size_t>(whi)] = 0;
                StepF2 shear;
                shear.target = fiber;
                shear.coeff = CoeffExpr::constant(0);
                shear.exps.assign(static_cast<std::size_t>(m), 0);
                shear.exps[static_cast<std::size_t>(whi)] = 1;
                std::vector<Step> post2{Step{shear}};
                post2.insert(post2.end(), post.begin(), post.end());
                rectify_d_impl(dd, E, post2, pred, trace + " [d-P1]", guard + 1);
            }
            // P2: t < ord x_j <= t - L0: the deficit of x_j over t+1 is a
            // bounded coordinate A with ord A <= -L0 - 1
            {
                RectSet target;
                target.k = k;
                target.lPrime = lp + 1;
                target.l = m;
                target.delta = d.base.delta;
                GammaBound cut;
                cut.bound = d.bound.coeff.negated();
                cut.bound += -1;
                for (int i = 0; i < lp - 1; ++i)
                    cut.coeffs.push_back(-d.bound.exps[static_cast<std::size_t>(i)]);
                target.delta.push_coordinate(cut);

                StepF2 mk;
                mk.target = lp - 1;  // the A slot becomes x_j = A * p * t
                mk.coeff = CoeffExpr::constant(1);
                mk.exps.assign(static_cast<std::size_t>(m), 0);
                mk.exps[static_cast<std::size_t>(m - 1)] = 1;
                std::vector<Step> steps{Step{mk}};
                for (int pos = lp - 1; pos < m - 2; ++pos)
                    steps.push_back(StepSwap{pos, pos + 1});
                steps.insert(steps.end(), post.begin(), post.end());
                emit_part(E, std::move(target), std::move(steps), pred, trace + " [d-P2]");
            }
            return;
        }
        // nu == -1
        {
            // Q1: ord x_j >= ord(bound): the fiber condition is vacuous
            DSpec inner;
            inner.base = d.base;
            inner.base.l -= 1;
            inner.bound = d.bound;
            inner.bound.exps.pop_back();
            auto children = run_child(E, SetSpec{inner.base}, [&](EmitCtx& CE) {
                rectify_d_impl(inner, CE, {}, pred, trace + " [d-Q1]", guard + 1);
            });
            lift_append_coord(E, std::move(children), m, k, {}, post, " d-Q1");
        }
        {
            // Q2: ord x_j <= ord(bound) - 1, fiber sheared by bound / x_j
            RectSet target;
            target.k = k;
            target.lPrime = lp + 1;
            target.l = m;
            target.delta = d.base.delta;
            GammaBound cut;
            cut.bound = d.bound.coeff;
            cut.bound += -1;
            for (int i = 0; i < lp - 1; ++i)
                cut.coeffs.push_back(d.bound.exps[static_cast<std::size_t>(i)]);
            target.delta.push_coordinate(cut);

            StepF2 shear;
            shear.target = fiber;
            shear.coeff = d.bound.coeff;
            shear.exps.assign(static_cast<std::size_t>(m), 0);
            for (int i = 0; i < lp - 1; ++i)
                shear.exps[static_cast<std::size_t>(i)] =
                    d.bound.exps[static_cast<std::size_t>(i)];
            shear.exps[static_cast<std::size_t>(lp - 1)] = -1;  // the W slot
            std::vector<Step> steps{Step{shear}};
            for (int pos = lp - 1; pos < m - 2; ++pos) steps.push_back(StepSwap{pos, pos + 1});
            steps.insert(steps.end(), post.begin(), post.end());
            emit_part(E, std::move(target), std::move(steps), pred, trace + " [d-Q2]");
        }
        return;
    }

    // 3. window empty: the bound involves gamma coordinates and the
    // coefficient only
    bool any_gamma = false;
    int J = -1;
    for (int i = 0; i < lp - 1; ++i)
        if (d.bound.exps[static_cast<std::size_t>(i)] != 0) {
            any_gamma = true;
            J = i;
        }
    if (!any_gamma) {
        // constant bound C: free on {C <= 0}, sheared on {C >= 1}; for a
        // concrete constant only the matching branch exists
        bool is_const = d.bound.coeff.is_constant();
        if (!is_const || d.bound.coeff.offset <= 0) {
            RectSet target = d.base;
            target.l = m;
            PartPredicate p1 = is_const ? pred : with_cond(pred, d.bound.coeff, 0, false);
            emit_part(E, std::move(target), post, p1, trace + " [d-free]");
        }
        if (!is_const || d.bound.coeff.offset >= 1) {
            RectSet target = d.base;
            target.l = m;
            StepF2 shear;
            shear.target = fiber;
            shear.coeff = d.bound.coeff;
            shear.exps.assign(static_cast<std::size_t>(m), 0);
            std::vector<Step> steps{Step{shear}};
            steps.insert(steps.end(), post.begin(), post.end());
            PartPredicate p2 = is_const ? pred : with_cond(pred, d.bound.coeff, 1, true);
            emit_part(E, std::move(target), std::move(steps), p2, trace + " [d-shift]");
        }
        return;
    }

    // some gamma exponent is positive (negatives were flipped away)
    long nuJ = d.bound.exps[static_cast<std::size_t>(J)];
    {
        // region piece where the bound order is <= 0: the fiber is free
        RectSet target = d.base;
        target.l = m;
        GammaBound cut;
        cut.bound = d.bound.coeff.negated();
        cut.div = nuJ;
        for (int i = 0; i < J; ++i)
            cut.coeffs.push_back(-d.bound.exps[static_cast<std::size_t>(i)]);
        target.delta.bounds[static_cast<std::size_t>(J)].push_back(cut);
        emit_part(E, std::move(target), post, pred, trace + " [d-gfree]");
    }
    {
        // complementary piece: flip gamma_J, cut, and shear the fiber
        DSpec dd = d;
        std::vector<Step> tail;
        flip_with_steps(dd.base, dd.bound, J, m, tail, ctx);
        GammaBound cut;
        // nu_J gamma'_J <= C - 1 + nu_J B_J + sum_{i<J} (nu_i + nu_J b_i) g_i
        const GammaBound& bj = dd.base.delta.bounds[static_cast<std::size_t>(J)][0];
        cut.bound = d.bound.coeff;
        cut.bound += -1;
        cut.bound += bj.bound.scaled(nuJ);
        cut.div = nuJ;
        for (int i = 0; i < J; ++i) {
            long bi = static_cast<std::size_t>(i) < bj.coeffs.size() ? bj.coeffs[i] : 0;
            cut.coeffs.push_back(d.bound.exps[static_cast<std::size_t>(i)] + nuJ * bi);
        }
        RectSet target = dd.base;
        target.l = m;
        target.delta.bounds[static_cast<std::size_t>(J)].push_back(cut);

        StepF2 shear;
        shear.target = fiber;
        shear.coeff = dd.bound.coeff;
        shear.exps.assign(static_cast<std::size_t>(m), 0);
        for (int i = 0; i < lp - 1; ++i)
            shear.exps[static_cast<std::size_t>(i)] = dd.bound.exps[static_cast<std::size_t>(i)];
        std::vector<Step> steps{Step{shear}};
        steps.insert(steps.end(), tail.begin(), tail.end());
        steps.insert(steps.end(), post.begin(), post.end());
        emit_part(E, std::move(target), std::move(steps), pred, trace + " [d-gshift]");
    }
}

// ---------------------------------------------------------------------------
// E-sets
// ---------------------------------------------------------------------------

// All-window-exponents-negative (or empty window) case: the final bound and
// its implied prefix bounds are absorbed into the Gamma region; no maps.
void absorb_into_gamma(const ECellSpec& e, EmitCtx& E, const std::vector<Step>& post,
                       const PartPredicate& pred, const std::string& trace) {
    int m = e.m();
    int mp = e.base.lPrime;
    RectSet target;
    target.k = e.base.k;
    target.l = m;
    target.lPrime = m + 1;
    target.delta = e.base.delta;
    for (int i = mp - 1; i <= m - 1; ++i) {
        GammaBound gb;
        gb.bound = e.bound.coeff;
        gb.coeffs.assign(e.bound.exps.begin(), e.bound.exps.begin() + i);
        target.delta.push_coordinate(std::move(gb));
    }
    emit_part(E, std::move(target), post, pred, trace + " absorb");
}

void rectify_e_impl(const ECellSpec& e, EmitCtx& E, const std::vector<Step>& post,
                    const PartPredicate& pred, const std::string& trace, int guard) {
    if (guard > 64) throw error("rectify_e: recursion guard tripped");
    e.validate();
    const PrimeContext& ctx = *E.ctx;
    int m = e.m();
    int mp = e.base.lPrime;
    int k = e.base.k;

    // Empty window: fold the bound into the Gamma region.
    if (mp == m) {
        absorb_into_gamma(e, E, post, pred, trace + " [m'=m]");
        return;
    }

    long nu_last = e.bound.exps[static_cast<std::size_t>(m - 2)];

    if (nu_last == 0) {
        // peel the last base coordinate as a free factor
        ECellSpec inner;
        inner.base = e.base;
        inner.base.l -= 1;
        inner.bound = e.bound;
        inner.bound.exps.pop_back();
        auto children = run_child(E, SetSpec{inner}, [&](EmitCtx& CE) {
            rectify_e_impl(inner, CE, {}, pred, trace + " [nu=0]", guard + 1);
        });
        std::vector<Step> tail{Step{StepSwap{m - 2, m - 1}}};
        lift_append_coord(E, std::move(children), m, k, tail, post, " peel");
        return;
    }

    if (nu_last < 0) {
        // Bring a positive exponent (or failing that a zero) into the last
        // slot; with neither the set is bounded and absorbed outright.
        int pick = -1;
        for (int i = m - 2; i >= mp - 1; --i) {
            long v = e.bound.exps[static_cast<std::size_t>(i)];
            if (v > 0) {
                pick = i;
                break;
            }
            if (v == 0 && pick < 0) pick = i;
        }
        if (pick < 0) {
            absorb_into_gamma(e, E, post, pred, trace + " [all nu<0]");
            return;
        }
        ECellSpec swapped = e;
        std::swap(swapped.bound.exps[static_cast<std::size_t>(pick)],
                  swapped.bound.exps[static_cast<std::size_t>(m - 2)]);
        std::vector<Step> post2{Step{StepSwap{pick, m - 2}}};
        post2.insert(post2.end(), post.begin(), post.end());
        rectify_e_impl(swapped, E, post2, pred, trace + " [swap]", guard + 1);
        return;
    }

    if (nu_last == 1) {
        // E1: the bound without the last base coordinate already dominates.
        {
            ECellSpec e1;
            e1.base = e.base;
            e1.base.l -= 1;
            e1.bound = e.bound;
            e1.bound.exps.pop_back();
            auto children = run_child(E, SetSpec{e1}, [&](EmitCtx& CE) {
                rectify_e_impl(e1, CE, {}, pred, trace + " [nu=1 E1]", guard + 1);
            });
            std::vector<Step> tail{Step{StepSwap{m - 2, m - 1}}};
            lift_append_coord(E, std::move(children), m, k, tail, post, "");
        }
        // E2: strictly between the reduced and the full bound. Parametrized
        // through the lower-bounded block D = { ord x_{m-1} > ord(beta
        // prod x^nu) } via (x, a, c) -> (x, a c / (beta prod x^nu), a).
        {
            DSpec dd;
            dd.base = e.base;
            dd.base.l -= 1;
            dd.bound.coeff = e.bound.coeff;
            dd.bound.coeff += 1;  // strict lower bound
            dd.bound.exps.assign(e.bound.exps.begin(), e.bound.exps.end() - 1);
            auto children = run_child(E, SetSpec{dd.base}, [&](EmitCtx& CE) {
                rectify_d_impl(dd, CE, {}, pred, trace + " [nu=1 E2]", guard + 1);
            });
            StepF2 phi2;
            phi2.target = m - 2;
            phi2.coeff = e.bound.coeff.negated();
            phi2.exps.assign(static_cast<std::size_t>(m), 0);
            for (int i = 0; i <= m - 3; ++i)
                phi2.exps[static_cast<std::size_t>(i)] =
                    -e.bound.exps[static_cast<std::size_t>(i)];
            phi2.exps[static_cast<std::size_t>(m - 1)] = 1;
            std::vector<Step> tail{Step{StepSwap{m - 2, m - 1}}, Step{phi2}};
            lift_append_coord(E, std::move(children), m, k, tail, post, "");
        }
        return;
    }

    // nu_last > 1: residue partition and power maps bring the exponent to 1.
    long nu = nu_last;
    long e_nu = ord_p_long(ctx.p, nu);
    int kt = std::max<int>(k, static_cast<int>(e_nu) + 1);
    int ktp = kt + static_cast<int>(e_nu);

    std::vector<std::vector<PAdicApprox>> choices(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        std::vector<PAdicApprox> reps;
        if (i == m - 2) {
            for (long u : angular_reps(ctx, k, kt))
                reps.push_back(PAdicApprox::from_long(ctx, u));
        } else {
            for (long a = 0; a < nu; ++a)
                for (long u : angular_reps(ctx, k, ktp))
                    reps.push_back(PAdicApprox::from_long(ctx, u * pow_long(ctx.p, a)));
        }
        choices[static_cast<std::size_t>(i)] = std::move(reps);
    }

    std::vector<PAdicApprox> alpha(static_cast<std::size_t>(m), PAdicApprox());
    auto rec = [&](auto&& self, int i) -> void {
        if (i == m) {
            std::vector<long> ord_reps;
            for (int t = 0; t < m; ++t)
                ord_reps.push_back(alpha[static_cast<std::size_t>(t)].valuation());
            ECellSpec tilde;
            tilde.base.k = kt;
            tilde.base.lPrime = mp;
            tilde.base.l = m - 1;
            tilde.base.delta = power_gamma(e.base.delta, ord_reps, nu, *E.table);
            tilde.bound.exps = e.bound.exps;
            tilde.bound.exps[static_cast<std::size_t>(m - 2)] = 1;
            long shift = -ord_reps[static_cast<std::size_t>(m - 1)];
            for (int t = 0; t <= m - 3; ++t)
                shift += e.bound.exps[static_cast<std::size_t>(t)] *
                         ord_reps[static_cast<std::size_t>(t)];
            CoeffExpr inner = e.bound.coeff;
            inner += shift;
            tilde.bound.coeff = E.table->reduce(inner, nu, DivMode::Floor);

            StepF1 power;
            power.hensel = HenselData{nu, kt, ktp};
            for (int t = 0; t < m; ++t) {
                power.alphas.push_back(Scalar{alpha[static_cast<std::size_t>(t)]});
                power.exps.push_back(t == m - 2 ? 1 : nu);
            }
            std::vector<Step> post2{Step{power}};
            post2.insert(post2.end(), post.begin(), post.end());
            rectify_e_impl(tilde, E, post2, pred, trace + " [nu>1]", guard + 1);
            return;
        }
        for (const auto& c : choices[static_cast<std::size_t>(i)]) {
            alpha[static_cast<std::size_t>(i)] = c;
            self(self, i + 1);
        }
    };
    rec(rec, 0);
}

// Split off the strata where the bound coefficient vanishes (the constraint
// disappears), then assume it nonzero.
void rectify_e_entry(const ECellSpec& e, EmitCtx& E, const std::vector<Step>& post,
                     PartPredicate pred, const std::string& trace, bool assume_nonzero) {
    std::vector<std::string> pos, neg;
    for (const auto& [name, c] : e.bound.coeff.terms) (c > 0 ? pos : neg).push_back(name);
    if (!assume_nonzero) {
        std::vector<std::string> earlier;
        for (const auto& s : pos) {
            PartPredicate p1 = merge_pred(pred, earlier, {s});
            p1 = merge_pred(p1, neg, {});
            RectSet target = e.base;
            target.l = e.m();
            std::vector<Step> steps = post;
            emit_part(E, std::move(target), std::move(steps), p1, trace + " [S1 " + s + "=0]");
            earlier.push_back(s);
        }
    }
    PartPredicate p2 = merge_pred(pred, pos, {});
    p2 = merge_pred(p2, neg, {});
    rectify_e_impl(e, E, post, p2, trace, 0);
}

}  // namespace

std::vector<RectifiedPart> rectify_e(const ECellSpec& e, const std::vector<ParamMonomial>& tracked,
                                     SymbolTable& table, const PrimeContext& ctx) {
    e.validate();
    std::vector<RectifiedPart> out;
    EmitCtx E;
    E.input = e;
    E.tracked = tracked;
    E.strip_tc_for_certs = false;
    E.cert_div = 1;
    E.table = &table;
    E.ctx = &ctx;
    E.out = &out;
    for (const auto& t : tracked)
        if (t.exps.size() != static_cast<std::size_t>(e.m()))
            throw error("rectify_e: tracked monomial arity mismatch");
    rectify_e_entry(e, E, {}, PartPredicate{}, "E", false);
    return out;
}

// ---------------------------------------------------------------------------
// Cell driver
// ---------------------------------------------------------------------------

namespace {

PAdicApprox normalize_lambda(const PrimeContext& ctx, const PAdicApprox& lam, long n) {
    if (lam.is_zero()) return lam;
    long v = lam.valuation();
    long vn = ((v % n) + n) % n;
    if (vn == v) return lam;
    return PAdicApprox::from_unit(ctx, vn, lam.unit_residue(ctx, lam.known_digits()),
                                  lam.known_digits());
}

void rectify_cell_impl(const GeneralCell& cell, EmitCtx& E, const std::vector<Step>& post,
                       PartPredicate pred, const std::string& trace, int guard) {
    if (guard > 8) throw error("rectify_cell: recursion guard tripped");
    cell.validate();
    const PrimeContext& ctx = *E.ctx;
    int m = cell.m();
    int fiber = m;  // 0-based index of t

    // 1. centering: all further work happens on the translated cell; the
    // translation is appended as the program's last step.
    std::vector<Step> post2 = post;
    if (!cell.center_is_zero) {
        StepTc tc;
        tc.target = fiber;
        tc.center = cell.center;
        tc.dominance = TcDominance::None;
        post2.insert(post2.begin(), tc);
    }

    // 2. lambda = 0: the fiber is pinned to the center.
    if (cell.lambda.is_zero()) {
        if (cell.upper) return;  // ord(0) can never be <= a finite bound
        RectSet target = cell.base;
        std::vector<Step> steps{Step{StepF0{fiber}}};
        steps.insert(steps.end(), post2.begin(), post2.end());
        emit_part(E, std::move(target), std::move(steps), pred, trace + " [lambda=0]");
        return;
    }

    // 3. stratify on the upper coefficient: where it vanishes the upper
    // constraint disappears entirely.
    if (cell.upper) {
        std::vector<std::string> pos, neg;
        for (const auto& term : cell.upper->coeff.terms)
            (term.second > 0 ? pos : neg).push_back(term.first);
        std::vector<std::string> earlier;
        for (const auto& s : pos) {
            GeneralCell free_cell = cell;
            free_cell.center = ParamMonomial::one(static_cast<std::size_t>(m));
            free_cell.center_is_zero = true;
            free_cell.upper.reset();
            PartPredicate p1 = merge_pred(pred, earlier, {s});
            p1 = merge_pred(p1, neg, {});
            rectify_cell_impl(free_cell, E, post2, p1, trace + " [S1 " + s + "=0]", guard + 1);
            earlier.push_back(s);
        }
        pred = merge_pred(pred, pos, {});
        pred = merge_pred(pred, neg, {});
    }

    // 4. bound normalization toward "lower present".
    if (!cell.lower && cell.upper) {
        GeneralCell inv_cell = cell;
        inv_cell.center = ParamMonomial::one(static_cast<std::size_t>(m));
        inv_cell.center_is_zero = true;
        ParamMonomial lower;
        lower.coeff = cell.upper->coeff.negated();
        lower.exps = cell.upper->exps;
        for (auto& v : lower.exps) v = -v;
        inv_cell.lower = lower;
        inv_cell.upper.reset();
        inv_cell.lambda = normalize_lambda(ctx, inv(ctx, cell.lambda), cell.n);
        StepF1 invstep;
        invstep.exps.assign(static_cast<std::size_t>(m + 1), 1);
        invstep.exps[static_cast<std::size_t>(fiber)] = -1;
        for (int i = 0; i <= m; ++i)
            invstep.alphas.push_back(Scalar{PAdicApprox::from_long(ctx, 1)});
        std::vector<Step> post3{Step{invstep}};
        post3.insert(post3.end(), post2.begin(), post2.end());
        rectify_cell_impl(inv_cell, E, post3, pred, trace + " [invert]", guard + 1);
        return;
    }
    if (!cell.lower && !cell.upper) {
        // split the free coset at ord(lambda)
        GeneralCell lowcell = cell;
        lowcell.center = ParamMonomial::one(static_cast<std::size_t>(m));
        lowcell.center_is_zero = true;
        ParamMonomial at;
        at.coeff = CoeffExpr::constant(cell.lambda.valuation());
        at.exps.assign(static_cast<std::size_t>(m), 0);
        lowcell.lower = at;
        rectify_cell_impl(lowcell, E, post2, pred, trace + " [split>=]", guard + 1);
        GeneralCell hicell = lowcell;
        hicell.lower.reset();
        ParamMonomial upto;
        upto.coeff = CoeffExpr::constant(cell.lambda.valuation() - cell.n);
        upto.exps.assign(static_cast<std::size_t>(m), 0);
        hicell.upper = upto;
        rectify_cell_impl(hicell, E, post2, pred, trace + " [split<]", guard + 1);
        return;
    }

    // lower bound present from here on; its coefficient must not vanish on
    // the stratum (an infinite lower bound empties the fiber).
    for (const auto& term : cell.lower->coeff.terms)
        pred = merge_pred(pred, {term.first}, {});

    // 5. residue partition and power maps: every coordinate is raised to the
    // n-th power; the fiber coset collapses onto K^(kbar).
    long n = cell.n;
    long e_n = n == 1 ? 0 : ord_p_long(ctx.p, n);
    int k = cell.base.k;
    int kbar = std::max<int>(k, static_cast<int>(e_n) + 1);
    int kprime = kbar + static_cast<int>(e_n);

    std::vector<long> fiber_reps;
    {
        long pk = pow_long(ctx.p, kprime);
        long lam =
            cell.lambda.unit_residue(ctx, std::min<int>(cell.lambda.known_digits(), kprime))
                .get_si();
        std::set<long> seen;
        for (long w = 1; w < pk; ++w) {
            if (w % ctx.p == 0) continue;
            long wn = 1;
            for (long i = 0; i < n; ++i) wn = (wn * w) % pk;
            seen.insert((lam * wn) % pk);
        }
        fiber_reps.assign(seen.begin(), seen.end());
    }

    std::vector<std::vector<PAdicApprox>> choices(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i < m; ++i) {
        std::vector<PAdicApprox> reps;
        for (long a = 0; a < n; ++a)
            for (long u : angular_reps(ctx, k, kprime))
                reps.push_back(PAdicApprox::from_long(ctx, u * pow_long(ctx.p, a)));
        choices[static_cast<std::size_t>(i)] = std::move(reps);
    }
    {
        std::vector<PAdicApprox> reps;
        for (long r : fiber_reps)
            reps.push_back(
                PAdicApprox::from_long(ctx, r * pow_long(ctx.p, cell.lambda.valuation())));
        choices[static_cast<std::size_t>(fiber)] = std::move(reps);
    }

    std::vector<PAdicApprox> gamma(static_cast<std::size_t>(m) + 1, PAdicApprox());
    auto rec = [&](auto&& self, int i) -> void {
        if (i == m + 1) {
            std::vector<long> ord_reps;
            for (int t = 0; t <= m; ++t)
                ord_reps.push_back(gamma[static_cast<std::size_t>(t)].valuation());

            StepF1 power;
            power.hensel = HenselData{n, kbar, kprime};
            for (int t = 0; t <= m; ++t) {
                power.alphas.push_back(Scalar{gamma[static_cast<std::size_t>(t)]});
                power.exps.push_back(n);
            }
            std::vector<Step> post3{Step{power}};
            post3.insert(post3.end(), post2.begin(), post2.end());

            auto reduce_bound = [&](const ParamMonomial& b, DivMode mode) {
                long shift = -ord_reps[static_cast<std::size_t>(fiber)];
                for (int t = 0; t < m; ++t)
                    shift += b.exps[static_cast<std::size_t>(t)] *
                             ord_reps[static_cast<std::size_t>(t)];
                CoeffExpr inner = b.coeff;
                inner += shift;
                return E.table->reduce(inner, n, mode);
            };
            CoeffExpr lower_coeff = reduce_bound(*cell.lower, DivMode::Ceil);

            GammaRegion delta = power_gamma(cell.base.delta, ord_reps, n, *E.table);

            StepF2 shear;
            shear.target = fiber;
            shear.coeff = lower_coeff;
            shear.exps.assign(static_cast<std::size_t>(m) + 1, 0);
            for (int t = 0; t < m; ++t)
                shear.exps[static_cast<std::size_t>(t)] =
                    cell.lower->exps[static_cast<std::size_t>(t)];
            std::vector<Step> steps{Step{shear}};
            steps.insert(steps.end(), post3.begin(), post3.end());

            if (!cell.upper) {
                RectSet target;
                target.k = kbar;
                target.lPrime = cell.base.lPrime;
                target.l = m + 1;
                target.delta = delta;
                emit_part(E, std::move(target), std::move(steps), pred, trace + " [cell free]");
                return;
            }
            CoeffExpr upper_coeff = reduce_bound(*cell.upper, DivMode::Floor);
            ECellSpec esp;
            esp.base.k = kbar;
            esp.base.lPrime = cell.base.lPrime;
            esp.base.l = m;
            esp.base.delta = delta;
            esp.bound.coeff = upper_coeff;
            esp.bound.coeff += lower_coeff.negated();
            esp.bound.exps.resize(static_cast<std::size_t>(m));
            for (int t = 0; t < m; ++t)
                esp.bound.exps[static_cast<std::size_t>(t)] =
                    cell.upper->exps[static_cast<std::size_t>(t)] -
                    cell.lower->exps[static_cast<std::size_t>(t)];
            rectify_e_entry(esp, E, steps, pred, trace + " [cell->E]", true);
            return;
        }
        for (const auto& g : choices[static_cast<std::size_t>(i)]) {
            gamma[static_cast<std::size_t>(i)] = g;
            self(self, i + 1);
        }
    };
    rec(rec, 0);
}

}  // namespace

std::vector<RectifiedPart> rectify_cell(const GeneralCell& cell,
                                        const std::vector<ParamMonomial>& tracked,
                                        SymbolTable& table, const PrimeContext& ctx) {
    cell.validate();
    for (const auto& t : tracked)
        if (t.exps.size() != static_cast<std::size_t>(cell.m()) + 1)
            throw error("rectify_cell: tracked monomial arity mismatch");
    std::vector<RectifiedPart> out;
    EmitCtx E;
    E.input = cell;
    E.tracked = tracked;
    E.strip_tc_for_certs = !cell.center_is_zero;
    E.cert_div = cell.n;
    E.table = &table;
    E.ctx = &ctx;
    E.out = &out;
    rectify_cell_impl(cell, E, {}, PartPredicate{}, "C", 0);
    return out;
}

std::vector<RectifiedPart> rectify(const SetSpec& set, const std::vector<ParamMonomial>& tracked,
                                   SymbolTable& table, const PrimeContext& ctx) {
    if (const auto* r = std::get_if<RectSet>(&set)) {
        std::vector<RectifiedPart> out;
        EmitCtx E;
        E.input = *r;
        E.tracked = tracked;
        E.table = &table;
        E.ctx = &ctx;
        E.out = &out;
        emit_part(E, *r, {}, PartPredicate{}, "R identity");
        return out;
    }
    if (const auto* e = std::get_if<ECellSpec>(&set)) return rectify_e(*e, tracked, table, ctx);
    return rectify_cell(std::get<GeneralCell>(set), tracked, table, ctx);
}

// ---------------------------------------------------------------------------
// Serialization and audit
// ---------------------------------------------------------------------------

namespace {

json predicate_to_json(const PartPredicate& pred) {
    json pj{{"nonzero", pred.require_nonzero}, {"zero", pred.require_zero}};
    if (!pred.ord_conds.empty()) {
        json oc = json::array();
        for (const auto& c : pred.ord_conds)
            oc.push_back(json{{"expr", coeff_to_json(c.expr)},
                              {"c", c.c},
                              {"kind", c.at_least ? "ge" : "le"}});
        pj["ords"] = oc;
    }
    return pj;
}

PartPredicate predicate_from_json(const json& pj, const std::string& path) {
    PartPredicate pred;
    for (const auto& s : pj.value("nonzero", std::vector<std::string>{}))
        pred.require_nonzero.push_back(s);
    for (const auto& s : pj.value("zero", std::vector<std::string>{}))
        pred.require_zero.push_back(s);
    if (pj.contains("ords")) {
        for (const auto& c : pj.at("ords")) {
            OrdCond oc;
            oc.expr = coeff_from_json(c.at("expr"), path + "/ords/expr");
            oc.c = c.at("c").get<long>();
            oc.at_least = c.value("kind", "ge") == "ge";
            pred.ord_conds.push_back(oc);
        }
    }
    return pred;
}

}  // namespace

json parts_to_json(const std::vector<RectifiedPart>& parts, const SymbolTable& table,
                   const PrimeContext& ctx) {
    json out = symbols_to_json(table);
    out["schema"] = "rectint-parts/1";
    out["p"] = ctx.p;
    out["precision"] = ctx.precision;
    json arr = json::array();
    for (const auto& part : parts) {
        json pj;
        pj["target"] = rectset_to_json(part.target);
        pj["program"] = program_to_json(part.program);
        pj["predicate"] = predicate_to_json(part.predicate);
        json certs = json::array();
        for (const auto& c : part.certificates) certs.push_back(monomial_to_json(c));
        pj["certs"] = certs;
        pj["trace"] = part.case_trace;
        arr.push_back(pj);
    }
    out["parts"] = arr;
    return out;
}

std::vector<RectifiedPart> parts_from_json(const json& j, SymbolTable& table,
                                           const PrimeContext& ctx) {
    if (j.value("schema", "") != "rectint-parts/1")
        throw schema_error("expected rectint-parts/1", "/schema");
    symbols_from_json(j, table);
    std::vector<RectifiedPart> parts;
    std::size_t idx = 0;
    for (const auto& pj : j.at("parts")) {
        std::string path = "/parts/" + std::to_string(idx++);
        RectifiedPart part;
        part.target = rectset_from_json(pj.at("target"), path + "/target");
        part.program = program_from_json(pj.at("program"), ctx, path + "/program");
        if (pj.contains("predicate"))
            part.predicate = predicate_from_json(pj.at("predicate"), path + "/predicate");
        for (const auto& c : pj.at("certs"))
            part.certificates.push_back(monomial_from_json(c, path + "/certs"));
        part.case_trace = pj.value("trace", "");
        parts.push_back(std::move(part));
    }
    return parts;
}

std::string parts_audit_log(const std::vector<RectifiedPart>& parts) {
    std::ostringstream os;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto& p = parts[i];
        os << "part " << i << ": " << p.case_trace << "\n";
        os << "  target: R^(" << p.target.k << ")  l'=" << p.target.lPrime
           << " l=" << p.target.l << "\n";
        if (!p.predicate.require_nonzero.empty() || !p.predicate.require_zero.empty() ||
            !p.predicate.ord_conds.empty()) {
            os << "  stratum:";
            for (const auto& s : p.predicate.require_nonzero) os << " " << s << "!=0";
            for (const auto& s : p.predicate.require_zero) os << " " << s << "=0";
            for (const auto& c : p.predicate.ord_conds)
                os << " ord(.)" << (c.at_least ? ">=" : "<=") << c.c;
            os << "\n";
        }
        os << describe_program(p.program);
    }
    return os.str();
}

}  // namespace rectint
