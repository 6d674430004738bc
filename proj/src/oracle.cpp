#include "rectint/oracle.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

namespace rectint {

namespace {

using u64 = std::uint64_t;

u64 pow_u64(u64 b, long e) {
    u64 r = 1;
    for (long i = 0; i < e; ++i) r *= b;
    return r;
}

u64 mulmod(u64 a, u64 b, u64 m) { return (a * b) % m; }  // moduli stay tiny

u64 invmod(u64 a, u64 m) {
    long long t = 0, newt = 1;
    long long r = static_cast<long long>(m), newr = static_cast<long long>(a % m);
    while (newr != 0) {
        long long q = r / newr;
        long long tmp = t - q * newt;
        t = newt;
        newt = tmp;
        tmp = r - q * newr;
        r = newr;
        newr = tmp;
    }
    if (r != 1) throw error("invmod: not invertible");
    if (t < 0) t += static_cast<long long>(m);
    return static_cast<u64>(t);
}

u64 powmod(u64 b, long e, u64 m) {
    if (m == 1) return 0;
    bool inverse = e < 0;
    unsigned long ee = static_cast<unsigned long>(inverse ? -e : e);
    b %= m;
    u64 r = 1;
    while (ee) {
        if (ee & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        ee >>= 1;
    }
    return inverse ? invmod(r, m) : r;
}

mpq_class q_pow(long q, long e) {
    mpz_class num;
    mpz_ui_pow_ui(num.get_mpz_t(), static_cast<unsigned long>(q),
                  static_cast<unsigned long>(e < 0 ? -e : e));
    if (e >= 0) return mpq_class(num);
    mpq_class r(1);
    r /= num;
    return r;
}

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

// Units congruent to 1 mod p^k, enumerated mod p^depth.
std::vector<u64> rk_units(const PrimeContext& ctx, int k, int depth) {
    u64 pk = pow_u64(ctx.p, k);
    u64 pd = pow_u64(ctx.p, depth);
    std::vector<u64> out;
    for (u64 r = 1; r < pd; r += pk) out.push_back(r);
    if (out.empty()) out.push_back(1);
    return out;
}

std::set<u64> nth_power_units(const PrimeContext& ctx, long n, int j) {
    u64 pj = pow_u64(ctx.p, j);
    std::set<u64> out;
    for (u64 w = 1; w < pj; ++w) {
        if (w % ctx.p == 0) continue;
        out.insert(powmod(w, n, pj));
    }
    return out;
}

struct OrdWindow {
    long lo = 0, hi = -1;  // inclusive; empty when lo > hi
};

struct ScalarData {
    long ord;
    u64 unit;
    int depth;
};

ScalarData scalar_data(const Scalar& s, const SymbolTable& table, const ParamInstance& inst,
                       const PrimeContext& ctx) {
    if (const auto* v = std::get_if<PAdicApprox>(&s)) {
        if (v->is_zero()) throw error("zero scalar in F1 step");
        int d = v->known_digits();
        return {v->valuation(), static_cast<u64>(v->unit_residue(ctx, d).get_ui()), d};
    }
    OrdValue o = table.eval(std::get<CoeffExpr>(s), inst);
    if (o.infinite) throw unsupported_spec("F1 scalar has infinite order under instance");
    return {o.v, 1, 1 << 20};  // order-only: angular part normalized to 1
}

}  // namespace

mpq_class class_measure(const PointClass& c, long q) {
    mpq_class m(1);
    for (const auto& cc : c) {
        if (cc.zero) return mpq_class(0);
        m *= q_pow(q, -(cc.v + cc.depth));
    }
    return m;
}

// ---------------------------------------------------------------------------
// Exact image of a product class under one step, or undecidable_at_depth.
// ---------------------------------------------------------------------------

static PointClass apply_step_class(const Step& s, const SymbolTable& table,
                                   const ParamInstance& inst, const PrimeContext& ctx,
                                   const PointClass& c) {
    PointClass y = c;
    if (const auto* f0 = std::get_if<StepF0>(&s)) {
        y.insert(y.begin() + f0->pos, CoordClass{true, 0, 1, 1});
        return y;
    }
    if (const auto* sw = std::get_if<StepSwap>(&s)) {
        std::swap(y[static_cast<std::size_t>(sw->i)], y[static_cast<std::size_t>(sw->j)]);
        return y;
    }
    if (const auto* f1 = std::get_if<StepF1>(&s)) {
        for (std::size_t i = 0; i < c.size(); ++i) {
            long a = f1->exps[i];
            if (c[i].zero) {
                if (a < 0) throw domain_violation("class power: inverting a zero coordinate");
                continue;
            }
            ScalarData al = scalar_data(f1->alphas[i], table, inst, ctx);
            long ea = ord_p_long(ctx.p, a);
            if (c[i].depth <= ea)
                throw undecidable_at_depth("class power map needs depth > ord(exponent)");
            int nd = static_cast<int>(std::min<long>(c[i].depth + ea, al.depth));
            u64 mod = pow_u64(ctx.p, nd);
            u64 unit = mulmod(al.unit % mod, powmod(c[i].unit, a, mod), mod);
            y[i] = CoordClass{false, a * c[i].v + al.ord, nd, unit};
        }
        return y;
    }
    if (const auto* f2 = std::get_if<StepF2>(&s)) {
        std::size_t t = static_cast<std::size_t>(f2->target);
        if (y[t].zero) return y;
        OrdValue b = table.eval(f2->coeff, inst);
        if (b.infinite) {
            y[t] = CoordClass{true, 0, 1, 1};
            return y;
        }
        long v = c[t].v + b.v;
        int d = c[t].depth;
        u64 mod = pow_u64(ctx.p, d);
        u64 unit = c[t].unit % mod;
        for (std::size_t j = 0; j < c.size(); ++j) {
            long e = f2->exps[j];
            if (j == t || e == 0) continue;
            if (c[j].zero) {
                if (e < 0) throw domain_violation("class shear: zero coordinate inverted");
                y[t] = CoordClass{true, 0, 1, 1};
                return y;
            }
            if (c[j].depth + ord_p_long(ctx.p, e) < d)
                throw undecidable_at_depth("class shear: source coordinate too shallow");
            v += e * c[j].v;
            unit = mulmod(unit, powmod(c[j].unit % mod, e, mod), mod);
        }
        y[t] = CoordClass{false, v, d, unit};
        return y;
    }

    const auto& tc = std::get<StepTc>(s);
    std::size_t t = static_cast<std::size_t>(tc.target);
    OrdValue co = table.eval(tc.center.coeff, inst);
    if (co.infinite) return y;  // center vanishes
    long vc = co.v;
    long dc = 1 << 20;
    for (std::size_t j = 0; j < tc.center.exps.size(); ++j) {
        long e = tc.center.exps[j];
        if (e == 0) continue;
        if (c[j].zero) {
            if (e < 0) throw domain_violation("class translation: zero coordinate inverted");
            return y;  // monomial center vanishes on this class
        }
        vc += e * c[j].v;
        dc = std::min<long>(dc, c[j].depth + ord_p_long(ctx.p, e));
    }
    dc = std::min<long>(dc, 24);
    u64 modc = pow_u64(ctx.p, dc);
    u64 uc = 1;
    for (std::size_t j = 0; j < tc.center.exps.size(); ++j) {
        long e = tc.center.exps[j];
        if (e == 0) continue;
        uc = mulmod(uc, powmod(c[j].unit % modc, e, modc), modc);
    }
    const CoordClass& xi = c[t];
    if (xi.zero) {
        y[t] = CoordClass{false, vc, static_cast<int>(dc), uc};
        return y;
    }
    if (xi.v < vc) {
        long gap = vc - xi.v;
        if (gap + dc < xi.depth)
            throw undecidable_at_depth("class translation: center too shallow");
        u64 mod = pow_u64(ctx.p, xi.depth);
        u64 unit = (xi.unit % mod + mulmod(uc % mod, pow_u64(ctx.p, gap) % mod, mod)) % mod;
        y[t] = CoordClass{false, xi.v, xi.depth, unit};
    } else if (xi.v > vc) {
        long gap = xi.v - vc;
        if (dc < gap + xi.depth)
            throw undecidable_at_depth("class translation: center too shallow");
        int nd = static_cast<int>(gap + xi.depth);
        u64 mod = pow_u64(ctx.p, nd);
        u64 unit = (uc % mod + mulmod(xi.unit % mod, pow_u64(ctx.p, gap) % mod, mod)) % mod;
        y[t] = CoordClass{false, vc, nd, unit};
    } else {
        int d = static_cast<int>(std::min<long>(xi.depth, dc));
        u64 mod = pow_u64(ctx.p, d);
        u64 sum = (xi.unit % mod + uc % mod) % mod;
        if (sum == 0)
            throw undecidable_at_depth("class translation: cancellation beyond tracked digits");
        long shift = 0;
        while (sum % ctx.p == 0) {
            sum /= ctx.p;
            ++shift;
        }
        y[t] = CoordClass{false, xi.v + shift, static_cast<int>(d - shift), sum};
    }
    return y;
}

// ---------------------------------------------------------------------------
// Set enumeration plumbing
// ---------------------------------------------------------------------------

namespace {

struct CoordSpec {
    std::vector<u64> units;
    int depth = 1;
    bool is_gamma = false;
    int gamma_index = -1;
    bool is_ecell_fiber = false;
    bool is_cell_fiber = false;
    long step = 1;
    long cong = 0;
};

struct SetEnum {
    std::vector<CoordSpec> coords;
    const RectSet* rect = nullptr;
    const ECellSpec* ecell = nullptr;
    const GeneralCell* cell = nullptr;
    bool cell_fiber_zero = false;
};

SetEnum make_set_enum(const SetSpec& set, const SymbolTable& table, const ParamInstance& inst,
                      const PrimeContext& ctx, const std::vector<int>& min_depths) {
    (void)table;
    (void)inst;
    SetEnum se;
    auto depth_for = [&](int i, int base) {
        int d = base;
        if (!min_depths.empty())
            d = std::max(d, min_depths[static_cast<std::size_t>(i)]);
        return d;
    };
    auto add_rect_coords = [&](const RectSet& r) {
        for (int i = 0; i < r.l; ++i) {
            CoordSpec cs;
            cs.depth = depth_for(i, r.k);
            cs.units = rk_units(ctx, r.k, cs.depth);
            if (i < r.lPrime - 1) {
                cs.is_gamma = true;
                cs.gamma_index = i;
            }
            se.coords.push_back(std::move(cs));
        }
    };
    if (const auto* r = std::get_if<RectSet>(&set)) {
        se.rect = r;
        add_rect_coords(*r);
    } else if (const auto* e = std::get_if<ECellSpec>(&set)) {
        se.rect = &e->base;
        se.ecell = e;
        add_rect_coords(e->base);
        CoordSpec cs;
        cs.depth = depth_for(e->m() - 1, e->base.k);
        cs.units = rk_units(ctx, e->base.k, cs.depth);
        cs.is_ecell_fiber = true;
        se.coords.push_back(std::move(cs));
    } else {
        const auto& cell = std::get<GeneralCell>(set);
        se.rect = &cell.base;
        se.cell = &cell;
        add_rect_coords(cell.base);
        CoordSpec cs;
        if (cell.lambda.is_zero()) {
            se.cell_fiber_zero = true;
        } else {
            long e = cell.n == 1 ? 0 : ord_of_integer(ctx.p, mpz_class(cell.n));
            int kbar = std::max<int>(cell.base.k, static_cast<int>(e) + 1);
            int kprime = kbar + static_cast<int>(e);
            cs.depth = depth_for(cell.m(), kprime);
            u64 pk = pow_u64(ctx.p, kprime);
            u64 pd = pow_u64(ctx.p, cs.depth);
            u64 lam = static_cast<u64>(
                cell.lambda
                    .unit_residue(ctx, std::min<int>(cell.lambda.known_digits(), kprime))
                    .get_ui());
            for (u64 w : nth_power_units(ctx, cell.n, kprime)) {
                u64 base = mulmod(lam % pk, w, pk);
                for (u64 r = base == 0 ? pk : base; r < pd; r += pk) cs.units.push_back(r);
            }
            std::sort(cs.units.begin(), cs.units.end());
            cs.units.erase(std::unique(cs.units.begin(), cs.units.end()), cs.units.end());
            cs.step = cell.n;
            cs.cong = cell.lambda.valuation();
            cs.is_cell_fiber = true;
        }
        se.coords.push_back(std::move(cs));
    }
    return se;
}

struct WindowInfo {
    OrdWindow w;
    bool clipped_hi = false;
    bool clipped_lo = false;
};

WindowInfo coord_window(const SetEnum& se, const SymbolTable& table, const ParamInstance& inst,
                        int i, const std::vector<long>& prefix, int depth_box) {
    const CoordSpec& cs = se.coords[static_cast<std::size_t>(i)];
    WindowInfo wi;
    long boxhi = depth_box - 1;
    if (cs.is_cell_fiber) {
        long lo = -boxhi, hi = boxhi;
        wi.clipped_lo = true;
        wi.clipped_hi = true;
        std::span<const long> pfx(prefix.data(), static_cast<std::size_t>(se.cell->m()));
        if (se.cell->lower) {
            OrdValue b = se.cell->lower->ord_at(table, inst, pfx);
            if (b.infinite) {
                wi.w = {1, 0};
                wi.clipped_lo = wi.clipped_hi = false;
                return wi;
            }
            if (b.v >= lo) {
                lo = b.v;
                wi.clipped_lo = false;
            }
        }
        if (se.cell->upper) {
            OrdValue b = se.cell->upper->ord_at(table, inst, pfx);
            if (!b.infinite && b.v <= hi) {
                hi = b.v;
                wi.clipped_hi = false;
            }
        }
        long lo2 = lo + (((cs.cong - lo) % cs.step) + cs.step) % cs.step;
        wi.w = {lo2, hi};
        return wi;
    }
    long lo = 0, hi = boxhi;
    wi.clipped_hi = true;
    if (cs.is_gamma) {
        bool finite = false;
        long g = gamma_upper(se.rect->delta.bounds[static_cast<std::size_t>(cs.gamma_index)],
                             table, inst,
                             std::span<const long>(prefix.data(),
                                                   static_cast<std::size_t>(cs.gamma_index)),
                             &finite);
        if (finite && g <= hi) {
            hi = g;
            wi.clipped_hi = false;
        }
    } else if (cs.is_ecell_fiber) {
        std::span<const long> pfx(prefix.data(), se.ecell->bound.exps.size());
        OrdValue b = se.ecell->bound.ord_at(table, inst, pfx);
        if (!b.infinite && b.v <= hi) {
            hi = b.v;
            wi.clipped_hi = false;
        }
    }
    wi.w = {lo, hi};
    return wi;
}

}  // namespace

// ---------------------------------------------------------------------------
// Truncated integration with rigorous geometric tails
// ---------------------------------------------------------------------------

TruncationReport truncated_integral(const SetSpec& set, const Integrand& integrand,
                                    const SymbolTable& table, const ParamInstance& inst,
                                    const PrimeContext& ctx, long q, long s, int depth) {
    if (q != static_cast<long>(ctx.p)) throw error("oracle: numeric layer requires q = p");
    if (depth < congruence_level(set)) throw error("oracle: depth below congruence level");

    const long n_div =
        std::holds_alternative<GeneralCell>(set) ? std::get<GeneralCell>(set).n : 1;
    int dim = ambient_dim(set);
    SetEnum se = make_set_enum(set, table, inst, ctx, {});

    TruncationReport rep;
    rep.depth = depth;

    OrdValue fo = table.eval(integrand.f.coeff, inst);
    OrdValue go = table.eval(integrand.g.coeff, inst);
    if ((fo.infinite && s != 0) || go.infinite) return rep;  // integrand vanishes

    if (se.cell_fiber_zero) return rep;  // graph fiber: measure zero

    std::vector<long> slope(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i)
        slope[static_cast<std::size_t>(i)] = s * integrand.f.exps[static_cast<std::size_t>(i)] +
                                             integrand.g.exps[static_cast<std::size_t>(i)];

    // Upper bound for the tail of coordinate i starting at shell v0 and
    // marching in direction dir (+1: upward). Terms are bounded by floored
    // q-powers; blocks of shells make the bounding ratio an integer power.
    auto tail_from = [&](int i, long v0, int dir) -> mpq_class {
        const CoordSpec& cs = se.coords[static_cast<std::size_t>(i)];
        long sn = slope[static_cast<std::size_t>(i)];
        long step = cs.step;
        long delta = dir * step * (sn + n_div);  // numerator decrease per step
        if (delta <= 0)
            throw divergent("oracle: nonconvergent tail on coordinate " + std::to_string(i));
        long block = std::max(1L, ceil_div(n_div, delta));
        long block_exp = floor_div(block * delta, n_div);  // >= 1
        long first_num = v0 * (sn + n_div);
        mpq_class first = q_pow(q, -floor_div(first_num, n_div) - cs.depth) *
                          mpq_class(static_cast<long>(cs.units.size()));
        mpq_class ratio = q_pow(q, -block_exp);
        return mpq_class(block) * first / (1 - ratio);
    };

    // Prefix-independent bound on a coordinate's total weight, when one
    // exists; used as the product over trailing coordinates in tail terms.
    std::vector<std::optional<mpq_class>> full_bound(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        const CoordSpec& cs = se.coords[static_cast<std::size_t>(i)];
        long sn = slope[static_cast<std::size_t>(i)];
        mpq_class sum = 0;
        long lo = cs.is_cell_fiber ? -(depth - 1) : 0;
        bool ok = true;
        for (long v = lo; v <= depth - 1; ++v) {
            if (cs.is_cell_fiber && (((v - cs.cong) % cs.step) + cs.step) % cs.step != 0)
                continue;
            sum += mpq_class(static_cast<long>(cs.units.size())) *
                   q_pow(q, -floor_div(v * (sn + n_div), n_div) - cs.depth);
        }
        try {
            sum += tail_from(i, depth, +1);
            if (cs.is_cell_fiber && !se.cell->lower) sum += tail_from(i, lo - cs.step, -1);
        } catch (const divergent&) {
            ok = false;
        }
        if (ok) full_bound[static_cast<std::size_t>(i)] = sum;
    }
    std::vector<std::optional<mpq_class>> rest_bound(static_cast<std::size_t>(dim) + 1);
    rest_bound[static_cast<std::size_t>(dim)] = mpq_class(1);
    for (int i = dim - 1; i >= 0; --i) {
        if (rest_bound[static_cast<std::size_t>(i) + 1] && full_bound[static_cast<std::size_t>(i)])
            rest_bound[static_cast<std::size_t>(i)] =
                *rest_bound[static_cast<std::size_t>(i) + 1] *
                *full_bound[static_cast<std::size_t>(i)];
    }

    std::vector<long> prefix(static_cast<std::size_t>(dim), 0);
    std::function<void(int, long, mpq_class)> rec = [&](int i, long wnum, mpq_class meas) {
        if (i == dim) {
            long total = wnum + (fo.infinite ? 0 : s * fo.v) + go.v;
            if (total % n_div != 0)
                throw unsupported_spec("oracle: integrand order not integral on a class");
            rep.value += meas * q_pow(q, -total / n_div);
            ++rep.cells_visited;
            return;
        }
        WindowInfo wi = coord_window(se, table, inst, i, prefix, depth);
        const CoordSpec& cs = se.coords[static_cast<std::size_t>(i)];
        auto add_tail = [&](long from, int dir) {
            if (!rest_bound[static_cast<std::size_t>(i) + 1])
                throw undecidable_at_depth(
                    "oracle: trailing coordinates admit no uniform bound");
            rep.tail_bound += meas * q_pow(q, -floor_div(wnum, n_div)) * tail_from(i, from, dir) *
                              *rest_bound[static_cast<std::size_t>(i) + 1];
        };
        if (wi.clipped_hi) add_tail(wi.w.hi + cs.step, +1);
        if (wi.clipped_lo) add_tail(wi.w.lo - cs.step, -1);
        for (long v = wi.w.lo; v <= wi.w.hi; v += cs.step) {
            prefix[static_cast<std::size_t>(i)] = v;
            mpq_class m2 = meas * q_pow(q, -(v + cs.depth)) *
                           mpq_class(static_cast<long>(cs.units.size()));
            rec(i + 1, wnum + v * slope[static_cast<std::size_t>(i)], m2);
        }
        prefix[static_cast<std::size_t>(i)] = 0;
    };
    rec(0, 0, mpq_class(1));

    rep.value.canonicalize();
    rep.tail_bound.canonicalize();
    return rep;
}

TruncationReport oracle_measure(const SetSpec& set, const SymbolTable& table,
                                const ParamInstance& inst, const PrimeContext& ctx, int depth) {
    Integrand one;
    one.f = ParamMonomial::one(static_cast<std::size_t>(ambient_dim(set)));
    one.g = one.f;
    return truncated_integral(set, one, table, inst, ctx, static_cast<long>(ctx.p), 0, depth);
}

// ---------------------------------------------------------------------------
// Partition verification
// ---------------------------------------------------------------------------

namespace {

constexpr long kZeroSentinel = std::numeric_limits<long>::min();

std::vector<long> key_of(const PointClass& c) {
    std::vector<long> k;
    k.reserve(c.size());
    for (const auto& cc : c) k.push_back(cc.zero ? kZeroSentinel : cc.v);
    return k;
}

bool classes_overlap(const PointClass& a, const PointClass& b, const PrimeContext& ctx) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].zero != b[i].zero) return false;
        if (a[i].zero) continue;
        if (a[i].v != b[i].v) return false;
        int d = std::min(a[i].depth, b[i].depth);
        u64 pd = pow_u64(ctx.p, d);
        if (a[i].unit % pd != b[i].unit % pd) return false;
    }
    return true;
}

std::string class_str(const PointClass& c) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) os << ", ";
        if (c[i].zero)
            os << "0";
        else
            os << "v=" << c[i].v << " u=" << c[i].unit << " d=" << c[i].depth;
    }
    os << ")";
    return os.str();
}

bool class_in_set(const SetSpec& set, const SymbolTable& table, const ParamInstance& inst,
                  const PrimeContext& ctx, const PointClass& c,
                  std::map<std::pair<long, int>, std::set<u64>>& power_cache) {
    int dim = ambient_dim(set);
    if (static_cast<int>(c.size()) != dim) return false;

    auto rect_ok = [&](const RectSet& r) {
        for (int i = 0; i < r.l; ++i) {
            const auto& cc = c[static_cast<std::size_t>(i)];
            if (cc.zero || cc.v < 0) return false;
            if (cc.depth < r.k) throw undecidable_at_depth("class too shallow for R^(k) test");
            if (cc.unit % pow_u64(ctx.p, r.k) != 1) return false;
        }
        std::vector<long> ords;
        for (int i = 0; i + 1 < r.lPrime; ++i) ords.push_back(c[static_cast<std::size_t>(i)].v);
        for (int j = 0; j + 1 < r.lPrime; ++j) {
            bool finite = false;
            long hi = gamma_upper(r.delta.bounds[static_cast<std::size_t>(j)], table, inst,
                                  std::span<const long>(ords.data(), static_cast<std::size_t>(j)),
                                  &finite);
            if (finite && c[static_cast<std::size_t>(j)].v > hi) return false;
        }
        return true;
    };

    if (const auto* r = std::get_if<RectSet>(&set)) return rect_ok(*r);

    std::vector<long> prefix;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) prefix.push_back(c[i].zero ? 0 : c[i].v);

    if (const auto* e = std::get_if<ECellSpec>(&set)) {
        if (!rect_ok(e->base)) return false;
        const auto& f = c.back();
        if (f.zero || f.v < 0) return false;
        if (f.depth < e->k()) throw undecidable_at_depth("fiber class too shallow");
        if (f.unit % pow_u64(ctx.p, e->k()) != 1) return false;
        OrdValue b = e->bound.ord_at(table, inst, prefix);
        return b.infinite || f.v <= b.v;
    }

    const auto& cell = std::get<GeneralCell>(set);
    if (!rect_ok(cell.base)) return false;
    const auto& f = c.back();
    if (cell.lambda.is_zero()) return f.zero && !cell.upper;
    if (f.zero) return false;
    long e = cell.n == 1 ? 0 : ord_of_integer(ctx.p, mpz_class(cell.n));
    int kbar = std::max<int>(cell.base.k, static_cast<int>(e) + 1);
    int kprime = kbar + static_cast<int>(e);
    if (f.depth < kprime) throw undecidable_at_depth("fiber class too shallow for coset test");
    if ((((f.v - cell.lambda.valuation()) % cell.n) + cell.n) % cell.n != 0) return false;
    auto key = std::make_pair(cell.n, kprime);
    auto it = power_cache.find(key);
    if (it == power_cache.end())
        it = power_cache.emplace(key, nth_power_units(ctx, cell.n, kprime)).first;
    u64 pk = pow_u64(ctx.p, kprime);
    u64 lam = static_cast<u64>(
        cell.lambda.unit_residue(ctx, std::min<int>(cell.lambda.known_digits(), kprime))
            .get_ui());
    u64 ratio = mulmod(f.unit % pk, invmod(lam % pk, pk), pk);
    if (!it->second.count(ratio)) return false;
    if (cell.lower) {
        OrdValue b = cell.lower->ord_at(table, inst, prefix);
        if (b.infinite || !(b.v <= f.v)) return false;
    }
    if (cell.upper) {
        OrdValue b = cell.upper->ord_at(table, inst, prefix);
        if (!b.infinite && !(f.v <= b.v)) return false;
    }
    return true;
}

std::vector<int> natural_depths(const SetSpec& set, const PrimeContext& ctx) {
    int dim = ambient_dim(set);
    std::vector<int> d(static_cast<std::size_t>(dim), congruence_level(set));
    if (const auto* cell = std::get_if<GeneralCell>(&set)) {
        if (!cell->lambda.is_zero()) {
            long e = cell->n == 1 ? 0 : ord_of_integer(ctx.p, mpz_class(cell->n));
            int kbar = std::max<int>(cell->base.k, static_cast<int>(e) + 1);
            d.back() = kbar + static_cast<int>(e);
        }
    }
    return d;
}

std::vector<int> plan_depths(const TransformProgram& prog, const PrimeContext& ctx,
                             std::vector<int> req) {
    for (auto it = prog.steps.rbegin(); it != prog.steps.rend(); ++it) {
        if (const auto* f0 = std::get_if<StepF0>(&*it)) {
            req.erase(req.begin() + f0->pos);
        } else if (const auto* sw = std::get_if<StepSwap>(&*it)) {
            std::swap(req[static_cast<std::size_t>(sw->i)],
                      req[static_cast<std::size_t>(sw->j)]);
        } else if (const auto* f1 = std::get_if<StepF1>(&*it)) {
            for (std::size_t i = 0; i < req.size(); ++i) {
                int ea = static_cast<int>(ord_p_long(ctx.p, f1->exps[i]));
                req[i] = std::max(req[i] - ea, ea + 1);
            }
        } else if (const auto* f2 = std::get_if<StepF2>(&*it)) {
            for (std::size_t j = 0; j < req.size(); ++j) {
                if (static_cast<int>(j) == f2->target || f2->exps[j] == 0) continue;
                int eb = static_cast<int>(ord_p_long(ctx.p, f2->exps[j]));
                req[j] = std::max(req[j],
                                  req[static_cast<std::size_t>(f2->target)] - eb);
            }
        } else if (const auto* tc = std::get_if<StepTc>(&*it)) {
            for (std::size_t j = 0; j < tc->center.exps.size(); ++j)
                if (tc->center.exps[j] != 0)
                    req[j] = std::max(req[j],
                                      req[static_cast<std::size_t>(tc->target)] + 2);
        }
        for (auto& r : req) r = std::max(r, 1);
    }
    return req;
}

std::vector<OrdWindow> plan_windows(const TransformProgram& prog, const SymbolTable& table,
                                    const ParamInstance& inst, const PrimeContext& ctx,
                                    std::vector<OrdWindow> win) {
    for (auto it = prog.steps.rbegin(); it != prog.steps.rend(); ++it) {
        if (const auto* f0 = std::get_if<StepF0>(&*it)) {
            win.erase(win.begin() + f0->pos);
        } else if (const auto* sw = std::get_if<StepSwap>(&*it)) {
            std::swap(win[static_cast<std::size_t>(sw->i)],
                      win[static_cast<std::size_t>(sw->j)]);
        } else if (const auto* f1 = std::get_if<StepF1>(&*it)) {
            for (std::size_t i = 0; i < win.size(); ++i) {
                long a = f1->exps[i];
                ScalarData al = scalar_data(f1->alphas[i], table, inst, ctx);
                long lo = win[i].lo - al.ord, hi = win[i].hi - al.ord;
                if (a > 0)
                    win[i] = {ceil_div(lo, a), floor_div(hi, a)};
                else
                    win[i] = {ceil_div(hi, a), floor_div(lo, a)};
            }
        } else if (const auto* f2 = std::get_if<StepF2>(&*it)) {
            std::size_t ti = static_cast<std::size_t>(f2->target);
            OrdValue b = table.eval(f2->coeff, inst);
            if (b.infinite) throw unsupported_spec("plan_windows: shear coefficient vanishes");
            long shift_lo = b.v, shift_hi = b.v;
            for (std::size_t j = 0; j < win.size(); ++j) {
                long e = f2->exps[j];
                if (j == ti || e == 0) continue;
                long x = e * win[j].lo, y = e * win[j].hi;
                shift_lo += std::min(x, y);
                shift_hi += std::max(x, y);
            }
            win[ti] = {win[ti].lo - shift_hi, win[ti].hi - shift_lo};
        } else {
            throw error("plan_windows: translation steps are handled by peeling");
        }
    }
    return win;
}

}  // namespace

BallTransportResult check_ball_transport(const TransformProgram& prog, const SymbolTable& table,
                                         const ParamInstance& inst, const PrimeContext& ctx,
                                         const PointClass& ball) {
    BallTransportResult res;
    PointClass img = ball;
    for (const auto& s : prog.steps) img = apply_step_class(s, table, inst, ctx, img);

    Point rep;
    for (const auto& cc : ball) {
        if (cc.zero)
            rep.push_back(PAdicApprox::zero_value());
        else
            rep.push_back(PAdicApprox::from_unit(ctx, cc.v, mpz_class(cc.unit), ctx.precision));
    }
    long jord = jacobian_order(prog, table, inst, ctx, rep);
    long q = static_cast<long>(ctx.p);
    mpq_class lhs = class_measure(img, q);
    mpq_class rhs = class_measure(ball, q) * q_pow(q, -jord);
    if (lhs != rhs) {
        res.ok = false;
        res.witness = "ball " + class_str(ball) + " -> " + class_str(img) +
                      " breaks measure transport (jacobian order " + std::to_string(jord) + ")";
    }
    return res;
}

PartitionReport verify_partition(const SetSpec& input, const std::vector<RectifiedPart>& parts,
                                 const SymbolTable& table, const ParamInstance& inst,
                                 const PrimeContext& ctx, int depth) {
    PartitionReport rep;
    const long q = static_cast<long>(ctx.p);
    std::map<std::pair<long, int>, std::set<u64>> power_cache;

    // Cells are verified in centered coordinates; a trailing translation on
    // each part is peeled instead of enumerated.
    SetSpec centered = input;
    bool strip_tc = false;
    if (const auto* cell = std::get_if<GeneralCell>(&input)) {
        if (!cell->center_is_zero) {
            GeneralCell c = *cell;
            c.center = ParamMonomial::one(static_cast<std::size_t>(c.base.l));
            c.center_is_zero = true;
            centered = c;
            strip_tc = true;
        }
    }

    std::vector<int> nat = natural_depths(centered, ctx);
    SetEnum se = make_set_enum(centered, table, inst, ctx, nat);
    int dim = ambient_dim(centered);

    std::set<std::vector<long>> input_keys;
    std::map<std::vector<long>, std::vector<PointClass>> seen;

    std::vector<long> prefix(static_cast<std::size_t>(dim), 0);
    std::vector<CoordClass> current(static_cast<std::size_t>(dim));
    std::function<void(int)> rec = [&](int i) {
        if (i == dim) {
            rep.input_measure += class_measure(current, q);
            input_keys.insert(key_of(current));
            ++rep.input_classes;
            return;
        }
        if (i == dim - 1 && se.cell_fiber_zero) {
            if (se.cell->upper) return;  // ord(0) <= a finite bound never holds
            current[static_cast<std::size_t>(i)] = CoordClass{true, 0, 1, 1};
            prefix[static_cast<std::size_t>(i)] = 0;
            rec(i + 1);
            return;
        }
        WindowInfo wi = coord_window(se, table, inst, i, prefix, depth);
        const CoordSpec& cs = se.coords[static_cast<std::size_t>(i)];
        for (long v = wi.w.lo; v <= wi.w.hi; v += cs.step) {
            prefix[static_cast<std::size_t>(i)] = v;
            for (u64 u : cs.units) {
                current[static_cast<std::size_t>(i)] = CoordClass{false, v, cs.depth, u};
                rec(i + 1);
            }
        }
        prefix[static_cast<std::size_t>(i)] = 0;
    };
    rec(0);

    for (std::size_t pi = 0; pi < parts.size() && rep.ok; ++pi) {
        const auto& part = parts[pi];
        if (!part.predicate.holds(table, inst)) continue;
        TransformProgram prog = part.program;
        if (strip_tc) {
            if (prog.steps.empty() || !std::holds_alternative<StepTc>(prog.steps.back()))
                throw error("verify_partition: expected a trailing translation on cell parts");
            prog.steps.pop_back();
        }
        std::vector<int> req = plan_depths(prog, ctx, nat);
        std::vector<OrdWindow> box(static_cast<std::size_t>(dim));
        for (int i = 0; i < dim; ++i) {
            bool fiber = se.coords[static_cast<std::size_t>(i)].is_cell_fiber;
            box[static_cast<std::size_t>(i)] = {fiber ? -(depth - 1) : 0, depth - 1};
        }
        std::vector<OrdWindow> win = plan_windows(prog, table, inst, ctx, box);

        const RectSet& target = std::get<RectSet>(prog.domain);
        if (static_cast<int>(req.size()) != target.l)
            throw error("verify_partition: planned arity mismatch for part " +
                        std::to_string(pi));
        for (std::size_t i = 0; i < req.size(); ++i) req[i] = std::max(req[i], target.k);

        SetSpec dom = target;
        SetEnum de = make_set_enum(dom, table, inst, ctx, req);
        std::vector<long> dpref(static_cast<std::size_t>(target.l), 0);
        std::vector<CoordClass> dcur(static_cast<std::size_t>(target.l));
        std::function<void(int)> drec = [&](int i) {
            if (!rep.ok) return;
            if (i == target.l) {
                PointClass img = dcur;
                for (const auto& s : prog.steps)
                    img = apply_step_class(s, table, inst, ctx, img);
                for (int cix = 0; cix < dim; ++cix) {
                    const auto& cc = img[static_cast<std::size_t>(cix)];
                    if (cc.zero) continue;
                    bool fiber = se.coords[static_cast<std::size_t>(cix)].is_cell_fiber;
                    // beyond the ord window: belongs to the truncated tail
                    if (cc.v > depth - 1) return;
                    if (fiber && cc.v < -(depth - 1)) return;
                    // a negative valuation on a ring coordinate is never in
                    // the input set: that is an escape, not a tail
                    if (!fiber && cc.v < 0) {
                        rep.ok = false;
                        rep.detail = "part " + std::to_string(pi) + " image " + class_str(img) +
                                     " leaves the valuation ring";
                        return;
                    }
                }
                if (!class_in_set(centered, table, inst, ctx, img, power_cache)) {
                    rep.ok = false;
                    rep.detail = "part " + std::to_string(pi) + " image " + class_str(img) +
                                 " escapes the input set";
                    return;
                }
                auto& bucket = seen[key_of(img)];
                for (const auto& other : bucket) {
                    if (classes_overlap(other, img, ctx)) {
                        rep.ok = false;
                        rep.detail = "overlapping images " + class_str(other) + " and " +
                                     class_str(img);
                        return;
                    }
                }
                bucket.push_back(img);
                rep.parts_measure += class_measure(img, q);
                ++rep.image_classes;
                return;
            }
            const CoordSpec& cs = de.coords[static_cast<std::size_t>(i)];
            WindowInfo wi = coord_window(de, table, inst, i, dpref, 8 * depth + 64);
            long lo = std::max(wi.w.lo, win[static_cast<std::size_t>(i)].lo);
            long hi = std::min(wi.w.hi, win[static_cast<std::size_t>(i)].hi);
            for (long v = lo; v <= hi; ++v) {
                dpref[static_cast<std::size_t>(i)] = v;
                for (u64 u : cs.units) {
                    dcur[static_cast<std::size_t>(i)] = CoordClass{false, v, cs.depth, u};
                    drec(i + 1);
                }
            }
            dpref[static_cast<std::size_t>(i)] = 0;
        };
        drec(0);
    }

    if (rep.ok && rep.parts_measure != rep.input_measure) {
        rep.ok = false;
        rep.detail = "measure mismatch: parts cover " + rep.parts_measure.get_str() +
                     ", input has " + rep.input_measure.get_str();
    }
    if (rep.ok && rep.input_measure == 0) {
        std::set<std::vector<long>> image_keys;
        for (const auto& [k, v] : seen)
            if (!v.empty()) image_keys.insert(k);
        if (image_keys != input_keys) {
            rep.ok = false;
            rep.detail = "zero-measure class pattern mismatch";
        }
    }
    return rep;
}

ImageCompareResult compare_set_image(const TransformProgram& prog, const SymbolTable& table,
                                     const ParamInstance& inst, const PrimeContext& ctx,
                                     int depth) {
    RectifiedPart pseudo;
    pseudo.target = std::get<RectSet>(prog.domain);
    pseudo.program = prog;
    PartitionReport rep = verify_partition(prog.codomain, {pseudo}, table, inst, ctx, depth);
    return ImageCompareResult{rep.ok, rep.detail};
}

std::vector<Point> sample_rect_points(const RectSet& target, const SymbolTable& table,
                                      const ParamInstance& inst, const PrimeContext& ctx,
                                      int count, std::uint64_t seed) {
    std::vector<Point> out;
    std::mt19937_64 rng(seed);
    auto tuples = enumerate_gamma(target.delta, table, inst);
    if (tuples.empty()) return out;  // empty Delta block: the set is empty
    for (int t = 0; t < count; ++t) {
        Point pt;
        const auto& gamma = tuples[rng() % tuples.size()];
        for (int i = 0; i < target.l; ++i) {
            long v = i < target.lPrime - 1
                         ? gamma[static_cast<std::size_t>(i)]
                         : static_cast<long>(rng() % 4);
            mpz_class unit = 1;
            int room = ctx.precision - target.k;
            if (room > 0) {
                mpz_class span = ctx.pow_p(room);
                mpz_class rv(static_cast<unsigned long>(rng()));
                unit += ctx.pow_p(target.k) * (rv % span);
            }
            pt.push_back(PAdicApprox::from_unit(ctx, v, unit, ctx.precision));
        }
        out.push_back(std::move(pt));
    }
    return out;
}

}  // namespace rectint
