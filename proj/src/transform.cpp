#include "rectint/transform.hpp"

#include <algorithm>
#include <sstream>

namespace rectint {

using nlohmann::json;

int step_dim_delta(const Step& s) { return std::holds_alternative<StepF0>(s) ? 1 : 0; }

namespace {

PAdicApprox scalar_value(const Scalar& s, const SymbolTable& table, const ParamInstance& inst,
                         const PrimeContext& ctx) {
    if (const auto* v = std::get_if<PAdicApprox>(&s)) return *v;
    return table.coeff_value(std::get<CoeffExpr>(s), inst, ctx);
}

CoeffExpr scalar_ord(const Scalar& s) {
    if (const auto* v = std::get_if<PAdicApprox>(&s)) {
        if (v->is_zero()) throw error("F1 scalar must be nonzero");
        return CoeffExpr::constant(v->valuation());
    }
    return std::get<CoeffExpr>(s);
}

void check_index(int i, std::size_t n, const char* what) {
    if (i < 0 || static_cast<std::size_t>(i) >= n)
        throw error(std::string(what) + ": coordinate index out of range");
}

}  // namespace

Point apply_step(const Step& s, const SymbolTable& table, const ParamInstance& inst,
                 const PrimeContext& ctx, const Point& x) {
    return std::visit(
        [&](const auto& st) -> Point {
            using T = std::decay_t<decltype(st)>;
            Point y = x;
            if constexpr (std::is_same_v<T, StepF0>) {
                if (st.pos < 0 || static_cast<std::size_t>(st.pos) > x.size())
                    throw error("F0: insertion position out of range");
                y.insert(y.begin() + st.pos, PAdicApprox::zero_value());
            } else if constexpr (std::is_same_v<T, StepF1>) {
                if (st.alphas.size() != x.size() || st.exps.size() != x.size())
                    throw error("F1: arity mismatch");
                for (std::size_t i = 0; i < x.size(); ++i) {
                    if (st.exps[i] == 0) throw error("F1: zero exponent is not invertible");
                    y[i] = mul(ctx, scalar_value(st.alphas[i], table, inst, ctx),
                               pow_int(ctx, x[i], st.exps[i]));
                }
            } else if constexpr (std::is_same_v<T, StepF2>) {
                check_index(st.target, x.size(), "F2");
                if (st.exps.size() != x.size()) throw error("F2: arity mismatch");
                PAdicApprox v = table.coeff_value(st.coeff, inst, ctx);
                for (std::size_t j = 0; j < x.size(); ++j) {
                    if (static_cast<int>(j) == st.target || st.exps[j] == 0) continue;
                    v = mul(ctx, v, pow_int(ctx, x[j], st.exps[j]));
                }
                y[static_cast<std::size_t>(st.target)] =
                    mul(ctx, x[static_cast<std::size_t>(st.target)], v);
            } else if constexpr (std::is_same_v<T, StepTc>) {
                check_index(st.target, x.size(), "Tc");
                std::span<const PAdicApprox> prefix(x.data(),
                                                    static_cast<std::size_t>(st.target));
                PAdicApprox c = st.center.value_at(table, inst, ctx, prefix);
                y[static_cast<std::size_t>(st.target)] =
                    add(ctx, x[static_cast<std::size_t>(st.target)], c);
            } else {
                check_index(st.i, x.size(), "Swap");
                check_index(st.j, x.size(), "Swap");
                std::swap(y[static_cast<std::size_t>(st.i)], y[static_cast<std::size_t>(st.j)]);
            }
            return y;
        },
        s);
}

Point invert_step(const Step& s, const SymbolTable& table, const ParamInstance& inst,
                  const PrimeContext& ctx, const Point& y) {
    return std::visit(
        [&](const auto& st) -> Point {
            using T = std::decay_t<decltype(st)>;
            Point x = y;
            if constexpr (std::is_same_v<T, StepF0>) {
                check_index(st.pos, y.size(), "F0 inverse");
                if (!y[static_cast<std::size_t>(st.pos)].is_zero())
                    throw not_in_range("F0 inverse: inserted coordinate is not zero");
                x.erase(x.begin() + st.pos);
            } else if constexpr (std::is_same_v<T, StepF1>) {
                for (std::size_t i = 0; i < y.size(); ++i) {
                    long a = st.exps[i];
                    PAdicApprox u =
                        mul(ctx, y[i], inv(ctx, scalar_value(st.alphas[i], table, inst, ctx)));
                    if (a == 1) {
                        x[i] = u;
                    } else if (a == -1) {
                        x[i] = inv(ctx, u);
                    } else {
                        if (!st.hensel)
                            throw error("F1 inverse: power step lacks Hensel validity data");
                        long n = a > 0 ? a : -a;
                        if (a < 0) u = inv(ctx, u);
                        x[i] = nth_root(ctx, u, n, st.hensel->k);
                    }
                }
            } else if constexpr (std::is_same_v<T, StepF2>) {
                PAdicApprox v = table.coeff_value(st.coeff, inst, ctx);
                for (std::size_t j = 0; j < y.size(); ++j) {
                    if (static_cast<int>(j) == st.target || st.exps[j] == 0) continue;
                    v = mul(ctx, v, pow_int(ctx, y[j], st.exps[j]));
                }
                x[static_cast<std::size_t>(st.target)] =
                    mul(ctx, y[static_cast<std::size_t>(st.target)], inv(ctx, v));
            } else if constexpr (std::is_same_v<T, StepTc>) {
                std::span<const PAdicApprox> prefix(y.data(), static_cast<std::size_t>(st.target));
                PAdicApprox c = st.center.value_at(table, inst, ctx, prefix);
                x[static_cast<std::size_t>(st.target)] =
                    sub(ctx, y[static_cast<std::size_t>(st.target)], c);
            } else {
                std::swap(x[static_cast<std::size_t>(st.i)], x[static_cast<std::size_t>(st.j)]);
            }
            return x;
        },
        s);
}

Point apply(const TransformProgram& prog, const SymbolTable& table, const ParamInstance& inst,
            const PrimeContext& ctx, const Point& x) {
    if (static_cast<int>(x.size()) != prog.domain_dim())
        throw domain_violation("apply: point arity != domain dimension");
    if (!point_in_set(prog.domain, table, inst, ctx, x))
        throw domain_violation("apply: point is not in the program domain");
    Point cur = x;
    for (const auto& s : prog.steps) cur = apply_step(s, table, inst, ctx, cur);
    return cur;
}

Point invert(const TransformProgram& prog, const SymbolTable& table, const ParamInstance& inst,
             const PrimeContext& ctx, const Point& y) {
    Point cur = y;
    for (auto it = prog.steps.rbegin(); it != prog.steps.rend(); ++it)
        cur = invert_step(*it, table, inst, ctx, cur);
    return cur;
}

namespace {

// Monomial whose order equals the step's Jacobian order, over the step's
// domain coordinates.
ParamMonomial step_jacobian_monomial(const Step& s, std::size_t dom_dim,
                                     const PrimeContext& ctx) {
    ParamMonomial m = ParamMonomial::one(dom_dim);
    if (const auto* f1 = std::get_if<StepF1>(&s)) {
        for (std::size_t i = 0; i < dom_dim; ++i) {
            long a = f1->exps[i];
            m.coeff += CoeffExpr::constant(ord_of_integer(ctx.p, mpz_class(a)));
            m.coeff += scalar_ord(f1->alphas[i]);
            m.exps[i] = a - 1;
        }
    } else if (const auto* f2 = std::get_if<StepF2>(&s)) {
        m.coeff += f2->coeff;
        for (std::size_t j = 0; j < dom_dim; ++j)
            if (static_cast<int>(j) != f2->target) m.exps[j] = f2->exps[j];
    }
    // F0, Tc and Swap all contribute order 0.
    return m;
}

ParamMonomial pullback_step(const Step& s, const ParamMonomial& m, SymbolTable& table) {
    (void)table;
    return std::visit(
        [&](const auto& st) -> ParamMonomial {
            using T = std::decay_t<decltype(st)>;
            ParamMonomial r = m;
            if constexpr (std::is_same_v<T, StepF0>) {
                check_index(st.pos, m.exps.size(), "F0 pullback");
                if (m.exps[static_cast<std::size_t>(st.pos)] != 0)
                    throw not_monomializable(
                        "certificate references a coordinate pinned to zero");
                r.exps.erase(r.exps.begin() + st.pos);
            } else if constexpr (std::is_same_v<T, StepF1>) {
                for (std::size_t i = 0; i < m.exps.size(); ++i) {
                    long e = m.exps[i];
                    if (e == 0) continue;
                    r.coeff += scalar_ord(st.alphas[i]).scaled(e);
                    r.exps[i] = e * st.exps[i];
                }
            } else if constexpr (std::is_same_v<T, StepF2>) {
                long e = m.exps[static_cast<std::size_t>(st.target)];
                if (e != 0) {
                    r.coeff += st.coeff.scaled(e);
                    for (std::size_t j = 0; j < m.exps.size(); ++j)
                        if (static_cast<int>(j) != st.target) r.exps[j] += e * st.exps[j];
                }
            } else if constexpr (std::is_same_v<T, StepTc>) {
                long e = m.exps[static_cast<std::size_t>(st.target)];
                if (e != 0) {
                    switch (st.dominance) {
                        case TcDominance::Coordinate:
                            break;  // ord(x + c) = ord x on the domain
                        case TcDominance::Center:
                            r.coeff += st.center.coeff.scaled(e);
                            for (std::size_t j = 0; j < st.center.exps.size(); ++j)
                                r.exps[j] += e * st.center.exps[j];
                            r.exps[static_cast<std::size_t>(st.target)] = 0;
                            break;
                        case TcDominance::None:
                            throw not_monomializable(
                                "translation step cannot certify ord(x + c) as a monomial "
                                "order on its domain");
                    }
                }
            } else {
                std::swap(r.exps[static_cast<std::size_t>(st.i)],
                          r.exps[static_cast<std::size_t>(st.j)]);
            }
            return r;
        },
        s);
}

}  // namespace

std::vector<ParamMonomial> certify_orders(const TransformProgram& prog,
                                          const std::vector<ParamMonomial>& tracked,
                                          SymbolTable& table) {
    std::vector<ParamMonomial> cur = tracked;
    for (auto& m : cur)
        if (static_cast<int>(m.exps.size()) != prog.codomain_dim())
            throw error("certify_orders: monomial arity != codomain dimension");
    for (auto it = prog.steps.rbegin(); it != prog.steps.rend(); ++it)
        for (auto& m : cur) m = pullback_step(*it, m, table);
    return cur;
}

std::optional<ParamMonomial> jacobian_certificate(const TransformProgram& prog,
                                                  SymbolTable& table, const PrimeContext& ctx) {
    for (const auto& s : prog.steps)
        if (std::holds_alternative<StepF0>(s)) return std::nullopt;
    std::size_t dim = static_cast<std::size_t>(prog.domain_dim());
    ParamMonomial total = ParamMonomial::one(dim);
    for (std::size_t t = 0; t < prog.steps.size(); ++t) {
        ParamMonomial local = step_jacobian_monomial(prog.steps[t], dim, ctx);
        // Pull the per-step monomial back through the earlier steps.
        for (std::size_t b = t; b-- > 0;) local = pullback_step(prog.steps[b], local, table);
        total.coeff += local.coeff;
        for (std::size_t i = 0; i < dim; ++i) total.exps[i] += local.exps[i];
    }
    return total;
}

long jacobian_order(const TransformProgram& prog, const SymbolTable& table,
                    const ParamInstance& inst, const PrimeContext& ctx, const Point& x) {
    Point cur = x;
    long total = 0;
    for (const auto& s : prog.steps) {
        ParamMonomial local = step_jacobian_monomial(s, cur.size(), ctx);
        std::vector<long> ords;
        ords.reserve(cur.size());
        for (std::size_t i = 0; i < cur.size(); ++i) {
            if (local.exps[i] != 0 && cur[i].is_zero())
                throw domain_violation("jacobian_order: zero coordinate with nonzero exponent");
            ords.push_back(cur[i].is_zero() ? 0 : cur[i].valuation());
        }
        OrdValue v = local.ord_at(table, inst, ords);
        if (v.infinite) throw domain_violation("jacobian_order: infinite step order");
        total += v.v;
        cur = apply_step(s, table, inst, ctx, cur);
    }
    if (prog.jacCert) {
        std::vector<long> ords;
        for (const auto& c : x) ords.push_back(c.is_zero() ? 0 : c.valuation());
        OrdValue cert = prog.jacCert->ord_at(table, inst, ords);
        if (cert.infinite || cert.v != total)
            throw certificate_mismatch("jacobian certificate disagrees with per-step sum: " +
                                       std::to_string(cert.v) + " vs " + std::to_string(total));
    }
    return total;
}

bool point_in_set(const SetSpec& set, const SymbolTable& table, const ParamInstance& inst,
                  const PrimeContext& ctx, const Point& x) {
    if (static_cast<int>(x.size()) != ambient_dim(set))
        throw error("point_in_set: arity mismatch");

    auto in_rk = [&](const PAdicApprox& v, int k) {
        return !v.is_zero() && v.valuation() >= 0 && member_rk(ctx, v, k);
    };

    auto check_rect = [&](const RectSet& r, std::span<const PAdicApprox> pt) {
        for (int i = 0; i < r.l; ++i)
            if (!in_rk(pt[static_cast<std::size_t>(i)], r.k)) return false;
        std::vector<long> ords;
        for (int i = 0; i + 1 < r.lPrime; ++i)
            ords.push_back(pt[static_cast<std::size_t>(i)].valuation());
        for (int j = 0; j + 1 < r.lPrime; ++j) {
            bool finite = false;
            long hi = gamma_upper(r.delta.bounds[static_cast<std::size_t>(j)], table, inst,
                                  std::span<const long>(ords.data(), static_cast<std::size_t>(j)),
                                  &finite);
            if (finite && ords[static_cast<std::size_t>(j)] > hi) return false;
        }
        return true;
    };

    if (const auto* r = std::get_if<RectSet>(&set)) return check_rect(*r, x);

    if (const auto* e = std::get_if<ECellSpec>(&set)) {
        std::span<const PAdicApprox> base(x.data(), static_cast<std::size_t>(e->base.l));
        if (!check_rect(e->base, base)) return false;
        const PAdicApprox& last = x.back();
        if (!in_rk(last, e->k())) return false;
        std::vector<long> ords;
        for (const auto& c : base) ords.push_back(c.valuation());
        OrdValue b = e->bound.ord_at(table, inst, ords);
        return b.infinite || last.valuation() <= b.v;
    }

    const auto& cell = std::get<GeneralCell>(set);
    std::span<const PAdicApprox> base(x.data(), static_cast<std::size_t>(cell.base.l));
    if (!check_rect(cell.base, base)) return false;
    PAdicApprox u = x.back();
    if (!cell.center_is_zero)
        u = sub(ctx, u, cell.center.value_at(table, inst, ctx, base));
    if (cell.lambda.is_zero()) return u.is_zero();
    if (u.is_zero()) return false;
    std::vector<long> ords;
    for (const auto& c : base) ords.push_back(c.valuation());
    if (cell.lower) {
        OrdValue lo = cell.lower->ord_at(table, inst, ords);
        if (lo.infinite || !(lo.v <= u.valuation())) return false;
    }
    if (cell.upper) {
        OrdValue hi = cell.upper->ord_at(table, inst, ords);
        if (!hi.infinite && !(u.valuation() <= hi.v)) return false;
    }
    return member_pn(ctx, mul(ctx, u, inv(ctx, cell.lambda)), cell.n);
}

// ---------------------------------------------------------------------------
// Serialization and rendering
// ---------------------------------------------------------------------------

namespace {

json scalar_to_json(const Scalar& s) {
    if (const auto* v = std::get_if<PAdicApprox>(&s)) return json{{"padic", padic_to_json(*v)}};
    return json{{"coeff", coeff_to_json(std::get<CoeffExpr>(s))}};
}

Scalar scalar_from_json(const json& j, const PrimeContext& ctx, const std::string& path) {
    if (j.contains("padic")) return padic_from_json(j.at("padic"), ctx, path + "/padic");
    if (j.contains("coeff")) return coeff_from_json(j.at("coeff"), path + "/coeff");
    throw schema_error("scalar needs 'padic' or 'coeff'", path);
}

json set_to_json_any(const SetSpec& s) {
    if (const auto* r = std::get_if<RectSet>(&s)) return rectset_to_json(*r);
    if (const auto* e = std::get_if<ECellSpec>(&s))
        return json{{"type", "ecell"},
                    {"base", rectset_to_json(e->base)},
                    {"bound", monomial_to_json(e->bound)}};
    const auto& c = std::get<GeneralCell>(s);
    json out{{"type", "cell"},
             {"base", rectset_to_json(c.base)},
             {"n", c.n},
             {"lambda", padic_to_json(c.lambda)}};
    out["center"] = c.center_is_zero ? json(nullptr) : monomial_to_json(c.center);
    out["lower"] = c.lower ? monomial_to_json(*c.lower) : json(nullptr);
    out["upper"] = c.upper ? monomial_to_json(*c.upper) : json(nullptr);
    return out;
}

SetSpec set_from_json_any(const json& j, const PrimeContext& ctx, const std::string& path) {
    std::string type = j.value("type", "");
    if (type == "rectset") return rectset_from_json(j, path);
    if (type == "ecell") {
        ECellSpec e;
        e.base = rectset_from_json(j.at("base"), path + "/base");
        e.bound = monomial_from_json(j.at("bound"), path + "/bound");
        return e;
    }
    if (type == "cell") {
        GeneralCell c;
        c.base = rectset_from_json(j.at("base"), path + "/base");
        c.n = j.at("n").get<long>();
        c.lambda = padic_from_json(j.at("lambda"), ctx, path + "/lambda");
        if (j.contains("center") && !j.at("center").is_null()) {
            c.center = monomial_from_json(j.at("center"), path + "/center");
            c.center_is_zero = false;
        } else {
            c.center = ParamMonomial::one(static_cast<std::size_t>(c.base.l));
        }
        if (j.contains("lower") && !j.at("lower").is_null())
            c.lower = monomial_from_json(j.at("lower"), path + "/lower");
        if (j.contains("upper") && !j.at("upper").is_null())
            c.upper = monomial_from_json(j.at("upper"), path + "/upper");
        return c;
    }
    throw schema_error("unknown set type", path);
}

}  // namespace

json program_to_json(const TransformProgram& prog) {
    json steps = json::array();
    for (const auto& s : prog.steps) {
        std::visit(
            [&](const auto& st) {
                using T = std::decay_t<decltype(st)>;
                if constexpr (std::is_same_v<T, StepF0>) {
                    steps.push_back(json{{"type", "f0"}, {"pos", st.pos}});
                } else if constexpr (std::is_same_v<T, StepF1>) {
                    json alphas = json::array();
                    for (const auto& a : st.alphas) alphas.push_back(scalar_to_json(a));
                    json sj{{"type", "f1"}, {"alphas", alphas}, {"exps", st.exps}};
                    if (st.hensel)
                        sj["hensel"] = json{{"n", st.hensel->n},
                                            {"k", st.hensel->k},
                                            {"kPrime", st.hensel->kprime}};
                    steps.push_back(sj);
                } else if constexpr (std::is_same_v<T, StepF2>) {
                    steps.push_back(json{{"type", "f2"},
                                         {"target", st.target},
                                         {"coeff", coeff_to_json(st.coeff)},
                                         {"exps", st.exps}});
                } else if constexpr (std::is_same_v<T, StepTc>) {
                    const char* dom = st.dominance == TcDominance::Coordinate ? "coordinate"
                                      : st.dominance == TcDominance::Center   ? "center"
                                                                              : "none";
                    steps.push_back(json{{"type", "tc"},
                                         {"target", st.target},
                                         {"center", monomial_to_json(st.center)},
                                         {"dominance", dom}});
                } else {
                    steps.push_back(json{{"type", "swap"}, {"i", st.i}, {"j", st.j}});
                }
            },
            s);
    }
    json out{{"steps", steps},
             {"domain", set_to_json_any(prog.domain)},
             {"codomain", set_to_json_any(prog.codomain)}};
    out["jacCert"] = prog.jacCert ? monomial_to_json(*prog.jacCert) : json(nullptr);
    return out;
}

TransformProgram program_from_json(const json& j, const PrimeContext& ctx,
                                   const std::string& path) {
    TransformProgram prog;
    prog.domain = set_from_json_any(j.at("domain"), ctx, path + "/domain");
    prog.codomain = set_from_json_any(j.at("codomain"), ctx, path + "/codomain");
    if (j.contains("jacCert") && !j.at("jacCert").is_null())
        prog.jacCert = monomial_from_json(j.at("jacCert"), path + "/jacCert");
    std::size_t idx = 0;
    for (const auto& sj : j.at("steps")) {
        std::string sp = path + "/steps/" + std::to_string(idx++);
        std::string type = sj.value("type", "");
        if (type == "f0") {
            prog.steps.push_back(StepF0{sj.at("pos").get<int>()});
        } else if (type == "f1") {
            StepF1 st;
            for (const auto& a : sj.at("alphas"))
                st.alphas.push_back(scalar_from_json(a, ctx, sp + "/alphas"));
            for (const auto& e : sj.at("exps")) st.exps.push_back(e.get<long>());
            if (sj.contains("hensel")) {
                const auto& h = sj.at("hensel");
                st.hensel = HenselData{h.at("n").get<long>(), h.at("k").get<int>(),
                                       h.at("kPrime").get<int>()};
            }
            prog.steps.push_back(st);
        } else if (type == "f2") {
            StepF2 st;
            st.target = sj.at("target").get<int>();
            st.coeff = coeff_from_json(sj.at("coeff"), sp + "/coeff");
            for (const auto& e : sj.at("exps")) st.exps.push_back(e.get<long>());
            prog.steps.push_back(st);
        } else if (type == "tc") {
            StepTc st;
            st.target = sj.at("target").get<int>();
            st.center = monomial_from_json(sj.at("center"), sp + "/center");
            std::string dom = sj.value("dominance", "none");
            st.dominance = dom == "coordinate" ? TcDominance::Coordinate
                           : dom == "center"   ? TcDominance::Center
                                               : TcDominance::None;
            prog.steps.push_back(st);
        } else if (type == "swap") {
            prog.steps.push_back(StepSwap{sj.at("i").get<int>(), sj.at("j").get<int>()});
        } else {
            throw schema_error("unknown step type '" + type + "'", sp);
        }
    }
    return prog;
}

namespace {

std::string coeff_str(const CoeffExpr& e) {
    if (e.is_constant()) {
        if (e.offset == 0) return "1";
        return "pi^" + std::to_string(e.offset);
    }
    std::ostringstream os;
    bool first = true;
    for (const auto& [n, c] : e.terms) {
        if (!first) os << "*";
        first = false;
        os << n;
        if (c != 1) os << "^" << c;
    }
    if (e.offset != 0) os << "*pi^" << e.offset;
    return os.str();
}

std::string monomial_str(const ParamMonomial& m) {
    std::ostringstream os;
    os << coeff_str(m.coeff);
    for (std::size_t i = 0; i < m.exps.size(); ++i)
        if (m.exps[i] != 0) os << " x" << i + 1 << "^" << m.exps[i];
    return os.str();
}

}  // namespace

std::string describe_program(const TransformProgram& prog) {
    std::ostringstream os;
    if (prog.steps.empty()) os << "  id\n";
    for (const auto& s : prog.steps) {
        std::visit(
            [&](const auto& st) {
                using T = std::decay_t<decltype(st)>;
                if constexpr (std::is_same_v<T, StepF0>) {
                    os << "  f0: insert 0 at x" << st.pos + 1 << "\n";
                } else if constexpr (std::is_same_v<T, StepF1>) {
                    os << "  f1: x -> (";
                    for (std::size_t i = 0; i < st.exps.size(); ++i) {
                        if (i) os << ", ";
                        const auto& a = st.alphas[i];
                        if (const auto* v = std::get_if<PAdicApprox>(&a)) {
                            if (!(v->known_digits() == 1 && v->digits()[0] == 1 &&
                                  v->valuation() == 0)) {
                                os << "a" << i + 1 << "*";
                            }
                        } else {
                            os << coeff_str(std::get<CoeffExpr>(a)) << "*";
                        }
                        os << "x" << i + 1;
                        if (st.exps[i] != 1) os << "^" << st.exps[i];
                    }
                    os << ")\n";
                } else if constexpr (std::is_same_v<T, StepF2>) {
                    os << "  f2: x" << st.target + 1 << " -> x" << st.target + 1 << " * "
                       << coeff_str(st.coeff);
                    for (std::size_t j = 0; j < st.exps.size(); ++j)
                        if (st.exps[j] != 0) os << " x" << j + 1 << "^" << st.exps[j];
                    os << "\n";
                } else if constexpr (std::is_same_v<T, StepTc>) {
                    os << "  t_c: x" << st.target + 1 << " -> x" << st.target + 1 << " + "
                       << monomial_str(st.center) << "\n";
                } else {
                    os << "  swap: x" << st.i + 1 << " <-> x" << st.j + 1 << "\n";
                }
            },
            s);
    }
    return os.str();
}

}  // namespace rectint
