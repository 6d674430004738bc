#include "rectint/cellspec.hpp"

namespace rectint {

using nlohmann::json;

OrdValue ParamMonomial::ord_at(const SymbolTable& table, const ParamInstance& inst,
                               std::span<const long> coord_ords) const {
    if (coord_ords.size() != exps.size())
        throw error("monomial ord_at: arity mismatch");
    OrdValue c = table.eval(coeff, inst);
    if (c.infinite) return c;
    long total = c.v;
    for (std::size_t i = 0; i < exps.size(); ++i) total += exps[i] * coord_ords[i];
    return OrdValue::fin(total);
}

PAdicApprox ParamMonomial::value_at(const SymbolTable& table, const ParamInstance& inst,
                                    const PrimeContext& ctx,
                                    std::span<const PAdicApprox> point) const {
    if (point.size() != exps.size()) throw error("monomial value_at: arity mismatch");
    PAdicApprox v = table.coeff_value(coeff, inst, ctx);
    for (std::size_t i = 0; i < exps.size(); ++i) {
        if (exps[i] == 0) continue;
        v = mul(ctx, v, pow_int(ctx, point[i], exps[i]));
    }
    return v;
}

void GammaRegion::validate() const {
    for (std::size_t j = 0; j < bounds.size(); ++j) {
        if (bounds[j].empty())
            throw non_triangular_region("gamma coordinate " + std::to_string(j) +
                                        " carries no bound");
        for (const auto& b : bounds[j])
            if (b.coeffs.size() > j)
                throw non_triangular_region("gamma bound " + std::to_string(j) + " has " +
                                            std::to_string(b.coeffs.size()) +
                                            " coefficients, expected at most " +
                                            std::to_string(j));
    }
}

long gamma_upper(const std::vector<GammaBound>& conjuncts, const SymbolTable& table,
                 const ParamInstance& inst, std::span<const long> prefix, bool* finite) {
    long hi = 0;
    bool have = false;
    for (const auto& b : conjuncts) {
        OrdValue bv = table.eval(b.bound, inst);
        if (bv.infinite) continue;  // this conjunct imposes nothing
        long cand = bv.v;
        for (std::size_t i = 0; i < b.coeffs.size(); ++i) cand += b.coeffs[i] * prefix[i];
        if (b.div != 1) cand = floor_div(cand, b.div);
        hi = have ? std::min(hi, cand) : cand;
        have = true;
    }
    if (finite) *finite = have;
    return hi;
}

std::vector<std::vector<long>> enumerate_gamma(const GammaRegion& region, const SymbolTable& table,
                                               const ParamInstance& inst) {
    region.validate();
    int d = region.dim();
    std::vector<std::vector<long>> out;
    std::vector<long> cur(static_cast<std::size_t>(d), 0);
    // DFS in lexicographic order; bounds only reference earlier entries.
    auto rec = [&](auto&& self, int j) -> void {
        if (j == d) {
            out.push_back(cur);
            return;
        }
        bool finite = false;
        long hi = gamma_upper(region.bounds[static_cast<std::size_t>(j)], table, inst,
                              std::span<const long>(cur.data(), static_cast<std::size_t>(j)),
                              &finite);
        if (!finite)
            throw unsupported_spec("gamma region is infinite under instance '" + inst.name + "'");
        for (long g = 0; g <= hi; ++g) {
            cur[static_cast<std::size_t>(j)] = g;
            self(self, j + 1);
        }
        cur[static_cast<std::size_t>(j)] = 0;
    };
    rec(rec, 0);
    return out;
}

void RectSet::validate() const {
    if (k < 1) throw unsupported_spec("rectset: k must be positive");
    if (l < 0) throw unsupported_spec("rectset: l must be nonnegative");
    if (lPrime < 1 || lPrime > l + 1)
        throw unsupported_spec("rectset: need 1 <= lPrime <= l+1");
    if (delta.dim() != lPrime - 1)
        throw unsupported_spec("rectset: gamma region dimension " + std::to_string(delta.dim()) +
                               " != lPrime - 1");
    delta.validate();
}

void ECellSpec::validate() const {
    base.validate();
    if (bound.exps.size() != static_cast<std::size_t>(base.l))
        throw unsupported_spec("ecell: bound exponent arity != base dimension");
}

void GeneralCell::validate() const {
    base.validate();
    if (n < 1) throw unsupported_spec("cell: n must be positive");
    auto check_arity = [&](const ParamMonomial& m, const char* which) {
        if (m.exps.size() != static_cast<std::size_t>(base.l))
            throw unsupported_spec(std::string("cell: ") + which + " exponent arity != m");
    };
    if (lower) check_arity(*lower, "lower bound");
    if (upper) check_arity(*upper, "upper bound");
    if (!center_is_zero) check_arity(center, "center");
    if (!lambda.is_zero() && (lambda.valuation() < 0 || lambda.valuation() >= n))
        throw unsupported_spec("cell: lambda must satisfy 0 <= ord(lambda) < n");
}

int ambient_dim(const SetSpec& s) {
    if (const auto* r = std::get_if<RectSet>(&s)) return r->l;
    if (const auto* e = std::get_if<ECellSpec>(&s)) return e->m();
    return std::get<GeneralCell>(s).m() + 1;
}

int congruence_level(const SetSpec& s) {
    if (const auto* r = std::get_if<RectSet>(&s)) return r->k;
    if (const auto* e = std::get_if<ECellSpec>(&s)) return e->k();
    return std::get<GeneralCell>(s).base.k;
}

// ---------------------------------------------------------------------------
// JSON layer
// ---------------------------------------------------------------------------

namespace {

const json& need(const json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key))
        throw schema_error(std::string("missing field '") + key + "'", path);
    return j.at(key);
}

long need_int(const json& j, const char* key, const std::string& path) {
    const json& v = need(j, key, path);
    if (!v.is_number_integer())
        throw schema_error(std::string("field '") + key + "' must be an integer",
                           path + "/" + key);
    return v.get<long>();
}

std::vector<long> int_array(const json& v, const std::string& path) {
    if (!v.is_array()) throw schema_error("expected an integer array", path);
    std::vector<long> out;
    for (const auto& e : v) {
        if (!e.is_number_integer()) throw schema_error("expected an integer array", path);
        out.push_back(e.get<long>());
    }
    return out;
}

}  // namespace

json padic_to_json(const PAdicApprox& x) {
    if (x.is_zero()) return json{{"zero", true}};
    json digits = json::array();
    for (auto d : x.digits()) digits.push_back(d);
    return json{{"zero", false}, {"val", x.valuation()}, {"digits", digits}};
}

PAdicApprox padic_from_json(const json& j, const PrimeContext& ctx, const std::string& path) {
    if (!j.is_object()) throw schema_error("expected a p-adic value object", path);
    if (j.value("zero", false)) return PAdicApprox::zero_value();
    long val = need_int(j, "val", path);
    std::vector<long> dig = int_array(need(j, "digits", path), path + "/digits");
    if (dig.empty()) throw schema_error("nonzero value needs at least one digit", path);
    if (dig.size() > static_cast<std::size_t>(ctx.precision))
        throw schema_error("more digits than the working precision", path + "/digits");
    mpz_class u = 0;
    for (auto it = dig.rbegin(); it != dig.rend(); ++it) {
        if (*it < 0 || static_cast<unsigned long>(*it) >= ctx.p)
            throw schema_error("digit out of range for p", path + "/digits");
        u = u * ctx.p + *it;
    }
    if (dig[0] == 0) throw schema_error("leading digit must be nonzero", path + "/digits");
    return PAdicApprox::from_unit(ctx, val, u, static_cast<int>(dig.size()));
}

json coeff_to_json(const CoeffExpr& e) {
    if (e.is_constant()) return json{{"ord", e.offset}};
    if (e.is_single_symbol()) return json{{"sym", e.terms.begin()->first}};
    json terms = json::object();
    for (const auto& [n, c] : e.terms) terms[n] = c;
    return json{{"expr", json{{"terms", terms}, {"offset", e.offset}}}};
}

CoeffExpr coeff_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw schema_error("expected a coefficient object", path);
    if (j.contains("ord")) return CoeffExpr::constant(need_int(j, "ord", path));
    if (j.contains("sym")) {
        const json& s = j.at("sym");
        if (!s.is_string()) throw schema_error("'sym' must be a string", path + "/sym");
        return CoeffExpr::symbol(s.get<std::string>());
    }
    if (j.contains("expr")) {
        const json& e = j.at("expr");
        CoeffExpr out;
        out.offset = e.value("offset", 0L);
        if (e.contains("terms")) {
            for (const auto& [k, v] : e.at("terms").items()) {
                if (!v.is_number_integer())
                    throw schema_error("term coefficient must be an integer", path + "/expr/terms");
                out.add_term(k, v.get<long>());
            }
        }
        return out;
    }
    throw schema_error("coefficient needs 'ord', 'sym' or 'expr'", path);
}

json monomial_to_json(const ParamMonomial& m) {
    return json{{"coeff", coeff_to_json(m.coeff)}, {"exps", m.exps}};
}

ParamMonomial monomial_from_json(const json& j, const std::string& path) {
    ParamMonomial m;
    m.coeff = coeff_from_json(need(j, "coeff", path), path + "/coeff");
    m.exps = int_array(need(j, "exps", path), path + "/exps");
    return m;
}

json symbols_to_json(const SymbolTable& table) {
    json params = json::array();
    json derived = json::array();
    for (const auto& [name, def] : table.all()) {
        if (!def.derived) {
            params.push_back(json{
                {"name", name},
                {"role", def.role == SymbolRole::Valued ? "valued" : "order-only"}});
        } else {
            const char* mode = def.mode == DivMode::Floor  ? "floor"
                               : def.mode == DivMode::Ceil ? "ceil"
                                                           : "exact";
            derived.push_back(json{{"name", name},
                                   {"inner", coeff_to_json(def.inner)},
                                   {"div", def.divisor},
                                   {"mode", mode}});
        }
    }
    json out;
    out["params"] = params;
    if (!derived.empty()) out["derived"] = derived;
    return out;
}

void symbols_from_json(const json& j, SymbolTable& table) {
    if (j.contains("params")) {
        for (const auto& p : j.at("params")) {
            std::string name = need(p, "name", "/params").get<std::string>();
            std::string role = p.value("role", "order-only");
            if (role != "order-only" && role != "valued")
                throw schema_error("role must be 'order-only' or 'valued'", "/params");
            table.declare(name,
                          role == "valued" ? SymbolRole::Valued : SymbolRole::OrderOnly);
        }
    }
    if (j.contains("derived")) {
        for (const auto& d : j.at("derived")) {
            SymbolDef def;
            def.role = SymbolRole::OrderOnly;
            def.derived = true;
            def.inner = coeff_from_json(need(d, "inner", "/derived"), "/derived/inner");
            def.divisor = need_int(d, "div", "/derived");
            std::string mode = d.value("mode", "exact");
            def.mode = mode == "floor" ? DivMode::Floor
                       : mode == "ceil" ? DivMode::Ceil
                                        : DivMode::Exact;
            table.adopt_derived(need(d, "name", "/derived").get<std::string>(), def);
        }
    }
}

json instance_to_json(const ParamInstance& inst) {
    json orders = json::object(), values = json::object(), zeros = json::array();
    for (const auto& [name, e] : inst.entries) {
        if (e.zero && !e.value)
            zeros.push_back(name);
        else if (e.value)
            values[name] = padic_to_json(*e.value);
        else
            orders[name] = e.ord;
    }
    json out{{"name", inst.name}};
    if (!orders.empty()) out["orders"] = orders;
    if (!values.empty()) out["values"] = values;
    if (!zeros.empty()) out["zero"] = zeros;
    return out;
}

ParamInstance instance_from_json(const json& j, const PrimeContext& ctx, const std::string& path) {
    ParamInstance inst;
    inst.name = j.value("name", "");
    if (j.contains("orders")) {
        for (const auto& [k, v] : j.at("orders").items()) {
            if (!v.is_number_integer())
                throw schema_error("order must be an integer", path + "/orders/" + k);
            inst.entries[k] = InstanceEntry{false, v.get<long>(), std::nullopt};
        }
    }
    if (j.contains("zero")) {
        for (const auto& z : j.at("zero"))
            inst.entries[z.get<std::string>()] = InstanceEntry{true, 0, std::nullopt};
    }
    if (j.contains("values")) {
        for (const auto& [k, v] : j.at("values").items()) {
            PAdicApprox val = padic_from_json(v, ctx, path + "/values/" + k);
            InstanceEntry e;
            e.zero = val.is_zero();
            e.ord = val.is_zero() ? 0 : val.valuation();
            e.value = val;
            inst.entries[k] = e;
        }
    }
    return inst;
}

json rectset_to_json(const RectSet& r) {
    json gamma = json::array();
    for (const auto& conj : r.delta.bounds) {
        auto bound_json = [](const GammaBound& b) {
            json bj{{"bound", coeff_to_json(b.bound)}, {"coeffs", b.coeffs}};
            if (b.div != 1) bj["div"] = b.div;
            return bj;
        };
        if (conj.size() == 1) {
            gamma.push_back(bound_json(conj[0]));
        } else {
            json alts = json::array();
            for (const auto& b : conj) alts.push_back(bound_json(b));
            gamma.push_back(json{{"bounds", alts}});
        }
    }
    return json{{"type", "rectset"}, {"k", r.k}, {"lPrime", r.lPrime}, {"l", r.l},
                {"gamma", gamma}};
}

RectSet rectset_from_json(const json& j, const std::string& path) {
    RectSet r;
    r.k = static_cast<int>(need_int(j, "k", path));
    r.lPrime = static_cast<int>(need_int(j, "lPrime", path));
    r.l = static_cast<int>(need_int(j, "l", path));
    if (j.contains("gamma")) {
        std::size_t idx = 0;
        auto read_bound = [&](const json& g, const std::string& gp) {
            GammaBound b;
            b.bound = coeff_from_json(need(g, "bound", gp), gp + "/bound");
            b.coeffs = int_array(need(g, "coeffs", gp), gp + "/coeffs");
            b.div = g.value("div", 1L);
            if (b.div < 1) throw schema_error("gamma bound divisor must be positive", gp);
            return b;
        };
        for (const auto& g : j.at("gamma")) {
            std::string gp = path + "/gamma/" + std::to_string(idx++);
            std::vector<GammaBound> conj;
            if (g.contains("bounds")) {
                for (const auto& alt : g.at("bounds")) conj.push_back(read_bound(alt, gp));
            } else {
                conj.push_back(read_bound(g, gp));
            }
            r.delta.bounds.push_back(std::move(conj));
        }
    }
    try {
        r.validate();
    } catch (const non_triangular_region&) {
        throw;
    } catch (const unsupported_spec& e) {
        throw schema_error(e.what(), path);
    }
    return r;
}

namespace {

json set_to_json(const SetSpec& s, const PrimeContext&) {
    if (const auto* r = std::get_if<RectSet>(&s)) return rectset_to_json(*r);
    if (const auto* e = std::get_if<ECellSpec>(&s)) {
        return json{{"type", "ecell"},
                    {"base", rectset_to_json(e->base)},
                    {"bound", monomial_to_json(e->bound)}};
    }
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

SetSpec set_from_json(const json& j, const PrimeContext& ctx, const std::string& path) {
    std::string type = need(j, "type", path).get<std::string>();
    if (type == "rectset") return rectset_from_json(j, path);
    if (type == "ecell") {
        ECellSpec e;
        e.base = rectset_from_json(need(j, "base", path), path + "/base");
        e.bound = monomial_from_json(need(j, "bound", path), path + "/bound");
        try {
            e.validate();
        } catch (const unsupported_spec& err) {
            throw schema_error(err.what(), path);
        }
        return e;
    }
    if (type == "cell") {
        GeneralCell c;
        c.base = rectset_from_json(need(j, "base", path), path + "/base");
        c.n = need_int(j, "n", path);
        c.lambda = padic_from_json(need(j, "lambda", path), ctx, path + "/lambda");
        // Normalize ord(lambda) into [0, n): shifting by multiples of n stays
        // in the same P_n coset.
        if (!c.lambda.is_zero()) {
            long v = c.lambda.valuation();
            long vn = ((v % c.n) + c.n) % c.n;
            if (vn != v)
                c.lambda = PAdicApprox::from_unit(
                    ctx, vn, c.lambda.unit_residue(ctx, c.lambda.known_digits()),
                    c.lambda.known_digits());
        }
        if (j.contains("center") && !j.at("center").is_null()) {
            c.center = monomial_from_json(j.at("center"), path + "/center");
            c.center_is_zero = false;
        } else {
            c.center = ParamMonomial::one(static_cast<std::size_t>(c.base.l));
            c.center_is_zero = true;
        }
        if (j.contains("lower") && !j.at("lower").is_null())
            c.lower = monomial_from_json(j.at("lower"), path + "/lower");
        if (j.contains("upper") && !j.at("upper").is_null())
            c.upper = monomial_from_json(j.at("upper"), path + "/upper");
        try {
            c.validate();
        } catch (const unsupported_spec& err) {
            throw schema_error(err.what(), path);
        }
        return c;
    }
    throw schema_error("unknown set type '" + type + "'", path + "/type");
}

void check_symbols_bound(const SpecDocument& doc) {
    auto check_expr = [&](const CoeffExpr& e, const char* where) {
        for (const auto& [name, c] : e.terms) {
            (void)c;
            if (!doc.symbols.contains(name))
                throw unbound_symbol("symbol '" + name + "' used in " + where +
                                     " is not declared");
        }
    };
    auto check_mono = [&](const ParamMonomial& m, const char* where) {
        check_expr(m.coeff, where);
    };
    auto check_region = [&](const GammaRegion& region) {
        for (const auto& conj : region.bounds)
            for (const auto& b : conj) check_expr(b.bound, "gamma bound");
    };
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, RectSet>) {
                check_region(s.delta);
            } else if constexpr (std::is_same_v<T, ECellSpec>) {
                check_region(s.base.delta);
                check_mono(s.bound, "ecell bound");
            } else {
                check_region(s.base.delta);
                if (s.lower) check_mono(*s.lower, "cell lower bound");
                if (s.upper) check_mono(*s.upper, "cell upper bound");
                if (!s.center_is_zero) check_mono(s.center, "cell center");
            }
        },
        doc.set);
    check_mono(doc.integrand.f, "integrand f");
    check_mono(doc.integrand.g, "integrand g");
}

void check_integrand_arity(const SpecDocument& doc) {
    std::size_t dim = static_cast<std::size_t>(ambient_dim(doc.set));
    if (doc.integrand.f.exps.size() != dim || doc.integrand.g.exps.size() != dim)
        throw schema_error("integrand exponent arity != ambient dimension " +
                               std::to_string(dim),
                           "/integrand");
}

}  // namespace

SpecDocument parse_spec(const json& j, const PrimeContext& ctx) {
    if (!j.is_object()) throw schema_error("spec must be a JSON object", "/");
    if (j.value("schema", "") != kSpecSchema)
        throw schema_error(std::string("schema must be '") + kSpecSchema + "'", "/schema");
    SpecDocument doc;
    symbols_from_json(j, doc.symbols);
    doc.set = set_from_json(need(j, "set", "/"), ctx, "/set");

    const json& ig = need(j, "integrand", "/");
    auto read_part = [&](const char* key) {
        ParamMonomial m = monomial_from_json(need(ig, key, "/integrand"),
                                             std::string("/integrand/") + key);
        // Cells take exponents over the base plus a 'fiber' power of t - c.
        if (std::holds_alternative<GeneralCell>(doc.set)) {
            long fiber = 0;
            if (ig.at(key).contains("fiber")) fiber = ig.at(key).at("fiber").get<long>();
            m.exps.push_back(fiber);
        }
        return m;
    };
    doc.integrand.f = read_part("f");
    doc.integrand.g = read_part("g");

    if (j.contains("instances")) {
        std::size_t idx = 0;
        for (const auto& inst : j.at("instances"))
            doc.instances.push_back(
                instance_from_json(inst, ctx, "/instances/" + std::to_string(idx++)));
    }
    check_symbols_bound(doc);
    check_integrand_arity(doc);
    return doc;
}

SpecDocument parse_spec_text(const std::string& text, const PrimeContext& ctx) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw schema_error("invalid JSON", "/");
    return parse_spec(j, ctx);
}

json emit_spec(const SpecDocument& doc, const PrimeContext& ctx) {
    json out = symbols_to_json(doc.symbols);
    out["schema"] = kSpecSchema;
    out["set"] = set_to_json(doc.set, ctx);
    auto emit_part = [&](const ParamMonomial& m) {
        ParamMonomial copy = m;
        json extra;
        if (std::holds_alternative<GeneralCell>(doc.set)) {
            extra["fiber"] = copy.exps.back();
            copy.exps.pop_back();
        }
        json mj = monomial_to_json(copy);
        if (!extra.is_null()) mj["fiber"] = extra["fiber"];
        return mj;
    };
    out["integrand"] = json{{"f", emit_part(doc.integrand.f)}, {"g", emit_part(doc.integrand.g)}};
    if (!doc.instances.empty()) {
        json insts = json::array();
        for (const auto& i : doc.instances) insts.push_back(instance_to_json(i));
        out["instances"] = insts;
    }
    return out;
}

}  // namespace rectint
