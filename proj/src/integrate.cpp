#include "rectint/integrate.hpp"

#include <algorithm>

namespace rectint {

using nlohmann::json;

BivarPoly BivarPoly::monomial(long dT, long dU, const mpq_class& c) {
    BivarPoly p;
    if (c != 0) p.coeffs[{dT, dU}] = c;
    return p;
}

void BivarPoly::add_term(long dT, long dU, const mpq_class& c) {
    if (c == 0) return;
    auto key = std::make_pair(dT, dU);
    auto it = coeffs.find(key);
    if (it == coeffs.end()) {
        coeffs.emplace(key, c);
    } else {
        it->second += c;
        if (it->second == 0) coeffs.erase(it);
    }
}

BivarPoly BivarPoly::operator+(const BivarPoly& o) const {
    BivarPoly r = *this;
    for (const auto& [k, c] : o.coeffs) r.add_term(k.first, k.second, c);
    return r;
}

BivarPoly BivarPoly::operator*(const BivarPoly& o) const {
    BivarPoly r;
    for (const auto& [ka, ca] : coeffs)
        for (const auto& [kb, cb] : o.coeffs)
            r.add_term(ka.first + kb.first, ka.second + kb.second, ca * cb);
    return r;
}

BivarPoly BivarPoly::shifted(long dT, long dU) const {
    BivarPoly r;
    for (const auto& [k, c] : coeffs) r.coeffs[{k.first + dT, k.second + dU}] = c;
    return r;
}

long BivarPoly::min_deg_t() const {
    long m = 0;
    bool first = true;
    for (const auto& [k, c] : coeffs) {
        (void)c;
        if (first || k.first < m) m = k.first;
        first = false;
    }
    return m;
}

long BivarPoly::min_deg_u() const {
    long m = 0;
    bool first = true;
    for (const auto& [k, c] : coeffs) {
        (void)c;
        if (first || k.second < m) m = k.second;
        first = false;
    }
    return m;
}

long BivarPoly::max_deg_t() const {
    long m = 0;
    for (const auto& [k, c] : coeffs) {
        (void)c;
        m = std::max(m, k.first);
    }
    return m;
}

void DenomFactors::add(long a, long b, int count) {
    if (a == 0 && b == 0) throw error("denominator factor (0,0) is degenerate");
    mult[{a, b}] += count;
}

BivarPoly DenomFactors::factor_poly(long a, long b) const {
    BivarPoly p = BivarPoly::one();
    p.add_term(a, b, -1);
    return p;
}

RationalInTU integrate_rect_factor(int k, long mu, long nu) {
    if (!(mu > 0 || (mu == 0 && nu + 1 > 0)))
        throw divergent("integral over R^(k) diverges: mu = " + std::to_string(mu) +
                        ", nu = " + std::to_string(nu));
    RationalInTU r;
    r.num = BivarPoly::monomial(0, k);
    r.den.add(mu, nu + 1);
    if (mu > 0) {
        r.s0_finite = true;
        r.s0 = mpq_class(-(nu + 1), mu);
        r.s0.canonicalize();
    }
    return r;
}

BivarPoly sum_gamma(const GammaRegion& region, const std::vector<long>& weights_t,
                    const std::vector<long>& weights_u, const SymbolTable& table,
                    const ParamInstance& inst) {
    if (weights_t.size() != static_cast<std::size_t>(region.dim()) ||
        weights_u.size() != static_cast<std::size_t>(region.dim()))
        throw error("sum_gamma: weight arity mismatch");
    BivarPoly out;
    for (const auto& gamma : enumerate_gamma(region, table, inst)) {
        long dT = 0, dU = 0;
        for (std::size_t i = 0; i < gamma.size(); ++i) {
            dT += weights_t[i] * gamma[i];
            dU += weights_u[i] * gamma[i];
        }
        if (dT < 0 || dU < 0)
            throw negative_degree("sum_gamma: weights drive a degree negative at gamma tuple");
        out.add_term(dT, dU, 1);
    }
    if (region.dim() == 0) out = BivarPoly::one();
    return out;
}

namespace {

bool program_has_f0(const TransformProgram& prog) {
    for (const auto& s : prog.steps)
        if (std::holds_alternative<StepF0>(s)) return true;
    return false;
}

struct PartShape {
    bool degenerate = false;      // F0 in the program: measure zero
    std::string divergent_reason; // nonempty: the part integral diverges
    std::vector<long> mu;         // f exponents on target coords
    std::vector<long> nug;        // g + jacobian exponents on target coords
    CoeffExpr prefT;              // ord of the f coefficient
    CoeffExpr prefU;              // ord of g and jacobian coefficients
    DenomFactors factors;         // free-coordinate factors
};

PartShape part_shape(const RectifiedPart& part) {
    PartShape sh;
    if (program_has_f0(part.program)) {
        sh.degenerate = true;
        return sh;
    }
    if (part.certificates.size() < 2)
        throw error("integrate_parts: parts must carry certificates for f and g");
    if (!part.program.jacCert)
        throw error("integrate_parts: missing jacobian certificate on a full part");
    const ParamMonomial& f = part.certificates[0];
    const ParamMonomial& g = part.certificates[1];
    const ParamMonomial& j = *part.program.jacCert;
    const RectSet& t = part.target;
    if (f.exps.size() != static_cast<std::size_t>(t.l) ||
        g.exps.size() != static_cast<std::size_t>(t.l))
        throw error("integrate_parts: certificate arity mismatch");
    sh.mu = f.exps;
    sh.nug.resize(static_cast<std::size_t>(t.l));
    for (int i = 0; i < t.l; ++i)
        sh.nug[static_cast<std::size_t>(i)] =
            g.exps[static_cast<std::size_t>(i)] + j.exps[static_cast<std::size_t>(i)];
    sh.prefT = f.coeff;
    sh.prefU = g.coeff;
    sh.prefU += j.coeff;
    for (int i = t.lPrime - 1; i < t.l; ++i) {
        long mu = sh.mu[static_cast<std::size_t>(i)];
        long nu = sh.nug[static_cast<std::size_t>(i)];
        if (!(mu > 0 || (mu == 0 && nu + 1 > 0))) {
            sh.divergent_reason = "part integral diverges on a free coordinate (mu = " +
                                  std::to_string(mu) + ", nu = " + std::to_string(nu) + ")";
            return sh;
        }
        sh.factors.add(mu, nu + 1);
    }
    return sh;
}

}  // namespace

RationalInTU integrate_parts(const std::vector<RectifiedPart>& parts, const Integrand& integrand,
                             const SymbolTable& table, const ParamInstance& inst) {
    (void)integrand;  // certificates already carry f and g through the maps
    RationalInTU out;

    // The common denominator collects every part's factors, degenerate parts
    // aside, so Q cannot depend on the instance.
    std::vector<PartShape> shapes;
    shapes.reserve(parts.size());
    for (const auto& part : parts) shapes.push_back(part_shape(part));
    // a divergent-form part matters only on its own stratum; elsewhere the
    // proposition's hypothesis (existence for s >> 0) excludes it
    for (std::size_t pi = 0; pi < parts.size(); ++pi) {
        if (!shapes[pi].divergent_reason.empty() &&
            parts[pi].predicate.holds(table, inst))
            throw divergent(shapes[pi].divergent_reason);
    }
    for (const auto& sh : shapes) {
        if (sh.degenerate || !sh.divergent_reason.empty()) continue;
        for (const auto& [f, c] : sh.factors.mult) {
            int have = out.den.mult.count(f) ? out.den.mult.at(f) : 0;
            if (c > have) out.den.mult[f] = c;
        }
        for (const auto& [f, c] : sh.factors.mult) {
            (void)c;
            if (f.first > 0) {
                mpq_class cand(-f.second, f.first);
                cand.canonicalize();
                if (!out.s0_finite || cand > out.s0) {
                    out.s0_finite = true;
                    out.s0 = cand;
                }
            }
        }
    }

    // Numerator: active, nondegenerate parts with |f|, |g| not identically 0.
    struct Piece {
        long prefT, prefU;
        BivarPoly poly;
    };
    std::vector<Piece> pieces;
    for (std::size_t pi = 0; pi < parts.size(); ++pi) {
        const auto& part = parts[pi];
        const auto& sh = shapes[pi];
        if (sh.degenerate) continue;
        if (!part.predicate.holds(table, inst)) continue;
        OrdValue pT = table.eval(sh.prefT, inst);
        OrdValue pU = table.eval(sh.prefU, inst);
        if (pT.infinite || pU.infinite) continue;  // integrand vanishes on the part

        const RectSet& t = part.target;
        // Gamma block: weights mu_j and nu_j + 1 per constrained coordinate.
        BivarPoly block;
        for (const auto& gamma : enumerate_gamma(t.delta, table, inst)) {
            long dT = 0, dU = 0;
            for (std::size_t i = 0; i < gamma.size(); ++i) {
                dT += sh.mu[i] * gamma[i];
                dU += (sh.nug[i] + 1) * gamma[i];
            }
            block.add_term(dT, dU, 1);
        }
        if (block.is_zero()) continue;  // empty Delta block under this instance
        // all l coordinates contribute U^k each (shell depth), collected here
        BivarPoly poly = block.shifted(0, static_cast<long>(t.k) * t.l);
        // clear the part's own factors from Q's surplus later; remember data
        Piece piece;
        piece.prefT = pT.v;
        piece.prefU = pU.v;
        piece.poly = poly;
        // multiply by the factors in Q that this part does not share
        for (const auto& [f, c] : out.den.mult) {
            int have = sh.factors.mult.count(f) ? sh.factors.mult.at(f) : 0;
            for (int rep = have; rep < c; ++rep)
                piece.poly = piece.poly * out.den.factor_poly(f.first, f.second);
        }
        pieces.push_back(std::move(piece));
    }

    if (pieces.empty()) {
        out.num = BivarPoly::zero();
        return out;
    }

    long minT = pieces[0].prefT, minU = pieces[0].prefU;
    for (const auto& p : pieces) {
        minT = std::min(minT, p.prefT);
        minU = std::min(minU, p.prefU);
    }
    BivarPoly num;
    for (const auto& p : pieces)
        num = num + p.poly.shifted(p.prefT - minT, p.prefU - minU);
    out.prefT = minT;
    out.prefU = minU;
    // normalize: numerator degrees nonnegative, minimum degree folded into
    // the prefactors
    long shiftT = num.min_deg_t(), shiftU = num.min_deg_u();
    if (!num.is_zero() && (shiftT != 0 || shiftU != 0)) {
        num = num.shifted(-shiftT, -shiftU);
        out.prefT += shiftT;
        out.prefU += shiftU;
    }
    out.num = num;
    return out;
}

mpq_class evaluate(const RationalInTU& r, long q, long s) {
    if (q < 2) throw error("evaluate: q must be at least 2");
    auto qpow = [&](long e) {
        mpz_class num;
        mpz_ui_pow_ui(num.get_mpz_t(), static_cast<unsigned long>(q),
                      static_cast<unsigned long>(e < 0 ? -e : e));
        if (e >= 0) return mpq_class(num);
        mpq_class v(1);
        v /= num;
        return v;
    };
    // poles first: a factor vanishes iff a*s + b = 0
    for (const auto& [f, c] : r.den.mult) {
        (void)c;
        if (f.first * s + f.second == 0)
            throw pole_at("denominator factor (1 - q^-(" + std::to_string(f.first) + "s+" +
                          std::to_string(f.second) + ")) vanishes at s = " + std::to_string(s));
    }
    if (r.s0_finite && mpq_class(s) <= r.s0)
        throw not_convergent("evaluate: s below the convergence threshold");
    mpq_class val = qpow(-s * r.prefT - r.prefU);
    mpq_class acc = 0;
    for (const auto& [k, c] : r.num.coeffs) acc += c * qpow(-s * k.first - k.second);
    val *= acc;
    for (const auto& [f, c] : r.den.mult) {
        mpq_class fac = 1 - qpow(-(f.first * s + f.second));
        for (int i = 0; i < c; ++i) val /= fac;
    }
    val.canonicalize();
    return val;
}

json result_to_json(const RationalInTU& r) {
    json num = json::array();
    for (const auto& [k, c] : r.num.coeffs) {
        num.push_back(json::array({c.get_num().get_str(), c.get_den().get_str(), k.first,
                                   k.second}));
    }
    json den = json::array();
    for (const auto& [f, c] : r.den.mult)
        for (int i = 0; i < c; ++i) den.push_back(json::array({f.first, f.second}));
    json out{{"schema", "rectint-result/1"},
             {"prefT", r.prefT},
             {"prefU", r.prefU},
             {"num", num},
             {"den", den}};
    if (r.s0_finite)
        out["s0"] = json::array({r.s0.get_num().get_str(), r.s0.get_den().get_str()});
    else
        out["s0"] = nullptr;
    return out;
}

}  // namespace rectint
