#ifndef RECTINT_INTEGRATE_HPP
#define RECTINT_INTEGRATE_HPP

#include <map>
#include <utility>
#include <vector>

#include "rectint/rectilinear.hpp"

namespace rectint {

// Sparse polynomial in T = q^-s and U = q^-1 with rational coefficients.
struct BivarPoly {
    std::map<std::pair<long, long>, mpq_class> coeffs;  // (degT, degU) -> c

    static BivarPoly zero() { return {}; }
    static BivarPoly one() { return monomial(0, 0); }
    static BivarPoly monomial(long dT, long dU, const mpq_class& c = 1);

    bool is_zero() const { return coeffs.empty(); }
    void add_term(long dT, long dU, const mpq_class& c);
    BivarPoly operator+(const BivarPoly& o) const;
    BivarPoly operator*(const BivarPoly& o) const;
    BivarPoly shifted(long dT, long dU) const;
    long min_deg_t() const;
    long min_deg_u() const;
    long max_deg_t() const;

    bool operator==(const BivarPoly&) const = default;
};

// Multiset of denominator factors (1 - U^b T^a), (a, b) != (0, 0).
struct DenomFactors {
    std::map<std::pair<long, long>, int> mult;

    void add(long a, long b, int count = 1);
    BivarPoly factor_poly(long a, long b) const;  // requires b >= 0
    bool operator==(const DenomFactors&) const = default;
};

// |beta|^s |gamma| * num(T, U) / prod (1 - U^b T^a): exact rational function
// of q^-s, valid for real s > s0.
struct RationalInTU {
    long prefT = 0;  // exponent of T outside the fraction (= ord beta)
    long prefU = 0;  // exponent of U outside the fraction (= ord gamma)
    BivarPoly num;
    DenomFactors den;
    bool s0_finite = false;
    mpq_class s0 = 0;
};

// Integral of |x|^(mu s) |x|^nu over R^(k): U^k / (1 - T^mu U^(nu+1)).
RationalInTU integrate_rect_factor(int k, long mu, long nu);

// Finite sum over the region's tuples of T^(wT . gamma) U^(wU . gamma).
BivarPoly sum_gamma(const GammaRegion& region, const std::vector<long>& weights_t,
                    const std::vector<long>& weights_u, const SymbolTable& table,
                    const ParamInstance& inst);

// Assembles the full parametric integral from rectified parts over a common
// instance-independent denominator. Parts whose program inserts a zero
// coordinate carry no mass and are skipped; parts outside the instance's
// stratum contribute factors to Q but nothing to the numerator.
RationalInTU integrate_parts(const std::vector<RectifiedPart>& parts, const Integrand& integrand,
                             const SymbolTable& table, const ParamInstance& inst);

// Exact specialization at integer s (T = q^-s is then rational).
mpq_class evaluate(const RationalInTU& r, long q, long s);

nlohmann::json result_to_json(const RationalInTU& r);

}  // namespace rectint

#endif
