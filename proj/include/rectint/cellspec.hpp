#ifndef RECTINT_CELLSPEC_HPP
#define RECTINT_CELLSPEC_HPP

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rectint/symbols.hpp"

namespace rectint {

inline constexpr const char* kSpecSchema = "rectint/1";

// A term beta * prod_i x_i^(mu_i): parameter coefficient plus an integer
// exponent vector over the ambient coordinates.
struct ParamMonomial {
    CoeffExpr coeff;
    std::vector<long> exps;

    static ParamMonomial one(std::size_t dim) {
        return ParamMonomial{CoeffExpr::constant(0), std::vector<long>(dim, 0)};
    }

    OrdValue ord_at(const SymbolTable& table, const ParamInstance& inst,
                    std::span<const long> coord_ords) const;
    PAdicApprox value_at(const SymbolTable& table, const ParamInstance& inst,
                         const PrimeContext& ctx, std::span<const PAdicApprox> point) const;

    bool operator==(const ParamMonomial&) const = default;
};

// Triangular bound for one gamma coordinate:
//     0 <= gamma_j <= floor((bound(inst) + sum_{i<j} coeffs[i] gamma_i) / div).
// div is 1 for bounds in the plain normal form; larger divisors appear when
// a cut with exponent > 1 is folded into the region.
struct GammaBound {
    CoeffExpr bound;
    std::vector<long> coeffs;  // at most j entries for the j-th coordinate
    long div = 1;

    bool operator==(const GammaBound&) const = default;
};

// Per coordinate, one or more bounds of the triangular form hold jointly;
// conjunctions arise from the lower-bounded blocks of the cell driver.
struct GammaRegion {
    std::vector<std::vector<GammaBound>> bounds;

    int dim() const { return static_cast<int>(bounds.size()); }
    void validate() const;
    void push_coordinate(GammaBound b) { bounds.push_back({std::move(b)}); }

    bool operator==(const GammaRegion&) const = default;
};

// All gamma tuples of the region under an instance, lexicographically.
std::vector<std::vector<long>> enumerate_gamma(const GammaRegion& region, const SymbolTable& table,
                                               const ParamInstance& inst);

// Effective upper bound of one coordinate given the earlier entries; sets
// *finite to false when no conjunct caps it.
long gamma_upper(const std::vector<GammaBound>& conjuncts, const SymbolTable& table,
                 const ParamInstance& inst, std::span<const long> prefix, bool* finite);

// Delta x prod_{i=lPrime}^{l} R^(k): coordinates 0..lPrime-2 carry the
// Gamma-region ord constraints, coordinates lPrime-1..l-1 range freely.
struct RectSet {
    int k = 1;
    int lPrime = 1;
    int l = 0;
    GammaRegion delta;

    void validate() const;

    int dim() const { return l; }
    int free_count() const { return l - lPrime + 1; }

    bool operator==(const RectSet&) const = default;
};

// E-set: base in coordinates 0..m-2 plus a
// final coordinate x_{m-1} in R^(k) with ord x_{m-1} <= ord(bound(x)).
struct ECellSpec {
    RectSet base;
    ParamMonomial bound;

    int m() const { return base.l + 1; }
    int k() const { return base.k; }
    void validate() const;

    bool operator==(const ECellSpec&) const = default;
};

// Cell in cell-decomposition normal form, fibered over an
// already-rectilinear base: for x in base and t the fiber coordinate,
//     ord a1(x) <= ord(t - c(x)) <= ord a2(x)   (either bound optional),
//     t - c(x) in lambda * P_n.
struct GeneralCell {
    RectSet base;
    std::optional<ParamMonomial> lower;  // a1
    std::optional<ParamMonomial> upper;  // a2
    ParamMonomial center;                // c; zero center encoded below
    bool center_is_zero = true;
    PAdicApprox lambda;                  // zero flag forces the fiber {t = c}
    long n = 1;

    int m() const { return base.l; }
    void validate() const;

    bool operator==(const GeneralCell&) const = default;
};

// |f|^s * |g|. For cell sets the last exponent slot refers to t - c and the
// stated order of f is (1/n)(mu * ord(t - c) + ord d(x)), matching how the
// cell decomposition presents tracked functions.
struct Integrand {
    ParamMonomial f;
    ParamMonomial g;

    bool operator==(const Integrand&) const = default;
};

using SetSpec = std::variant<RectSet, ECellSpec, GeneralCell>;

int ambient_dim(const SetSpec& s);
int congruence_level(const SetSpec& s);  // the k of the underlying sets

struct SpecDocument {
    SetSpec set;
    Integrand integrand;
    SymbolTable symbols;
    std::vector<ParamInstance> instances;
};

SpecDocument parse_spec(const nlohmann::json& doc, const PrimeContext& ctx);
SpecDocument parse_spec_text(const std::string& text, const PrimeContext& ctx);
nlohmann::json emit_spec(const SpecDocument& doc, const PrimeContext& ctx);

// Shared JSON helpers (also used by the program/result serializers).
nlohmann::json padic_to_json(const PAdicApprox& x);
PAdicApprox padic_from_json(const nlohmann::json& j, const PrimeContext& ctx,
                            const std::string& path);
nlohmann::json coeff_to_json(const CoeffExpr& e);
CoeffExpr coeff_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json monomial_to_json(const ParamMonomial& m);
ParamMonomial monomial_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json symbols_to_json(const SymbolTable& table);
void symbols_from_json(const nlohmann::json& j, SymbolTable& table);
nlohmann::json instance_to_json(const ParamInstance& inst);
ParamInstance instance_from_json(const nlohmann::json& j, const PrimeContext& ctx,
                                 const std::string& path);
nlohmann::json rectset_to_json(const RectSet& r);
RectSet rectset_from_json(const nlohmann::json& j, const std::string& path);

}  // namespace rectint

#endif
