#ifndef RECTINT_TRANSFORM_HPP
#define RECTINT_TRANSFORM_HPP

#include <optional>
#include <variant>
#include <vector>

#include "rectint/cellspec.hpp"

namespace rectint {

// Validity data stored with power steps so inversion can take n-th roots
// without searching: the domain coordinate ranges in K^(k) and the image in
// P_n^(kprime), kprime = k + ord(n).
struct HenselData {
    long n = 1;
    int k = 1;
    int kprime = 1;

    bool operator==(const HenselData&) const = default;
};

using Scalar = std::variant<PAdicApprox, CoeffExpr>;

// Insert the constant 0 as coordinate `pos` (dimension n -> n+1).
struct StepF0 {
    int pos = 0;
};

// x |-> (alpha_0 x_0^{a_0}, ..., alpha_{n-1} x_{n-1}^{a_{n-1}}).
struct StepF1 {
    std::vector<Scalar> alphas;
    std::vector<long> exps;
    std::optional<HenselData> hensel;  // required when some |a_i| > 1
};

// x_target |-> x_target * beta * prod_{j != target} x_j^{exps[j]}.
struct StepF2 {
    int target = 0;
    CoeffExpr coeff;
    std::vector<long> exps;  // full-length; exps[target] == 0
};

// How ord(x_target + c) resolves on the step's domain; needed to pull
// monomial certificates through a translation.
enum class TcDominance { None, Coordinate, Center };

// x_target |-> x_target + c(xi, x_0, ..., x_{target-1}).
struct StepTc {
    int target = 0;
    ParamMonomial center;  // exponents over coordinates 0..target-1 only
    TcDominance dominance = TcDominance::None;
};

struct StepSwap {
    int i = 0;
    int j = 0;
};

using Step = std::variant<StepF0, StepF1, StepF2, StepTc, StepSwap>;

int step_dim_delta(const Step& s);  // +1 for F0, else 0

// Composition of basic steps with domain/codomain descriptors and the
// certified monomial whose order equals the Jacobian order (absent exactly
// when the program inserts a zero coordinate).
struct TransformProgram {
    std::vector<Step> steps;
    SetSpec domain;
    SetSpec codomain;
    std::optional<ParamMonomial> jacCert;

    int domain_dim() const { return ambient_dim(domain); }
    int codomain_dim() const { return ambient_dim(codomain); }
};

using Point = std::vector<PAdicApprox>;

Point apply_step(const Step& s, const SymbolTable& table, const ParamInstance& inst,
                 const PrimeContext& ctx, const Point& x);
Point invert_step(const Step& s, const SymbolTable& table, const ParamInstance& inst,
                  const PrimeContext& ctx, const Point& y);

// Evaluates the program on a point of its domain; DomainViolation when the
// point fails the domain's membership test.
Point apply(const TransformProgram& prog, const SymbolTable& table, const ParamInstance& inst,
            const PrimeContext& ctx, const Point& x);
Point invert(const TransformProgram& prog, const SymbolTable& table, const ParamInstance& inst,
             const PrimeContext& ctx, const Point& y);

// Order of the Jacobian at x: sums the per-step orders along the trajectory
// and cross-checks the certificate when one is present.
long jacobian_order(const TransformProgram& prog, const SymbolTable& table,
                    const ParamInstance& inst, const PrimeContext& ctx, const Point& x);

// Pulls monomials on the codomain back to monomials on the domain by formal
// substitution of each step. Mints derived symbols for composite
// coefficients.
std::vector<ParamMonomial> certify_orders(const TransformProgram& prog,
                                          const std::vector<ParamMonomial>& tracked,
                                          SymbolTable& table);

// Monomial certificate for the program's Jacobian order, when the program is
// dimension-preserving.
std::optional<ParamMonomial> jacobian_certificate(const TransformProgram& prog,
                                                  SymbolTable& table, const PrimeContext& ctx);

// Membership of an exact point in a set descriptor.
bool point_in_set(const SetSpec& set, const SymbolTable& table, const ParamInstance& inst,
                  const PrimeContext& ctx, const Point& x);

nlohmann::json program_to_json(const TransformProgram& prog);
TransformProgram program_from_json(const nlohmann::json& j, const PrimeContext& ctx,
                                   const std::string& path);

// Human-readable rendering in arrow notation, for audit logs.
std::string describe_program(const TransformProgram& prog);

}  // namespace rectint

#endif
