#ifndef RECTINT_RECTILINEAR_HPP
#define RECTINT_RECTILINEAR_HPP

#include <string>
#include <vector>

#include "rectint/transform.hpp"

namespace rectint {

// One part of a finite partition: an explicit isomorphism from a rectilinear
// target onto a piece of the input set, valid on the parameter stratum
// described by the predicate.
struct RectifiedPart {
    RectSet target;
    TransformProgram program;  // domain = target, codomain = the input set
    PartPredicate predicate;
    std::vector<ParamMonomial> certificates;  // tracked monomials, pulled back
    std::string case_trace;                   // which lemma case produced this part
};

// Rectilinearize an E-set: induction on the number of constrained
// coordinates, with the all-negative-exponent absorption, the nu = 1 split
// and the power-map reduction for nu > 1.
std::vector<RectifiedPart> rectify_e(const ECellSpec& e, const std::vector<ParamMonomial>& tracked,
                                     SymbolTable& table, const PrimeContext& ctx);

// Reduce a cell to E-form and delegate: translation by the center, the
// lambda = 0 fiber, bound normalization via coordinate inversion, the
// residue partition with power maps, and the monomial shear.
//
// Tracked monomials use the cell's coordinates plus one slot for t - c; the
// stated order of each is (1/n) times the monomial order, matching the cell
// decomposition's presentation of tracked functions.
std::vector<RectifiedPart> rectify_cell(const GeneralCell& cell,
                                        const std::vector<ParamMonomial>& tracked,
                                        SymbolTable& table, const PrimeContext& ctx);

// Dispatch on the set kind. RectSet inputs come back as a single identity
// part. Tracked monomials default to the integrand pair (f, g).
std::vector<RectifiedPart> rectify(const SetSpec& set, const std::vector<ParamMonomial>& tracked,
                                   SymbolTable& table, const PrimeContext& ctx);

nlohmann::json parts_to_json(const std::vector<RectifiedPart>& parts, const SymbolTable& table,
                             const PrimeContext& ctx);
std::vector<RectifiedPart> parts_from_json(const nlohmann::json& j, SymbolTable& table,
                                           const PrimeContext& ctx);

// Audit log naming the case that fired for every part, with the programs in
// arrow notation.
std::string parts_audit_log(const std::vector<RectifiedPart>& parts);

}  // namespace rectint

#endif
