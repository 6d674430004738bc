#ifndef RECTINT_ORACLE_HPP
#define RECTINT_ORACLE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rectint/rectilinear.hpp"

namespace rectint {

// Exact truncated integral: the partial sum over every residue class with
// per-coordinate valuations inside the depth window, plus a rigorous bound
// on everything omitted. All arithmetic is rational; there are no tolerance
// parameters anywhere in this layer.
struct TruncationReport {
    mpq_class value = 0;
    mpq_class tail_bound = 0;
    int depth = 0;
    long cells_visited = 0;
};

// One residue class per coordinate: exactly zero, or the shell
// { x : ord x = v, ac(x) = unit (mod p^depth) }.
struct CoordClass {
    bool zero = false;
    long v = 0;
    int depth = 1;
    std::uint64_t unit = 1;
};

using PointClass = std::vector<CoordClass>;

mpq_class class_measure(const PointClass& c, long q);

// Integrates |f|^s |g| over the set by exhausting residue classes up to the
// depth window; q must equal the context prime in this numeric layer.
TruncationReport truncated_integral(const SetSpec& set, const Integrand& integrand,
                                    const SymbolTable& table, const ParamInstance& inst,
                                    const PrimeContext& ctx, long q, long s, int depth);

// Measure of the set (integrand 1) with its truncation tail.
TruncationReport oracle_measure(const SetSpec& set, const SymbolTable& table,
                                const ParamInstance& inst, const PrimeContext& ctx, int depth);

struct ImageCompareResult {
    bool ok = true;
    std::string witness;
};

// Checks that apply() maps the depth-N domain classes injectively onto
// exactly the depth-N codomain classes. Intended for order-preserving
// programs (identity, swaps, mutation fixtures).
ImageCompareResult compare_set_image(const TransformProgram& prog, const SymbolTable& table,
                                     const ParamInstance& inst, const PrimeContext& ctx,
                                     int depth);

struct PartitionReport {
    bool ok = true;
    std::string detail;
    mpq_class input_measure = 0;
    mpq_class parts_measure = 0;
    long input_classes = 0;
    long image_classes = 0;
};

// Verifies that the images of the parts' programs are pairwise disjoint,
// land inside the input set, and account for its depth-N measure exactly.
// Cells are compared in centered coordinates (t - c), so a trailing
// translation step is peeled off rather than enumerated.
PartitionReport verify_partition(const SetSpec& input, const std::vector<RectifiedPart>& parts,
                                 const SymbolTable& table, const ParamInstance& inst,
                                 const PrimeContext& ctx, int depth);

// Ball transport at a sampled class: measure of the image of one class
// equals q^(-jacobian order) times the class measure.
struct BallTransportResult {
    bool ok = true;
    std::string witness;
};
BallTransportResult check_ball_transport(const TransformProgram& prog, const SymbolTable& table,
                                         const ParamInstance& inst, const PrimeContext& ctx,
                                         const PointClass& ball);

// Deterministic sampler for points of a rectilinear set at depth N.
std::vector<Point> sample_rect_points(const RectSet& target, const SymbolTable& table,
                                      const ParamInstance& inst, const PrimeContext& ctx,
                                      int count, std::uint64_t seed);

}  // namespace rectint

#endif
