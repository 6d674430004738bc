#ifndef RECTINT_VERIFY_HPP
#define RECTINT_VERIFY_HPP

#include "rectint/integrate.hpp"
#include "rectint/oracle.hpp"

namespace rectint {

struct VerifyOptions {
    int depth = 8;
    int samples = 100;
    std::uint64_t seed = 1;
    std::vector<long> s_values{1, 2};
};

struct VerifyItem {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyItem> items;
    bool all_pass() const {
        for (const auto& i : items)
            if (!i.pass) return false;
        return true;
    }
};

// Runs the full check battery for one spec and instance: partition
// (disjointness, coverage, exact measure), certificate soundness on sampled
// points, measure transport of sampled balls, and symbolic-vs-oracle
// agreement at the requested s values.
VerifyReport verify_spec(const SpecDocument& doc, const std::vector<RectifiedPart>& parts,
                         const ParamInstance& inst, SymbolTable& table, const PrimeContext& ctx,
                         const VerifyOptions& opt);

}  // namespace rectint

#endif
