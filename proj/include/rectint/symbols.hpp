#ifndef RECTINT_SYMBOLS_HPP
#define RECTINT_SYMBOLS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rectint/padic.hpp"

namespace rectint {

enum class SymbolRole { OrderOnly, Valued };
enum class DivMode { Exact, Floor, Ceil };

// Integer affine expression in parameter-symbol orders:
//     ord = sum_i terms[s_i] * ord(s_i) + offset.
// Division never appears here; it lives in derived-symbol definitions, so
// affine combinations of expressions stay representable.
struct CoeffExpr {
    std::map<std::string, long> terms;
    long offset = 0;

    static CoeffExpr constant(long c) { return CoeffExpr{{}, c}; }
    static CoeffExpr symbol(const std::string& name) { return CoeffExpr{{{name, 1}}, 0}; }

    bool is_constant() const { return terms.empty(); }
    bool is_single_symbol() const {
        return terms.size() == 1 && terms.begin()->second == 1 && offset == 0;
    }

    CoeffExpr& add_term(const std::string& name, long c) {
        if (c != 0) {
            long& t = terms[name];
            t += c;
            if (t == 0) terms.erase(name);
        }
        return *this;
    }
    CoeffExpr& operator+=(const CoeffExpr& o) {
        for (const auto& [n, c] : o.terms) add_term(n, c);
        offset += o.offset;
        return *this;
    }
    CoeffExpr& operator+=(long c) {
        offset += c;
        return *this;
    }
    CoeffExpr scaled(long c) const {
        CoeffExpr r;
        if (c != 0) {
            for (const auto& [n, t] : terms) r.terms[n] = t * c;
            r.offset = offset * c;
        }
        return r;
    }
    CoeffExpr negated() const { return scaled(-1); }

    bool operator==(const CoeffExpr& o) const = default;
};

// Finite or +infinity order value; infinity arises only from zero symbols.
struct OrdValue {
    bool infinite = false;
    long v = 0;

    static OrdValue inf() { return {true, 0}; }
    static OrdValue fin(long x) { return {false, x}; }
};

struct InstanceEntry {
    bool zero = false;
    long ord = 0;
    std::optional<PAdicApprox> value;  // valued symbols only
};

// Assignment of concrete data to the free parameter symbols at one xi.
struct ParamInstance {
    std::string name;
    std::map<std::string, InstanceEntry> entries;
};

struct SymbolDef {
    SymbolRole role = SymbolRole::OrderOnly;
    bool derived = false;
    // derived symbols only: ord = mode((inner + 0)/divisor)
    CoeffExpr inner;
    long divisor = 1;
    DivMode mode = DivMode::Exact;
};

// Declared parameter symbols plus derived symbols minted by the algorithms.
// Derived symbols are order-only with the angular part normalized to 1.
class SymbolTable {
public:
    void declare(const std::string& name, SymbolRole role);
    bool contains(const std::string& name) const { return defs_.count(name) > 0; }
    const SymbolDef& at(const std::string& name) const;
    const std::map<std::string, SymbolDef>& all() const { return defs_; }

    // Returns an expression for mode(inner / divisor): the expression itself
    // when divisor is 1, a constant when inner is, otherwise a fresh derived
    // symbol carrying the definition.
    CoeffExpr reduce(const CoeffExpr& inner, long divisor, DivMode mode);

    // Re-register a derived definition loaded from a document.
    void adopt_derived(const std::string& name, const SymbolDef& def);

    OrdValue eval(const CoeffExpr& e, const ParamInstance& inst) const;
    // Finite order or error; used where an infinite order is malformed input.
    long eval_finite(const CoeffExpr& e, const ParamInstance& inst,
                     const std::string& what) const;

    bool symbol_is_zero(const std::string& name, const ParamInstance& inst) const;

    // Concrete value of the expression's coefficient: order-only and derived
    // symbols contribute p^ord with angular part 1; a single valued symbol is
    // looked up in the instance.
    PAdicApprox coeff_value(const CoeffExpr& e, const ParamInstance& inst,
                            const PrimeContext& ctx) const;

private:
    OrdValue eval_symbol(const std::string& name, const ParamInstance& inst, int depth) const;
    OrdValue eval_impl(const CoeffExpr& e, const ParamInstance& inst, int depth) const;

    std::map<std::string, SymbolDef> defs_;
    int next_id_ = 0;
};

// Sign condition on a symbolic order: eval(expr) >= c or eval(expr) <= c.
struct OrdCond {
    CoeffExpr expr;
    long c = 0;
    bool at_least = true;

    bool operator==(const OrdCond&) const = default;
};

// Parameter-space stratum a rectified part belongs to: the S_i split plus
// the sign cases on order comparisons that depend on xi.
struct PartPredicate {
    std::vector<std::string> require_nonzero;
    std::vector<std::string> require_zero;
    std::vector<OrdCond> ord_conds;

    bool holds(const SymbolTable& table, const ParamInstance& inst) const;
};

long floor_div(long a, long b);
long ceil_div(long a, long b);

}  // namespace rectint

#endif
