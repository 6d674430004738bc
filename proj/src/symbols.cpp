#include "rectint/symbols.hpp"

#include <algorithm>

namespace rectint {

long floor_div(long a, long b) {
    long q = a / b, r = a % b;
    return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

long ceil_div(long a, long b) { return -floor_div(-a, b); }

void SymbolTable::declare(const std::string& name, SymbolRole role) {
    if (name.empty() || name[0] == '@')
        throw unbound_symbol("symbol names starting with '@' are reserved: " + name);
    auto [it, fresh] = defs_.emplace(name, SymbolDef{role, false, {}, 1, DivMode::Exact});
    if (!fresh) throw unbound_symbol("duplicate symbol declaration: " + name);
}

const SymbolDef& SymbolTable::at(const std::string& name) const {
    auto it = defs_.find(name);
    if (it == defs_.end()) throw unbound_symbol("unknown symbol: " + name);
    return it->second;
}

CoeffExpr SymbolTable::reduce(const CoeffExpr& inner, long divisor, DivMode mode) {
    if (divisor <= 0) throw error("reduce: divisor must be positive");
    if (divisor == 1) return inner;
    if (inner.is_constant()) {
        switch (mode) {
            case DivMode::Floor: return CoeffExpr::constant(floor_div(inner.offset, divisor));
            case DivMode::Ceil: return CoeffExpr::constant(ceil_div(inner.offset, divisor));
            case DivMode::Exact:
                if (inner.offset % divisor != 0)
                    throw unsupported_spec("order expression not divisible by " +
                                           std::to_string(divisor));
                return CoeffExpr::constant(inner.offset / divisor);
        }
    }
    std::string name = "@" + std::to_string(next_id_++);
    defs_[name] = SymbolDef{SymbolRole::OrderOnly, true, inner, divisor, mode};
    return CoeffExpr::symbol(name);
}

void SymbolTable::adopt_derived(const std::string& name, const SymbolDef& def) {
    defs_[name] = def;
    if (name.size() > 1 && name[0] == '@') {
        int id = std::atoi(name.c_str() + 1);
        next_id_ = std::max(next_id_, id + 1);
    }
}

OrdValue SymbolTable::eval_symbol(const std::string& name, const ParamInstance& inst,
                                  int depth) const {
    if (depth > 64) throw error("symbol definition chain too deep: " + name);
    const SymbolDef& def = at(name);
    if (!def.derived) {
        auto it = inst.entries.find(name);
        if (it == inst.entries.end())
            throw instance_required("instance assigns no order to symbol " + name);
        if (it->second.zero) return OrdValue::inf();
        return OrdValue::fin(it->second.ord);
    }
    OrdValue in = eval_impl(def.inner, inst, depth + 1);
    if (in.infinite) return in;
    switch (def.mode) {
        case DivMode::Floor: return OrdValue::fin(floor_div(in.v, def.divisor));
        case DivMode::Ceil: return OrdValue::fin(ceil_div(in.v, def.divisor));
        case DivMode::Exact:
            if (in.v % def.divisor != 0)
                throw unsupported_spec("order of " + name + " is " + std::to_string(in.v) +
                                       ", not divisible by " + std::to_string(def.divisor));
            return OrdValue::fin(in.v / def.divisor);
    }
    return OrdValue::fin(0);  // unreachable
}

OrdValue SymbolTable::eval_impl(const CoeffExpr& e, const ParamInstance& inst, int depth) const {
    long total = e.offset;
    for (const auto& [name, c] : e.terms) {
        OrdValue s = eval_symbol(name, inst, depth);
        if (s.infinite) {
            if (c < 0)
                throw instance_required("symbol " + name +
                                        " is zero but occurs with a negative exponent");
            if (c > 0) return OrdValue::inf();
            continue;
        }
        total += c * s.v;
    }
    return OrdValue::fin(total);
}

OrdValue SymbolTable::eval(const CoeffExpr& e, const ParamInstance& inst) const {
    return eval_impl(e, inst, 0);
}

long SymbolTable::eval_finite(const CoeffExpr& e, const ParamInstance& inst,
                              const std::string& what) const {
    OrdValue v = eval(e, inst);
    if (v.infinite) throw instance_required(what + ": order is infinite under this instance");
    return v.v;
}

bool SymbolTable::symbol_is_zero(const std::string& name, const ParamInstance& inst) const {
    const SymbolDef& def = at(name);
    if (def.derived) {
        OrdValue v = eval(CoeffExpr::symbol(name), inst);
        return v.infinite;
    }
    auto it = inst.entries.find(name);
    if (it == inst.entries.end())
        throw instance_required("instance assigns nothing to symbol " + name);
    return it->second.zero;
}

PAdicApprox SymbolTable::coeff_value(const CoeffExpr& e, const ParamInstance& inst,
                                     const PrimeContext& ctx) const {
    // A lone valued symbol contributes its instance value; everything else is
    // order-only with angular part normalized to 1.
    if (e.terms.size() == 1 && e.terms.begin()->second == 1 &&
        at(e.terms.begin()->first).role == SymbolRole::Valued) {
        const std::string& name = e.terms.begin()->first;
        auto it = inst.entries.find(name);
        if (it == inst.entries.end() || !it->second.value)
            throw instance_required("instance carries no value for symbol " + name);
        PAdicApprox v = *it->second.value;
        if (e.offset == 0) return v;
        if (v.is_zero()) return v;
        return PAdicApprox::from_unit(ctx, v.valuation() + e.offset,
                                      v.unit_residue(ctx, v.known_digits()), v.known_digits());
    }
    for (const auto& [name, c] : e.terms) {
        if (at(name).role == SymbolRole::Valued && c != 0)
            throw unsupported_spec("valued symbol " + name +
                                   " cannot occur in a composite order expression");
    }
    OrdValue v = eval(e, inst);
    if (v.infinite) return PAdicApprox::zero_value();
    return PAdicApprox::from_unit(ctx, v.v, mpz_class(1), ctx.precision);
}

bool PartPredicate::holds(const SymbolTable& table, const ParamInstance& inst) const {
    for (const auto& s : require_nonzero)
        if (table.symbol_is_zero(s, inst)) return false;
    for (const auto& s : require_zero)
        if (!table.symbol_is_zero(s, inst)) return false;
    for (const auto& oc : ord_conds) {
        OrdValue v = table.eval(oc.expr, inst);
        if (v.infinite) {
            if (!oc.at_least) return false;  // +infinity <= c never holds
            continue;
        }
        if (oc.at_least ? v.v < oc.c : v.v > oc.c) return false;
    }
    return true;
}

}  // namespace rectint
