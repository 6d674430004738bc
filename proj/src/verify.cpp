#include "rectint/verify.hpp"

#include <sstream>

namespace rectint {

namespace {

// Direct order of a tracked monomial at the image point, compared with the
// pulled-back certificate at the preimage. Cell inputs evaluate in centered
// coordinates, so the trailing translation is excluded from the trajectory.
VerifyItem check_certificates(const SpecDocument& doc, const std::vector<RectifiedPart>& parts,
                              const ParamInstance& inst, SymbolTable& table,
                              const PrimeContext& ctx, const VerifyOptions& opt) {
    VerifyItem item{"certificate-soundness", true, ""};
    const bool cell_input = std::holds_alternative<GeneralCell>(doc.set);
    long n_div = cell_input ? std::get<GeneralCell>(doc.set).n : 1;
    std::vector<ParamMonomial> tracked{doc.integrand.f, doc.integrand.g};
    long checked = 0;
    for (std::size_t pi = 0; pi < parts.size(); ++pi) {
        const auto& part = parts[pi];
        if (!part.predicate.holds(table, inst)) continue;
        TransformProgram prog = part.program;
        bool stripped = false;
        if (cell_input && !prog.steps.empty() &&
            std::holds_alternative<StepTc>(prog.steps.back())) {
            prog.steps.pop_back();
            stripped = true;
        }
        (void)stripped;
        auto points = sample_rect_points(part.target, table, inst, ctx, opt.samples,
                                         opt.seed + pi);
        for (const auto& x : points) {
            Point y = x;
            for (const auto& s : prog.steps) y = apply_step(s, table, inst, ctx, y);
            std::vector<long> xords;
            for (const auto& c : x) xords.push_back(c.valuation());
            for (std::size_t j = 0; j < tracked.size(); ++j) {
                if (part.certificates.size() <= j) continue;
                OrdValue cert = part.certificates[j].ord_at(table, inst, xords);
                // direct: n_div * ord(b_j) = ord of the tracked numerator monomial
                OrdValue coeff = table.eval(tracked[j].coeff, inst);
                if (coeff.infinite) continue;  // |b_j| identically zero
                bool zero_hit = false;
                long direct_num = coeff.v;
                for (std::size_t i = 0; i < tracked[j].exps.size(); ++i) {
                    if (tracked[j].exps[i] == 0) continue;
                    if (y[i].is_zero()) {
                        zero_hit = true;
                        break;
                    }
                    direct_num += tracked[j].exps[i] * y[i].valuation();
                }
                if (zero_hit || cert.infinite) continue;
                if (direct_num % n_div != 0 || direct_num / n_div != cert.v) {
                    item.pass = false;
                    std::ostringstream os;
                    os << "part " << pi << ": certificate " << j << " claims " << cert.v
                       << ", direct order is " << direct_num << "/" << n_div;
                    item.detail = os.str();
                    return item;
                }
                ++checked;
            }
        }
    }
    item.detail = std::to_string(checked) + " point-certificate checks";
    return item;
}

VerifyItem check_transport(const std::vector<RectifiedPart>& parts, const ParamInstance& inst,
                           SymbolTable& table, const PrimeContext& ctx,
                           const VerifyOptions& opt) {
    VerifyItem item{"measure-transport", true, ""};
    long checked = 0;
    for (std::size_t pi = 0; pi < parts.size(); ++pi) {
        const auto& part = parts[pi];
        if (!part.predicate.holds(table, inst)) continue;
        if (!part.program.jacCert) continue;  // degenerate fiber part
        // translations carry Jacobian order 0 and preserve measure exactly;
        // transport is checked on the translation-free trajectory so that a
        // center known to few digits cannot block the class arithmetic
        TransformProgram prog = part.program;
        if (!prog.steps.empty() && std::holds_alternative<StepTc>(prog.steps.back()))
            prog.steps.pop_back();
        auto points = sample_rect_points(part.target, table, inst, ctx,
                                         std::max(1, opt.samples / 10), opt.seed ^ (pi + 77));
        for (const auto& x : points) {
            PointClass ball;
            for (const auto& c : x) {
                int d = std::min(c.known_digits(), ctx.precision - 2);
                d = std::max(d, part.target.k + 2);
                ball.push_back(CoordClass{false, c.valuation(), d,
                                          c.unit_residue(ctx, d).get_ui()});
            }
            auto res = check_ball_transport(prog, table, inst, ctx, ball);
            if (!res.ok) {
                item.pass = false;
                item.detail = "part " + std::to_string(pi) + ": " + res.witness;
                return item;
            }
            ++checked;
        }
    }
    item.detail = std::to_string(checked) + " transported balls";
    return item;
}

VerifyItem check_oracle_agreement(const SpecDocument& doc,
                                  const std::vector<RectifiedPart>& parts,
                                  const ParamInstance& inst, SymbolTable& table,
                                  const PrimeContext& ctx, const VerifyOptions& opt) {
    VerifyItem item{"symbolic-vs-oracle", true, ""};
    RationalInTU sym = integrate_parts(parts, doc.integrand, table, inst);
    std::ostringstream os;
    for (long s : opt.s_values) {
        mpq_class value = evaluate(sym, static_cast<long>(ctx.p), s);
        TruncationReport rep = truncated_integral(doc.set, doc.integrand, table, inst, ctx,
                                                  static_cast<long>(ctx.p), s, opt.depth);
        if (value < rep.value || value > rep.value + rep.tail_bound) {
            item.pass = false;
            item.detail = "s = " + std::to_string(s) + ": symbolic " + value.get_str() +
                          " outside [" + rep.value.get_str() + ", (+" +
                          rep.tail_bound.get_str() + ")]";
            return item;
        }
        os << "s=" << s << ": " << value.get_str() << " in oracle window; ";
    }
    item.detail = os.str();
    return item;
}

}  // namespace

VerifyReport verify_spec(const SpecDocument& doc, const std::vector<RectifiedPart>& parts,
                         const ParamInstance& inst, SymbolTable& table, const PrimeContext& ctx,
                         const VerifyOptions& opt) {
    VerifyReport rep;
    {
        VerifyItem item{"partition", true, ""};
        try {
            PartitionReport pr = verify_partition(doc.set, parts, table, inst, ctx, opt.depth);
            item.pass = pr.ok;
            item.detail = pr.ok ? std::to_string(pr.image_classes) + " classes, measure " +
                                      pr.input_measure.get_str()
                                : pr.detail;
        } catch (const error& e) {
            item.pass = false;
            item.detail = e.what();
        }
        rep.items.push_back(item);
    }
    try {
        rep.items.push_back(check_certificates(doc, parts, inst, table, ctx, opt));
    } catch (const error& e) {
        rep.items.push_back(VerifyItem{"certificate-soundness", false, e.what()});
    }
    try {
        rep.items.push_back(check_transport(parts, inst, table, ctx, opt));
    } catch (const error& e) {
        rep.items.push_back(VerifyItem{"measure-transport", false, e.what()});
    }
    try {
        rep.items.push_back(check_oracle_agreement(doc, parts, inst, table, ctx, opt));
    } catch (const error& e) {
        rep.items.push_back(VerifyItem{"symbolic-vs-oracle", false, e.what()});
    }
    return rep;
}

}  // namespace rectint
