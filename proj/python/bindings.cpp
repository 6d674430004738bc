// Python bindings: the p-adic kernel plus the JSON-oriented pipeline
// (parse -> rectify -> integrate -> verify) as string-in/string-out calls.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rectint/verify.hpp"

namespace py = pybind11;
using namespace rectint;

namespace {

struct Session {
    PrimeContext ctx;
    Session(unsigned p, int precision) : ctx(p, precision) {}
};

std::string integrate_json(const std::string& spec_text, unsigned p, int precision,
                           const std::vector<long>& s_values) {
    PrimeContext ctx(p, precision);
    SpecDocument doc = parse_spec_text(spec_text, ctx);
    SymbolTable table = doc.symbols;
    auto parts = rectify(doc.set, {doc.integrand.f, doc.integrand.g}, table, ctx);
    std::vector<ParamInstance> instances = doc.instances;
    if (instances.empty()) instances.push_back(ParamInstance{});
    nlohmann::json results = nlohmann::json::array();
    for (const auto& inst : instances) {
        RationalInTU r = integrate_parts(parts, doc.integrand, table, inst);
        nlohmann::json entry{{"instance", inst.name}, {"result", result_to_json(r)}};
        nlohmann::json values = nlohmann::json::array();
        for (long s : s_values)
            values.push_back(nlohmann::json{
                {"s", s}, {"value", evaluate(r, static_cast<long>(p), s).get_str()}});
        entry["values"] = values;
        results.push_back(entry);
    }
    return nlohmann::json{{"schema", "rectint-integrate/1"}, {"results", results}}.dump(2);
}

std::string rectify_json(const std::string& spec_text, unsigned p, int precision) {
    PrimeContext ctx(p, precision);
    SpecDocument doc = parse_spec_text(spec_text, ctx);
    SymbolTable table = doc.symbols;
    auto parts = rectify(doc.set, {doc.integrand.f, doc.integrand.g}, table, ctx);
    return parts_to_json(parts, table, ctx).dump(2);
}

std::string audit_json(const std::string& spec_text, unsigned p, int precision) {
    PrimeContext ctx(p, precision);
    SpecDocument doc = parse_spec_text(spec_text, ctx);
    SymbolTable table = doc.symbols;
    auto parts = rectify(doc.set, {doc.integrand.f, doc.integrand.g}, table, ctx);
    return parts_audit_log(parts);
}

std::string verify_json(const std::string& spec_text, unsigned p, int precision, int depth,
                        const std::vector<long>& s_values) {
    PrimeContext ctx(p, precision);
    SpecDocument doc = parse_spec_text(spec_text, ctx);
    SymbolTable table = doc.symbols;
    auto parts = rectify(doc.set, {doc.integrand.f, doc.integrand.g}, table, ctx);
    std::vector<ParamInstance> instances = doc.instances;
    if (instances.empty()) instances.push_back(ParamInstance{});
    VerifyOptions opt;
    opt.depth = depth;
    opt.s_values = s_values.empty() ? std::vector<long>{1} : s_values;
    nlohmann::json items = nlohmann::json::array();
    bool all = true;
    for (const auto& inst : instances) {
        VerifyReport rep = verify_spec(doc, parts, inst, table, ctx, opt);
        for (const auto& item : rep.items) {
            items.push_back(nlohmann::json{{"instance", inst.name},
                                           {"check", item.name},
                                           {"pass", item.pass},
                                           {"detail", item.detail}});
            all = all && item.pass;
        }
    }
    return nlohmann::json{{"schema", "rectint-verify/1"}, {"items", items}, {"pass", all}}
        .dump(2);
}

std::string oracle_compare_json(const std::string& spec_text, unsigned p, int precision, long s,
                                int depth) {
    PrimeContext ctx(p, precision);
    SpecDocument doc = parse_spec_text(spec_text, ctx);
    SymbolTable table = doc.symbols;
    auto parts = rectify(doc.set, {doc.integrand.f, doc.integrand.g}, table, ctx);
    std::vector<ParamInstance> instances = doc.instances;
    if (instances.empty()) instances.push_back(ParamInstance{});
    nlohmann::json results = nlohmann::json::array();
    bool all = true;
    for (const auto& inst : instances) {
        RationalInTU r = integrate_parts(parts, doc.integrand, table, inst);
        mpq_class sym = evaluate(r, static_cast<long>(p), s);
        TruncationReport rep =
            truncated_integral(doc.set, doc.integrand, table, inst, ctx,
                               static_cast<long>(p), s, depth);
        bool pass = sym >= rep.value && sym <= rep.value + rep.tail_bound;
        all = all && pass;
        results.push_back(nlohmann::json{{"instance", inst.name},
                                         {"s", s},
                                         {"symbolic", sym.get_str()},
                                         {"oracleValue", rep.value.get_str()},
                                         {"tailBound", rep.tail_bound.get_str()},
                                         {"pass", pass}});
    }
    return nlohmann::json{{"schema", "rectint-oracle/1"}, {"results", results}, {"pass", all}}
        .dump(2);
}

}  // namespace

PYBIND11_MODULE(_rectint, m) {
    m.doc() = "Parametric p-adic rectilinearization and exact Igusa-type integration";

    py::class_<Session>(m, "Session")
        .def(py::init<unsigned, int>(), py::arg("p"), py::arg("precision") = 8)
        .def_property_readonly("p", [](const Session& s) { return s.ctx.p; })
        .def_property_readonly("precision", [](const Session& s) { return s.ctx.precision; });

    py::class_<PAdicApprox>(m, "PAdic")
        .def_property_readonly("is_zero", &PAdicApprox::is_zero)
        .def_property_readonly("valuation",
                               [](const PAdicApprox& x) { return x.valuation(); })
        .def_property_readonly("digits", [](const PAdicApprox& x) { return x.digits(); })
        .def("__eq__", [](const PAdicApprox& a, const PAdicApprox& b) { return a == b; })
        .def("__repr__", [](const PAdicApprox& x) {
            if (x.is_zero()) return std::string("PAdic(0)");
            std::string s = "PAdic(val=" + std::to_string(x.valuation()) + ", digits=[";
            for (std::size_t i = 0; i < x.digits().size(); ++i) {
                if (i) s += ",";
                s += std::to_string(x.digits()[i]);
            }
            return s + "])";
        });

    m.def("from_int", [](const Session& s, long v) {
        return PAdicApprox::from_long(s.ctx, v);
    });
    m.def("add", [](const Session& s, const PAdicApprox& a, const PAdicApprox& b) {
        return add(s.ctx, a, b);
    });
    m.def("mul", [](const Session& s, const PAdicApprox& a, const PAdicApprox& b) {
        return mul(s.ctx, a, b);
    });
    m.def("inv", [](const Session& s, const PAdicApprox& a) { return inv(s.ctx, a); });
    m.def("pow", [](const Session& s, const PAdicApprox& a, long e) {
        return pow_int(s.ctx, a, e);
    });
    m.def("hensel_lift", [](const Session& s, const std::vector<long>& coeffs,
                            const PAdicApprox& alpha, long e) {
        std::vector<mpz_class> f;
        for (long c : coeffs) f.emplace_back(c);
        return hensel_lift(s.ctx, f, alpha, e);
    });
    m.def("nth_root", [](const Session& s, const PAdicApprox& x, long n, int k) {
        return nth_root(s.ctx, x, n, k);
    });
    m.def("member_rk", [](const Session& s, const PAdicApprox& x, int k) {
        return member_rk(s.ctx, x, k);
    });
    m.def("member_pn", [](const Session& s, const PAdicApprox& x, long n) {
        return member_pn(s.ctx, x, n);
    });

    m.def("rectify", &rectify_json, py::arg("spec"), py::arg("p"), py::arg("precision") = 8);
    m.def("audit", &audit_json, py::arg("spec"), py::arg("p"), py::arg("precision") = 8);
    m.def("integrate", &integrate_json, py::arg("spec"), py::arg("p"),
          py::arg("precision") = 8, py::arg("s_values") = std::vector<long>{1});
    m.def("verify", &verify_json, py::arg("spec"), py::arg("p"), py::arg("precision") = 8,
          py::arg("depth") = 8, py::arg("s_values") = std::vector<long>{1});
    m.def("oracle_compare", &oracle_compare_json, py::arg("spec"), py::arg("p"),
          py::arg("precision") = 8, py::arg("s") = 1, py::arg("depth") = 8);
}
