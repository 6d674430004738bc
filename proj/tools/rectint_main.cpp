// Command-line front end: parse spec -> rectify -> integrate -> verify, with
// reproducible JSON artifacts and an audit log.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "rectint/verify.hpp"

namespace rectint {

namespace {

struct RunConfig {
    std::string command;
    std::string spec_path;
    std::vector<std::string> instance_paths;
    std::uint32_t p = 3;
    int precision = 8;
    int depth = 8;
    std::vector<long> s_values;
    std::uint64_t seed = 1;
    std::string out_path;
    std::string audit_path;
};

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw schema_error("cannot open file", path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw schema_error("invalid JSON", path);
    return j;
}

void write_artifact(const std::string& path, const nlohmann::json& j) {
    std::string text = j.dump(2) + "\n";
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw error("cannot write " + path);
    out << text;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) return;
    std::ofstream out(path);
    out << text;
}

std::vector<ParamInstance> gather_instances(const RunConfig& cfg, const SpecDocument& doc,
                                            const PrimeContext& ctx) {
    std::vector<ParamInstance> out;
    for (const auto& path : cfg.instance_paths) {
        nlohmann::json j = load_json(path);
        if (j.is_array()) {
            std::size_t i = 0;
            for (const auto& e : j)
                out.push_back(instance_from_json(e, ctx, path + "#" + std::to_string(i++)));
        } else {
            out.push_back(instance_from_json(j, ctx, path));
        }
    }
    if (out.empty()) out = doc.instances;
    if (out.empty()) out.push_back(ParamInstance{});  // no parameters needed
    return out;
}

std::string rational_str(const mpq_class& v) { return v.get_str(); }

int run(const RunConfig& cfg) {
    PrimeContext ctx(cfg.p, cfg.precision);
    SpecDocument doc = parse_spec(load_json(cfg.spec_path), ctx);
    SymbolTable table = doc.symbols;
    std::vector<ParamMonomial> tracked{doc.integrand.f, doc.integrand.g};

    if (cfg.command == "rectify") {
        auto parts = rectify(doc.set, tracked, table, ctx);
        nlohmann::json out = parts_to_json(parts, table, ctx);
        write_artifact(cfg.out_path, out);
        write_text(cfg.audit_path, parts_audit_log(parts));
        std::cerr << parts.size() << " parts\n";
        return 0;
    }

    auto instances = gather_instances(cfg, doc, ctx);
    std::vector<long> svals = cfg.s_values.empty() ? std::vector<long>{1} : cfg.s_values;

    if (cfg.command == "integrate") {
        auto parts = rectify(doc.set, tracked, table, ctx);
        nlohmann::json results = nlohmann::json::array();
        for (const auto& inst : instances) {
            RationalInTU r = integrate_parts(parts, doc.integrand, table, inst);
            nlohmann::json entry;
            entry["instance"] = inst.name;
            entry["result"] = result_to_json(r);
            nlohmann::json values = nlohmann::json::array();
            for (long s : svals)
                values.push_back(nlohmann::json{
                    {"s", s}, {"value", rational_str(evaluate(r, static_cast<long>(ctx.p), s))}});
            entry["values"] = values;
            results.push_back(entry);
        }
        nlohmann::json out{{"schema", "rectint-integrate/1"},
                           {"p", ctx.p},
                           {"precision", ctx.precision},
                           {"results", results}};
        write_artifact(cfg.out_path, out);
        return 0;
    }

    if (cfg.command == "oracle-compare") {
        auto parts = rectify(doc.set, tracked, table, ctx);
        nlohmann::json results = nlohmann::json::array();
        bool all_pass = true;
        for (const auto& inst : instances) {
            RationalInTU r = integrate_parts(parts, doc.integrand, table, inst);
            for (long s : svals) {
                mpq_class sym = evaluate(r, static_cast<long>(ctx.p), s);
                TruncationReport rep = truncated_integral(doc.set, doc.integrand, table, inst,
                                                          ctx, static_cast<long>(ctx.p), s,
                                                          cfg.depth);
                bool pass = sym >= rep.value && sym <= rep.value + rep.tail_bound;
                all_pass = all_pass && pass;
                results.push_back(nlohmann::json{{"instance", inst.name},
                                                 {"s", s},
                                                 {"symbolic", rational_str(sym)},
                                                 {"oracleValue", rational_str(rep.value)},
                                                 {"tailBound", rational_str(rep.tail_bound)},
                                                 {"pass", pass}});
            }
        }
        nlohmann::json out{{"schema", "rectint-oracle/1"}, {"results", results},
                           {"pass", all_pass}};
        write_artifact(cfg.out_path, out);
        return all_pass ? 0 : 1;
    }

    if (cfg.command == "verify") {
        auto parts = rectify(doc.set, tracked, table, ctx);
        VerifyOptions opt;
        opt.depth = cfg.depth;
        opt.seed = cfg.seed;
        opt.s_values = svals;
        nlohmann::json items = nlohmann::json::array();
        bool all_pass = true;
        for (const auto& inst : instances) {
            VerifyReport rep = verify_spec(doc, parts, inst, table, ctx, opt);
            for (const auto& item : rep.items) {
                std::cout << (item.pass ? "PASS" : "FAIL") << "  "
                          << (inst.name.empty() ? "<inst>" : inst.name) << "  " << item.name
                          << "  " << item.detail << "\n";
                items.push_back(nlohmann::json{{"instance", inst.name},
                                               {"check", item.name},
                                               {"pass", item.pass},
                                               {"detail", item.detail}});
                all_pass = all_pass && item.pass;
            }
        }
        nlohmann::json out{{"schema", "rectint-verify/1"}, {"items", items},
                           {"pass", all_pass}};
        if (!cfg.out_path.empty()) write_artifact(cfg.out_path, out);
        return all_pass ? 0 : 1;
    }

    std::cerr << "unknown command " << cfg.command << "\n";
    return 2;
}

}  // namespace

}  // namespace rectint

int main(int argc, char** argv) {
    CLI::App app{"rectint: parametric p-adic rectilinearization and exact integration"};
    app.require_subcommand(1);
    rectint::RunConfig cfg;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--spec", cfg.spec_path, "spec JSON (schema rectint/1)")->required();
        sub->add_option("--p", cfg.p, "prime p (numeric layer sets q = p)");
        sub->add_option("--precision", cfg.precision, "working digits N");
        sub->add_option("--depth", cfg.depth, "oracle truncation depth");
        sub->add_option("--s", cfg.s_values, "integer s values");
        sub->add_option("--instance", cfg.instance_paths, "instance JSON file(s)");
        sub->add_option("--seed", cfg.seed, "sampling seed");
        sub->add_option("--out", cfg.out_path, "artifact output path (default stdout)");
    };
    CLI::App* c1 = app.add_subcommand("rectify", "partition a set into rectilinear parts");
    add_common(c1);
    c1->add_option("--audit", cfg.audit_path, "human-readable audit log path");
    add_common(app.add_subcommand("integrate", "compute the exact rational integral"));
    add_common(app.add_subcommand("verify",
                                  "partition, certificate, transport and oracle checks"));
    add_common(app.add_subcommand("oracle-compare", "symbolic value vs truncated oracle"));

    CLI11_PARSE(app, argc, argv);
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        return rectint::run(cfg);
    } catch (const rectint::schema_error& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 2;
    } catch (const rectint::unbound_symbol& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 2;
    } catch (const rectint::non_triangular_region& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 2;
    } catch (const rectint::unsupported_spec& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 2;
    } catch (const rectint::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
