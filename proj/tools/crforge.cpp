// crforge: list the model catalog, run verification suites, explain checks.
//
// Exit codes: 0 all checks passed, 1 at least one check failed,
// 2 configuration error, 3 evaluation error.

#include <cstdio>
#include <ctime>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <crforge/checks.hpp>

using nlohmann::ordered_json;

namespace {

std::string iso_timestamp() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

ordered_json engine_block() {
    return ordered_json{{"name", "crforge"},
                        {"version", crforge::engine_version()}};
}

int do_list(const crforge::model_registry& reg, bool json) {
    if (json) {
        ordered_json j;
        j["schema_version"] = 1;
        j["engine"] = engine_block();
        j["manifolds"] = ordered_json::array();
        for (const auto& [name, M] : reg.manifolds)
            j["manifolds"].push_back(
                ordered_json{{"name", name},
                             {"category", to_string(M.category())},
                             {"m", M.m()},
                             {"m0", M.m0()},
                             {"d", M.d()}});
        j["maps"] = ordered_json::array();
        for (const auto& [name, f] : reg.maps)
            j["maps"].push_back(ordered_json{{"name", name},
                                             {"kind", f.kind},
                                             {"source", f.source},
                                             {"target", f.target}});
        j["bundles"] = ordered_json::array();
        for (const auto& [name, B] : reg.bundles)
            j["bundles"].push_back(ordered_json{
                {"name", name}, {"base", B.base}, {"rank", B.rank}});
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << "manifolds\n";
    for (const auto& [name, M] : reg.manifolds)
        std::cout << "  " << name << "  (" << to_string(M.category())
                  << ", m = " << M.m() << ", m0 = " << M.m0()
                  << ", d = " << M.d() << ")\n";
    std::cout << "maps\n";
    for (const auto& [name, f] : reg.maps)
        std::cout << "  " << name << "  (" << f.kind << ", " << f.source
                  << " -> " << f.target << ")\n";
    std::cout << "bundles\n";
    for (const auto& [name, B] : reg.bundles)
        std::cout << "  " << name << "  (base " << B.base << ", rank "
                  << B.rank << ")\n";
    return 0;
}

int do_explain(const std::string& id) {
    const crforge::check_info* info = crforge::find_check(id);
    if (!info) {
        std::cerr << "unknown check id: " << id << "\nknown ids:\n";
        for (const auto& c : crforge::check_catalog())
            std::cerr << "  " << c.id << "\n";
        return 2;
    }
    std::cout << info->id << "\n  statement: " << info->statement
              << "\n  default tolerance: "
              << crforge::format_residual(info->tol) << "\n\n  "
              << info->detail << "\n";
    return 0;
}

void emit_json(const crforge::suite_report& rep) {
    ordered_json j;
    j["schema_version"] = 1;
    j["engine"] = engine_block();
    j["timestamp"] = iso_timestamp();
    ordered_json cfg;
    cfg["model"] = rep.cfg.model;
    cfg["map"] = rep.cfg.map;
    cfg["suite"] = rep.cfg.suite;
    cfg["points"] = rep.cfg.points;
    cfg["seed"] = rep.cfg.seed;
    cfg["order"] = rep.cfg.order;
    ordered_json tols = ordered_json::object();
    for (const auto& [key, val] : rep.cfg.tol) tols[key] = val;
    cfg["tol_overrides"] = tols;
    j["config"] = cfg;
    j["models"] = ordered_json::array();
    for (const auto& n : rep.models) {
        ordered_json m{{"name", n.name},
                       {"category", n.category},
                       {"m", n.m},
                       {"m0", n.m0}};
        if (n.has_torsion_info) {
            m["torsion_free"] = n.sasakian;
            m["torsion_norm"] = n.tau_norm;
        }
        j["models"].push_back(m);
    }
    if (!rep.map_name.empty())
        j["map"] = ordered_json{{"name", rep.map_name},
                                {"kind", rep.map_kind},
                                {"source", rep.map_source},
                                {"target", rep.map_target}};
    j["checks"] = ordered_json::array();
    for (const auto& c : rep.checks)
        j["checks"].push_back(ordered_json{{"id", c.id},
                                           {"statement", c.statement},
                                           {"residual", c.residual},
                                           {"tol", c.tol},
                                           {"pass", c.pass},
                                           {"points", c.points}});
    j["summary"] = ordered_json{{"total", rep.checks.size()},
                                {"passed", rep.passed()},
                                {"failed", rep.failed()}};
    std::cout << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symbolic-numeric checks for pseudo-hermitian and almost "
                 "CR models"};
    app.set_version_flag("--version",
                         std::string("crforge ") + crforge::engine_version());
    app.require_subcommand(1);

    bool list_json = false;
    auto* list_cmd = app.add_subcommand("list", "show the model catalog");
    list_cmd->add_flag("--json", list_json, "machine-readable output");

    crforge::suite_config cfg;
    std::vector<std::string> tol_args;
    auto* run_cmd = app.add_subcommand("run", "run a verification suite");
    run_cmd->add_option("--model", cfg.model, "manifold to verify");
    run_cmd->add_option("--map", cfg.map, "map to verify");
    run_cmd->add_option("--suite", cfg.suite,
                        "all, frames, lifts, or bochner (default all)");
    run_cmd->add_option("--points", cfg.points, "sample points per check")
        ->check(CLI::Range(1, 500));
    run_cmd->add_option("--seed", cfg.seed, "sampling seed");
    run_cmd->add_option("--order", cfg.order, "jet truncation order")
        ->check(CLI::Range(2, 8));
    run_cmd->add_flag("--json", cfg.json, "machine-readable output");
    run_cmd->add_option("--tol", tol_args,
                        "override a tolerance, as check.id=value");

    std::string explain_id;
    auto* explain_cmd =
        app.add_subcommand("explain", "describe one check in detail");
    explain_cmd->add_option("id", explain_id, "check id")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (explain_cmd->parsed()) return do_explain(explain_id);

    // Configuration phase: registry loading, name resolution, tolerance
    // parsing.  Anything wrong here is a usage problem, exit 2.
    crforge::model_registry reg;
    try {
        reg = crforge::registry_with_env();

        if (list_cmd->parsed()) return do_list(reg, list_json);

        if (cfg.model.empty() && cfg.map.empty()) {
            std::cerr << "run requires --model or --map\n";
            return 2;
        }
        if (cfg.suite != "all" && cfg.suite != "frames" &&
            cfg.suite != "lifts" && cfg.suite != "bochner") {
            std::cerr << "unknown suite: " << cfg.suite
                      << " (expected all, frames, lifts, or bochner)\n";
            return 2;
        }
        if (cfg.suite == "bochner" && cfg.map.empty()) {
            std::cerr << "suite bochner runs on a map; pass --map\n";
            return 2;
        }
        if ((cfg.suite == "frames" || cfg.suite == "lifts") &&
            cfg.model.empty()) {
            std::cerr << "suite " << cfg.suite
                      << " runs on a manifold; pass --model\n";
            return 2;
        }
        if (!cfg.model.empty() && !reg.manifolds.count(cfg.model)) {
            std::cerr << "unknown manifold: " << cfg.model << "\n";
            return 2;
        }
        if (!cfg.map.empty() && !reg.maps.count(cfg.map)) {
            std::cerr << "unknown map: " << cfg.map << "\n";
            return 2;
        }
        for (const auto& s : tol_args) {
            auto eq = s.find('=');
            if (eq == std::string::npos || eq == 0) {
                std::cerr << "bad --tol argument: " << s
                          << " (expected check.id=value)\n";
                return 2;
            }
            std::string id = s.substr(0, eq);
            if (!crforge::find_check(id)) {
                std::cerr << "bad --tol argument: unknown check id " << id
                          << "\n";
                return 2;
            }
            size_t used = 0;
            double val = 0.0;
            try {
                val = std::stod(s.substr(eq + 1), &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != s.size() - eq - 1 || !(val > 0.0)) {
                std::cerr << "bad --tol argument: " << s
                          << " (value must be a positive number)\n";
                return 2;
            }
            cfg.tol.emplace_back(id, val);
        }
    } catch (const crforge::error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    }

    // Run phase: a throw here means the inputs were accepted but some
    // construction failed while evaluating, exit 3.
    try {
        crforge::suite_report rep = crforge::run_suite(reg, cfg);
        if (cfg.json)
            emit_json(rep);
        else
            crforge::emit_text(rep, std::cout);
        return rep.failed() == 0 ? 0 : 1;
    } catch (const crforge::error& e) {
        std::cerr << "evaluation error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "evaluation error: " << e.what() << "\n";
        return 3;
    }
}
