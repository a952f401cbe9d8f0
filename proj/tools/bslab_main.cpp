// Batch driver for the bubble-sheet laboratory: configure, run and export the
// experiments, list the catalog, and run the module invariant suites.

#include "bslab/experiments.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>

namespace {

int cmd_run(const std::string& config_path, const std::string& out_override,
            const std::vector<std::string>& overrides, unsigned jobs) {
    bslab::ExperimentConfig cfg;
    try {
        cfg = bslab::ExperimentConfig::parse_file(config_path);
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw bslab::ConfigError("--set expects key=value, got '" + kv + "'");
            cfg.params[kv.substr(0, eq)] = kv.substr(eq + 1);
        }
        if (!out_override.empty()) cfg.output_dir = out_override;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    const auto result = bslab::run_experiment(cfg, jobs);
    if (result.status != 0) {
        std::cerr << result.message << "\n";
    } else {
        std::cout << "wrote " << result.artifacts.size() << " artifacts to "
                  << cfg.output_dir.string() << "\n";
    }
    return result.status;
}

int cmd_list(bool as_json) {
    const auto& infos = bslab::list_experiments();
    if (as_json) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& info : infos) {
            nlohmann::json params = nlohmann::json::array();
            for (const auto& p : info.parameters)
                params.push_back({{"key", p.key}, {"default", p.default_value}, {"doc", p.doc}});
            j.push_back({{"name", info.name}, {"verifies", info.verifies}, {"parameters", params}});
        }
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    for (const auto& info : infos) {
        std::printf("%-10s %s\n", info.name.c_str(), info.verifies.c_str());
        for (const auto& p : info.parameters)
            std::printf("    %-16s default=%-8s %s\n", p.key.c_str(), p.default_value.c_str(),
                        p.doc.c_str());
    }
    return 0;
}

int cmd_check(const std::string& module, unsigned jobs) {
    const auto results = bslab::run_module_checks(module, jobs);
    bool all = true;
    for (const auto& r : results) {
        std::printf("[%s] %-16s %-20s measured=%.3e threshold=%.3e %s\n",
                    r.pass ? "PASS" : "FAIL", r.module.c_str(), r.name.c_str(), r.measured,
                    r.threshold, r.detail.c_str());
        all = all && r.pass;
    }
    return all ? 0 : 4;
}

int cmd_dump(const std::string& experiment) {
    try {
        std::cout << bslab::default_config(experiment).dump();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bslab: numerical laboratory for bubble-sheet spectral dynamics"};
    app.require_subcommand(0, 1);

    std::string config_path, out_dir, module, experiment;
    std::vector<std::string> overrides;
    unsigned jobs = 1;
    bool as_json = false;
    bool check_flag = false;
    app.add_flag("--check", check_flag, "run the module invariant suites");
    app.add_option("--jobs", jobs, "worker threads")->group("");

    auto* run = app.add_subcommand("run", "run an experiment from a key=value config file");
    run->add_option("config", config_path, "config file path")->required();
    run->add_option("--out", out_dir, "output directory (overrides config)");
    run->add_option("--set", overrides, "override a key=value pair")->take_all();
    run->add_option("--jobs", jobs, "worker threads for sweeps");

    auto* list = app.add_subcommand("list", "list experiments and parameter schemas");
    list->add_flag("--json", as_json, "machine-readable catalog");

    auto* check = app.add_subcommand("check", "run the module invariant suites");
    check->add_option("--module", module, "restrict to one module");
    check->add_option("--jobs", jobs, "worker threads");

    auto* dump = app.add_subcommand("dump-config", "print the default config for an experiment");
    dump->add_option("experiment", experiment, "experiment name")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(config_path, out_dir, overrides, jobs);
    if (list->parsed()) return cmd_list(as_json);
    if (check->parsed()) return cmd_check(module, jobs);
    if (dump->parsed()) return cmd_dump(experiment);
    if (check_flag) return cmd_check(module, jobs);
    std::cerr << app.help();
    return 2;
}
