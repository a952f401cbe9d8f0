#pragma once

#include "bslab/csv.hpp"
#include "bslab/grid_function.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bslab {

/// Configuration error: maps to exit code 2 in the CLI.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Plain-text key=value configuration (one pair per line, '#' comments).
struct ExperimentConfig {
    std::string experiment;
    std::map<std::string, std::string> params;
    std::filesystem::path output_dir = ".";

    static ExperimentConfig parse_text(const std::string& text);
    static ExperimentConfig parse_file(const std::filesystem::path& path);
    /// Dump in a form parse_text() reloads identically.
    std::string dump() const;

    /// Validate keys and value constraints against the experiment's schema.
    void validate() const;

    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
};

struct ExperimentResult {
    int status = 0;  ///< 0 ok, 2 config error, 3 numerical failure, 4 verification failure
    std::string message;
    std::vector<ManifestEntry> artifacts;
};

/// Run one experiment: writes CSV artifacts plus manifest.csv to the output
/// directory. Deterministic for identical config + seed; `jobs` bounds worker
/// threads for sweep experiments without affecting output bytes.
ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned jobs = 1);

struct ParamSpec {
    std::string key;
    std::string default_value;
    std::string doc;
    /// Allowed values for enumerated string keys; empty means numeric.
    std::vector<std::string> options{};
};

struct ExperimentInfo {
    std::string name;
    std::string verifies;  ///< one-line statement of what the experiment checks
    std::vector<ParamSpec> parameters;
};

const std::vector<ExperimentInfo>& list_experiments();

/// Default configuration for an experiment (all schema defaults filled in).
ExperimentConfig default_config(const std::string& experiment);

struct CheckResult {
    std::string module;
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string detail;
};

/// Per-module invariant suites (the --check entry point). `only` restricts to
/// one module when nonempty.
std::vector<CheckResult> run_module_checks(const std::string& only = "", unsigned jobs = 1);

/// Seeded analytic test field with Gaussian decay: a small sum of displaced
/// Gaussian bumps times low-frequency waves in (y, theta).
GridFunction random_smooth_field(const GridPtr& grid, std::uint64_t seed);

}  // namespace bslab
