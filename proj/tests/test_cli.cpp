#include "bslab/csv.hpp"
#include "bslab/experiments.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace bslab;
namespace fs = std::filesystem;

namespace {
fs::path fresh_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("bslab_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}
}  // namespace

TEST_CASE("config parsing") {
    SUBCASE("key=value with comments") {
        const auto cfg = ExperimentConfig::parse_text(
            "# run the spectral suite\nexperiment=spectral\nn=32 # small grid\nntheta=16\n");
        CHECK(cfg.experiment == "spectral");
        CHECK(cfg.get_int("n", 0) == 32);
        CHECK(cfg.get_int("ntheta", 0) == 16);
        CHECK_NOTHROW(cfg.validate());
    }
    SUBCASE("unknown keys are rejected") {
        auto cfg = ExperimentConfig::parse_text("experiment=spectral\nbogus=1\n");
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
    SUBCASE("missing experiment is rejected") {
        CHECK_THROWS_AS(ExperimentConfig::parse_text("n=32\n"), ConfigError);
    }
    SUBCASE("malformed lines are rejected") {
        CHECK_THROWS_AS(ExperimentConfig::parse_text("experiment spectral\n"), ConfigError);
        CHECK_THROWS_AS(ExperimentConfig::parse_text("experiment=mz\n=5\n"), ConfigError);
        CHECK_THROWS_AS(ExperimentConfig::parse_text("experiment=mz\nseed=1\nseed=2\n"),
                        ConfigError);
    }
    SUBCASE("paper-convention constraints") {
        auto bad_beta = default_config("flow");
        bad_beta.params["beta"] = "0.002";
        CHECK_THROWS_AS(bad_beta.validate(), ConfigError);
        auto bad_L = default_config("flow");
        bad_L.params["L"] = "100";
        CHECK_THROWS_AS(bad_L.validate(), ConfigError);
        auto bad_b = default_config("compare");
        bad_b.params["b"] = "9";
        CHECK_THROWS_AS(bad_b.validate(), ConfigError);
        auto bad_kappa = default_config("mz");
        bad_kappa.params["kappa0"] = "1e-4";
        CHECK_THROWS_AS(bad_kappa.validate(), ConfigError);
        auto bad_numeric = default_config("mz");
        bad_numeric.params["c0"] = "abc";
        CHECK_THROWS_AS(bad_numeric.validate(), ConfigError);
    }
}

TEST_CASE("catalog") {
    const auto& infos = list_experiments();
    CHECK(infos.size() == 6);
    for (const auto& info : infos) {
        CAPTURE(info.name);
        CHECK_FALSE(info.verifies.empty());
        CHECK_FALSE(info.parameters.empty());
    }
}

TEST_CASE("default configs round-trip through dump/parse") {
    for (const auto& info : list_experiments()) {
        ExperimentConfig cfg = default_config(info.name);
        cfg.output_dir = "out";
        const ExperimentConfig back = ExperimentConfig::parse_text(cfg.dump());
        CHECK(back.experiment == cfg.experiment);
        CHECK(back.params == cfg.params);
        CHECK(back.output_dir == cfg.output_dir);
        CHECK(back.dump() == cfg.dump());
    }
}

TEST_CASE("experiment runner statuses") {
    SUBCASE("unknown experiment is a config error") {
        ExperimentConfig cfg;
        cfg.experiment = "nonsense";
        CHECK(run_experiment(cfg).status == 2);
    }
    SUBCASE("bad value is a config error") {
        auto cfg = default_config("mz");
        cfg.params["gamma"] = "3";
        cfg.output_dir = fresh_dir("badgamma");
        CHECK(run_experiment(cfg).status == 2);
    }
    SUBCASE("spectral suite passes and writes a manifest") {
        auto cfg = default_config("spectral");
        cfg.params["fields"] = "5";
        cfg.output_dir = fresh_dir("spectral");
        const auto result = run_experiment(cfg);
        CHECK(result.status == 0);
        CHECK(fs::exists(cfg.output_dir / "manifest.csv"));
        CHECK(fs::exists(cfg.output_dir / "eigen_residuals.csv"));
        // Manifest rows match the artifacts and carry 64-hex digests.
        const std::string manifest = read_file(cfg.output_dir / "manifest.csv");
        CHECK(manifest.rfind("filename,sha256,rows\n", 0) == 0);
        for (const auto& e : result.artifacts) {
            CHECK(manifest.find(e.filename + "," + e.sha256) != std::string::npos);
            CHECK(e.sha256.size() == 64);
            const std::string body = read_file(cfg.output_dir / e.filename);
            CHECK(sha256_hex(body) == e.sha256);
            CHECK(csv_row_count(body) == e.rows);
        }
    }
    SUBCASE("degenerate flow state is a numerical failure") {
        auto cfg = default_config("flow");
        cfg.params["init"] = "const";
        cfg.params["amp"] = "-1.42";  // sinks the graph radius below the floor
        cfg.params["n"] = "16";
        cfg.params["ntheta"] = "8";
        cfg.params["tau_end"] = "-199.9";
        cfg.output_dir = fresh_dir("flow_bad");
        CHECK(run_experiment(cfg).status == 3);
    }
    SUBCASE("barrier negative control fails verification") {
        auto cfg = default_config("barrier");
        cfg.params["corrupt"] = "1";
        cfg.params["nr"] = "40";
        cfg.params["ntheta"] = "12";
        cfg.output_dir = fresh_dir("barrier_bad");
        CHECK(run_experiment(cfg).status == 0);  // control behaves as expected
        auto good = default_config("barrier");
        good.params["nr"] = "40";
        good.params["ntheta"] = "12";
        good.output_dir = fresh_dir("barrier_good");
        CHECK(run_experiment(good).status == 0);
    }
}

TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("reproducibility: identical config and seed give identical bytes") {
    auto cfg = default_config("mz");
    cfg.params["runs"] = "5";
    cfg.params["samples"] = "200";
    auto run_once = [&](const std::string& tag) {
        auto c2 = cfg;
        c2.output_dir = fresh_dir(tag);
        const auto r = run_experiment(c2);
        REQUIRE(r.status == 0);
        std::map<std::string, std::string> digests;
        for (const auto& e : r.artifacts) digests[e.filename] = e.sha256;
        return digests;
    };
    const auto a = run_once("repro_a");
    const auto b = run_once("repro_b");
    CHECK(a == b);
    // And a different seed changes the sweep output.
    auto c3 = cfg;
    c3.params["seed"] = "43";
    c3.output_dir = fresh_dir("repro_c");
    const auto r3 = run_experiment(c3);
    REQUIRE(r3.status == 0);
    bool differs = false;
    for (const auto& e : r3.artifacts)
        if (e.filename == "trichotomy.csv" && a.count(e.filename) &&
            a.at(e.filename) != e.sha256)
            differs = true;
    CHECK(differs);
}

TEST_CASE("parallel sweep output is byte-identical to serial") {
    auto cfg = default_config("mz");
    cfg.params["runs"] = "8";
    cfg.params["samples"] = "150";
    cfg.output_dir = fresh_dir("jobs1");
    const auto serial = run_experiment(cfg, 1);
    REQUIRE(serial.status == 0);
    cfg.output_dir = fresh_dir("jobs2");
    const auto parallel = run_experiment(cfg, 2);
    REQUIRE(parallel.status == 0);
    REQUIRE(serial.artifacts.size() == parallel.artifacts.size());
    for (std::size_t i = 0; i < serial.artifacts.size(); ++i)
        CHECK(serial.artifacts[i].sha256 == parallel.artifacts[i].sha256);
}

TEST_CASE("module checks cover every primary module") {
    // Smoke coverage of the --check entry point on the cheap modules.
    for (const char* module : {"mz-dynamics", "flow-sim"}) {
        const auto results = run_module_checks(module);
        CAPTURE(module);
        CHECK_FALSE(results.empty());
        for (const auto& r : results) {
            CAPTURE(r.name);
            CHECK(r.pass);
        }
    }
}
