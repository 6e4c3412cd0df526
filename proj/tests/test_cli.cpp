#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "trom/cli.hpp"
#include "trom/errors.hpp"
#include "trom/io.hpp"

using namespace trom;
using namespace trom::cli;
namespace fs = std::filesystem;

namespace {

std::string tiny_heat_config(const std::string& out_dir) {
    return R"({
      "problem": "heat",
      "output_dir": ")" + out_dir + R"(",
      "mesh": {"nodes_per_side": 9},
      "time": {"tau": 0.5, "steps": 16},
      "parameters": {"count": 8, "train": 6, "seed": 321},
      "tucker": {"ranks": [6, 8, 6]},
      "interpolation": {"mo_neighbors": 5},
      "sweep": {"ranks": [2, 4]}
    })";
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config parsing applies per-problem defaults") {
    const ExperimentConfig heat = ExperimentConfig::from_json_text(R"({"problem": "heat"})");
    CHECK(heat.problem == ProblemKind::heat);
    CHECK(heat.time.steps == 120);
    CHECK(heat.forcing.sigma == 0.4);
    CHECK(heat.grbf_shape == 1.0);
    CHECK_FALSE(heat.grbf_neighbors.has_value());

    const ExperimentConfig maxwell =
        ExperimentConfig::from_json_text(R"({"problem": "maxwell"})");
    CHECK(maxwell.time.tau == 2.5);
    CHECK(maxwell.forcing.sigma == 0.1);
    CHECK(maxwell.grbf_shape == 1.8);

    const ExperimentConfig wave = ExperimentConfig::from_json_text(
        R"({"problem": "wave", "interpolation": {"grbf_neighbors": 9, "grbf_nugget": 1e-10}})");
    CHECK(wave.grbf_neighbors == Index(9));
    CHECK(wave.grbf_nugget == 1e-10);
}

TEST_CASE("config parsing rejects unknown keys by name") {
    try {
        ExperimentConfig::from_json_text(R"({"problem": "heat", "mesh": {"n": 5}})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& err) {
        CHECK(std::string(err.what()).find("mesh.n") != std::string::npos);
    }
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"problem": "heat", "bogus": 1})"),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"problem": "plasma"})"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"problem": "heat", "parameters":
                    {"count": 4, "train": 4}})"),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text("not json"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"output_dir": "x"})"), ConfigError);
}

TEST_CASE("pipeline stages produce deterministic artifacts") {
    TempDir dir("trom_cli_test");
    const ExperimentConfig cfg =
        ExperimentConfig::from_json_text(tiny_heat_config(dir.path.string()));

    run_generate(cfg);
    run_train(cfg);
    run_evaluate(cfg);

    for (const char* name :
         {"params_train.csv", "params_test.csv", "snapshots_train.trom", "snapshots_test.trom",
          "factors.tromf", "manifest.json", "sweep_train.csv", "sweep_train_agg.csv",
          "sweep_test.csv", "sweep_test_agg.csv", "sv_decay.csv"})
        CHECK(fs::exists(dir.path / name));

    // second run into a fresh directory: byte-identical outputs
    TempDir dir2("trom_cli_test2");
    ExperimentConfig cfg2 = cfg;
    cfg2.output_dir = dir2.path.string();
    run_generate(cfg2);
    run_train(cfg2);
    run_evaluate(cfg2);
    for (const char* name : {"snapshots_train.trom", "factors.tromf", "sweep_train.csv",
                             "sweep_test.csv", "sweep_train_agg.csv", "sweep_test_agg.csv"})
        CHECK(slurp(dir.path / name) == slurp(dir2.path / name));
}

TEST_CASE("training-set tensorial columns are interpolation-free and identical") {
    TempDir dir("trom_cli_mo_grbf");
    const ExperimentConfig cfg =
        ExperimentConfig::from_json_text(tiny_heat_config(dir.path.string()));
    run_generate(cfg);
    run_train(cfg);
    EvaluateOptions options;
    options.sets = {"train"};
    run_evaluate(cfg, options);

    // same rows for mo and grbf, bit for bit
    std::ifstream in(dir.path / "sweep_train.csv");
    REQUIRE(in);
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::string> mo_rows, grbf_rows;
    while (std::getline(in, line)) {
        if (line.rfind("mo,", 0) == 0) mo_rows.push_back(line.substr(3));
        if (line.rfind("grbf,", 0) == 0) grbf_rows.push_back(line.substr(5));
    }
    REQUIRE(!mo_rows.empty());
    CHECK(mo_rows == grbf_rows);
}

TEST_CASE("stage ordering and manifest integrity are enforced") {
    TempDir dir("trom_cli_stale");
    const ExperimentConfig cfg =
        ExperimentConfig::from_json_text(tiny_heat_config(dir.path.string()));
    CHECK_THROWS_AS(run_train(cfg), IoError);  // nothing generated yet

    run_generate(cfg);
    run_train(cfg);
    {
        // tamper with the snapshots: evaluate must refuse
        std::fstream f(dir.path / "snapshots_train.trom",
                       std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(64);
        const double junk = 12345.0;
        f.write(reinterpret_cast<const char*>(&junk), sizeof(junk));
    }
    CHECK_THROWS_AS(run_evaluate(cfg), IoError);
}

TEST_CASE("empty sweep produces empty tables and succeeds") {
    TempDir dir("trom_cli_empty");
    ExperimentConfig cfg = ExperimentConfig::from_json_text(tiny_heat_config(dir.path.string()));
    cfg.sweep_ranks.clear();
    run_generate(cfg);
    run_train(cfg);
    run_evaluate(cfg);
    std::ifstream in(dir.path / "sweep_train.csv");
    std::string header, extra;
    std::getline(in, header);
    CHECK(header == "method,rank,param_index,projection_error,rom_error");
    CHECK_FALSE(std::getline(in, extra));
}

TEST_CASE("evaluate option validation") {
    TempDir dir("trom_cli_opts");
    ExperimentConfig cfg = ExperimentConfig::from_json_text(tiny_heat_config(dir.path.string()));
    EvaluateOptions options;
    options.methods = {"monolithic", "nope"};
    CHECK_THROWS_AS(run_evaluate(cfg, options), UsageError);
}
