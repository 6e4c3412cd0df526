#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "trom/problems.hpp"

namespace trom::cli {

/// Experiment configuration; unspecified fields take per-problem defaults.
/// Parsing rejects unknown keys.
struct ExperimentConfig {
    ProblemKind problem = ProblemKind::heat;
    std::string output_dir = "out";

    Index mesh_nodes_per_side = 17;  // heat
    Index mesh_elements = 128;       // wave / maxwell

    TimeGrid time;

    Index param_count = 60;
    Index param_train = 45;
    std::uint64_t seed = 20240801;

    ForcingSpec forcing;

    std::array<Index, 3> tucker_ranks = {40, 60, 40};
    bool weighted = true;

    Index mo_neighbors = 15;
    double grbf_shape = 1.0;
    std::optional<Index> grbf_neighbors;  // nullopt = global
    std::optional<double> grbf_nugget;    // nullopt = default scaling rule

    std::vector<Index> sweep_ranks = {2, 4, 6, 8, 10, 12, 16, 20};
    Index qdeim_rank = 30;  // maxwell

    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
};

/// Stage drivers; artifacts land under config.output_dir. All stages are
/// deterministic for a fixed (config, seed).
void run_generate(const ExperimentConfig& config);
void run_train(const ExperimentConfig& config);

struct EvaluateOptions {
    std::vector<std::string> methods = {"monolithic", "mo", "grbf"};
    std::vector<std::string> sets = {"train", "test"};
};

void run_evaluate(const ExperimentConfig& config, const EvaluateOptions& options = {});

}  // namespace trom::cli
