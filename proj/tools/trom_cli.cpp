#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include "trom/cli.hpp"
#include "trom/errors.hpp"

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

int exit_code_for(const trom::Error& err) {
    const std::string& code = err.code();
    if (code == "usage" || code == "config_invalid") return 2;
    if (code == "io") return 3;
    return 4;
}

}  // namespace

int main(int argc, char** argv) {
#if defined(_OPENMP)
    if (const char* threads = std::getenv("TROM_THREADS")) {
        const int count = std::atoi(threads);
        if (count > 0) omp_set_num_threads(count);
    }
#endif

    CLI::App app{"Tensorial reduced-order model experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string methods = "monolithic,mo,grbf";
    std::string sets = "train,test";

    CLI::App* generate = app.add_subcommand("generate", "Sample parameters and write snapshots");
    generate->add_option("--config", config_path, "experiment config (JSON)")->required();

    CLI::App* train = app.add_subcommand("train", "Factorize the training snapshots");
    train->add_option("--config", config_path, "experiment config (JSON)")->required();

    CLI::App* evaluate = app.add_subcommand("evaluate", "Run the rank sweep and write CSV tables");
    evaluate->add_option("--config", config_path, "experiment config (JSON)")->required();
    evaluate->add_option("--methods", methods, "comma list of monolithic,mo,grbf");
    evaluate->add_option("--set", sets, "comma list of train,test");

    CLI11_PARSE(app, argc, argv);

    try {
        const trom::cli::ExperimentConfig config =
            trom::cli::ExperimentConfig::from_json_file(config_path);
        if (generate->parsed()) {
            trom::cli::run_generate(config);
        } else if (train->parsed()) {
            trom::cli::run_train(config);
        } else {
            trom::cli::EvaluateOptions options;
            options.methods = split_list(methods);
            options.sets = split_list(sets);
            trom::cli::run_evaluate(config, options);
        }
    } catch (const trom::Error& err) {
        std::cerr << "error[" << err.code() << "]: " << err.what() << "\n";
        return exit_code_for(err);
    } catch (const std::exception& err) {
        std::cerr << "error[internal]: " << err.what() << "\n";
        return 5;
    }
    return 0;
}
