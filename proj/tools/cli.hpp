#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qnes/driver.hpp"

namespace qnes::cli
{
    /// Everything needed to reproduce a batch of runs.
    struct ExperimentConfig
    {
        std::vector<std::string> benchmarks{"sphere"};
        std::vector<int> dims{5};
        std::vector<std::string> algorithms{"qnes"};
        std::vector<std::uint64_t> seeds{1};
        double target = 1e-20;
        std::optional<std::int64_t> budget;
        std::optional<double> kappa;
        std::optional<double> eta_a;
        std::optional<double> c_s;
        std::optional<double> d_s;
        std::optional<int> lambda_tilde;
        std::string gradient_mode = "exact";
        std::string csa_mode = "grouped";
        bool restart = false;
        int max_restarts = 9;
        std::optional<int> stagnation_window;
        double stagnation_tol = 1e-12;
        double sigma0 = 2.0;
        double box_low = -4.0;
        double box_high = 4.0;
        std::filesystem::path output;
        int jobs = 1;
    };

    struct Cell
    {
        std::string benchmark;
        int dim = 0;
        Algorithm kind = Algorithm::qnes;
        std::uint64_t seed = 0;
    };

    /// Resolves defaults and overrides for one cell; throws InvalidInput on
    /// out-of-range values.
    StrategyParams resolve_params(const ExperimentConfig &cfg, const Cell &cell);
    StoppingCriteria resolve_stopping(const ExperimentConfig &cfg, int d);

    RunLog execute(const ExperimentConfig &cfg, const Cell &cell);

    std::string cell_filename(const Cell &cell);

    /// Default output directory: $QNES_OUTPUT_DIR, else the working directory.
    std::filesystem::path default_output_dir();

    int cli_main(int argc, char **argv);
}
