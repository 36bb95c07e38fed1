#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "qnes/objectives.hpp"
#include "qnes/runlog.hpp"

namespace qnes
{
    struct StoppingCriteria
    {
        double target_gap = 1e-20;
        std::int64_t max_evals = 100000;
        int stagnation_window = 100;
        double stagnation_tol = 1e-12;

        /// Budget 1e5 d, stagnation window 50 + 10 d iterations.
        static StoppingCriteria defaults(int d);
    };

    struct RestartPolicy
    {
        bool enabled = true;
        int multiplier = 2;
        int max_restarts = 9;
    };

    /// Start of every run and of every restart segment.
    struct InitialConditions
    {
        double box_low = -4.0;
        double box_high = 4.0;
        double sigma0 = 2.0;
        std::optional<Vector> m0; ///< fixed start; otherwise uniform in the box
    };

    /// True iff the best value improved by less than
    /// max(tol * |first|, 1e-30) between the first and last entry of the window.
    bool detect_stagnation(std::span<const double> f_best_window, const StoppingCriteria &stop);

    /// Single run without restarts. Aborts are recorded, not thrown.
    RunLog run(Algorithm kind, const Objective &obj, const StrategyParams &params, const StoppingCriteria &stop,
               std::uint64_t seed, const InitialConditions &init = {});

    /// IPOP: restart with doubled lambda_tilde (and n_b) after stagnation or a
    /// numerical abort, from a fresh start in the initialization box.
    RunLog ipop_run(Algorithm kind, const Objective &obj, const StrategyParams &base_params,
                    const StoppingCriteria &stop, const RestartPolicy &policy, std::uint64_t seed,
                    const InitialConditions &init = {});

    /// Params of the next IPOP segment: lambda_tilde * multiplier, n_b recomputed,
    /// kappa, eta_A and mode switches carried over.
    StrategyParams grow_population(const StrategyParams &params, int d, int multiplier);
}
