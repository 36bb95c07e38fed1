#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qnes/hees.hpp"

namespace qnes
{
    enum class StepType
    {
        recombination,
        quasi_newton,
        both_recombination_won,
        both_quasi_newton_won
    };

    enum class Termination
    {
        running,
        target_reached,
        budget_exhausted,
        stagnation,
        numerical_abort,
        max_restarts
    };

    std::string_view to_string(StepType type);
    std::string_view to_string(Termination reason);
    std::string_view to_string(Algorithm kind);
    std::string_view to_string(GradientMode mode);
    std::string_view to_string(CsaMode mode);

    StepType parse_step_type(std::string_view text);
    Algorithm parse_algorithm(std::string_view text);
    GradientMode parse_gradient_mode(std::string_view text);
    CsaMode parse_csa_mode(std::string_view text);

    struct IterationRecord
    {
        long iteration = 0;
        std::int64_t evaluations = 0;
        double gap = 0.0;        ///< best-so-far optimality gap
        double f_mean = 0.0;     ///< f at the new mean
        double sigma = 0.0;
        double det_error = 0.0;  ///< |det(A) - 1|
        std::optional<double> R; ///< QN-ES only
        StepType step_type = StepType::recombination;
        std::optional<double> eta;
        int segment = 0;
    };

    struct RunLog
    {
        std::vector<IterationRecord> records;

        std::string benchmark;
        int dim = 0;
        Algorithm kind = Algorithm::qnes;
        std::uint64_t seed = 0;
        StrategyParams params;
        Termination termination = Termination::running;
        bool gap_known = true;
        double initial_gap = 0.0;
        std::int64_t evaluations = 0;
        std::vector<int> segment_lambdas; ///< lambda_tilde of each restart segment

        /// Final transformation and curvature scale, for post-run inspection.
        Matrix final_A;
        std::optional<double> final_eta;
        Vector final_mean;
    };
}
