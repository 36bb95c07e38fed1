#include "qnes/runlog.hpp"

#include "qnes/error.hpp"

namespace qnes
{
    std::string_view to_string(StepType type)
    {
        switch (type)
        {
        case StepType::recombination:
            return "recombination";
        case StepType::quasi_newton:
            return "quasi-newton";
        case StepType::both_recombination_won:
            return "both-recomb-won";
        case StepType::both_quasi_newton_won:
            return "both-qn-won";
        }
        return "?";
    }

    std::string_view to_string(Termination reason)
    {
        switch (reason)
        {
        case Termination::running:
            return "running";
        case Termination::target_reached:
            return "target-reached";
        case Termination::budget_exhausted:
            return "budget-exhausted";
        case Termination::stagnation:
            return "stagnation";
        case Termination::numerical_abort:
            return "numerical-abort";
        case Termination::max_restarts:
            return "max-restarts";
        }
        return "?";
    }

    std::string_view to_string(Algorithm kind)
    {
        return kind == Algorithm::hees ? "hees" : "qnes";
    }

    std::string_view to_string(GradientMode mode)
    {
        return mode == GradientMode::norm ? "norm" : "exact";
    }

    std::string_view to_string(CsaMode mode)
    {
        return mode == CsaMode::grouped ? "grouped" : "literal";
    }

    StepType parse_step_type(std::string_view text)
    {
        for (const auto t : {StepType::recombination, StepType::quasi_newton, StepType::both_recombination_won,
                             StepType::both_quasi_newton_won})
            if (to_string(t) == text)
                return t;
        throw InvalidInput("unknown step type '" + std::string(text) + "'");
    }

    Algorithm parse_algorithm(std::string_view text)
    {
        if (text == "hees")
            return Algorithm::hees;
        if (text == "qnes")
            return Algorithm::qnes;
        throw InvalidInput("unknown algorithm '" + std::string(text) + "'");
    }

    GradientMode parse_gradient_mode(std::string_view text)
    {
        if (text == "norm")
            return GradientMode::norm;
        if (text == "exact")
            return GradientMode::exact;
        throw InvalidInput("unknown gradient mode '" + std::string(text) + "'");
    }

    CsaMode parse_csa_mode(std::string_view text)
    {
        if (text == "grouped")
            return CsaMode::grouped;
        if (text == "literal")
            return CsaMode::literal;
        throw InvalidInput("unknown CSA mode '" + std::string(text) + "'");
    }
}
