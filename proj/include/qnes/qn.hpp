#pragma once

#include <array>
#include <optional>

#include "qnes/hees.hpp"

namespace qnes
{
    /// Fixed window of the most recent mean log-curvatures. The global
    /// curvature scale is eta = exp(-window average).
    class EtaTracker
    {
    public:
        static constexpr int capacity = 20;

        void push(double mean_q);
        int size() const { return size_; }
        bool empty() const { return size_ == 0; }
        /// Entries oldest first.
        std::vector<double> entries() const;
        /// Empty when no estimate has been recorded yet.
        std::optional<double> eta() const;

    private:
        std::array<double, capacity> ring_{};
        int head_ = 0;
        int size_ = 0;
    };

    EtaTracker eta_update(EtaTracker tracker, double mean_q);
    std::optional<double> eta_value(const EtaTracker &tracker);

    /// Exponentially fading rate at which quasi-Newton steps beat recombination.
    struct SwitchState
    {
        double R = 0.5;
    };

    enum class StepKind
    {
        recombination,
        quasi_newton
    };

    struct SwitchProbabilities
    {
        double recombination = 1.0;
        double quasi_newton = 1.0;
    };

    /// clip(2.5 (1 - R), 0.01, 1) and clip(2.5 R, 0.01, 1).
    SwitchProbabilities switch_probabilities(double R);

    /// 0.8 R, plus 0.2 when the quasi-Newton step won.
    double switch_update(double R, StepKind winner);

    /// Central-difference gradient in the sampling frame,
    /// (1 / (2 sigma n_b)) sum_k (f(x_k^+) - f(x_k^-)) b_k / ||b_k||^p
    /// with p = 1 (norm) or p = 2 (exact). Requires lambda_tilde >= d.
    Vector estimate_gradient(const Generation &gen, double sigma, int n_batches, GradientMode mode);

    /// -eta A^T delta.
    Vector qn_step(const Matrix &A, const Vector &delta, double eta);

    struct QnStepRecord
    {
        Vector delta;
        std::optional<double> eta;
        Vector p;
        bool recombination_active = false;
        bool quasi_newton_active = false;
        StepKind applied = StepKind::recombination;

        bool compared() const { return recombination_active && quasi_newton_active; }
    };

    struct QnesStep
    {
        EsState state;
        EtaTracker tracker;
        SwitchState switch_state;
        QnStepRecord record;
        Generation gen;
        GUpdate g;
    };

    /// One QN-ES iteration: the HE-ES body with the mean update replaced by
    /// the recombination / quasi-Newton switch.
    QnesStep qnes_iteration(const EsState &state, const EtaTracker &tracker, const SwitchState &switch_state,
                            const Objective &obj, EvalCounter &counter, const StrategyParams &params,
                            RandomStream &rng);
}
