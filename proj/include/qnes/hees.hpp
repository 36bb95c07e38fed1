#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qnes/linalg.hpp"
#include "qnes/objectives.hpp"
#include "qnes/random.hpp"

namespace qnes
{
    enum class Algorithm
    {
        hees,
        qnes
    };

    /// Central-difference gradient normalization. `norm` divides each
    /// difference by ||b||, `exact` by ||b||^2; only the latter recovers the
    /// gradient of a quadratic when direction norms differ from one.
    enum class GradientMode
    {
        norm,
        exact
    };

    /// How the CSA exponent is parenthesized. `grouped` computes
    /// (c_s/d_s) * (||p_s||/chi_d - sqrt(g_s)); `literal` computes
    /// (c_s/d_s) * ||p_s||/chi_d - sqrt(g_s).
    enum class CsaMode
    {
        grouped,
        literal
    };

    struct StrategyParams
    {
        int lambda_tilde = 1;   ///< number of mirrored pairs
        int n_batches = 1;      ///< ceil(lambda_tilde / d)
        double kappa = 1e3;     ///< curvature truncation ratio
        double eta_a = 0.5;     ///< learning rate of the transformation
        double c_s = 0.0;
        double d_s = 1.0;
        Vector weights;         ///< 2 * lambda_tilde rank weights, best first
        double mu_eff_mirrored = 1.0;
        GradientMode gradient_mode = GradientMode::exact;
        CsaMode csa_mode = CsaMode::grouped;
    };

    /// Parameters for an explicit number of pairs. Rank weights are
    /// max(0, ln(lambda_tilde + 1/2) - ln k), k = 1..2 lambda_tilde, normalized;
    /// the CSA constants follow the usual CMA-ES formulas in mu_eff_mirrored.
    StrategyParams params_for(int d, int lambda_tilde, double kappa = 1e3, double eta_a = 0.5);

    /// lambda_tilde = d for QN-ES; max(2, ceil((4 + floor(3 ln d)) / 2)) for HE-ES.
    StrategyParams default_params(int d, Algorithm kind);

    /// 1 / sum_k (w_k - w_{2 lambda_tilde + 1 - k})^2: the selection mass of
    /// antithetic rank pairs, which is how mirrored pairs rank on a linear slope.
    double mirrored_mu_eff(const Vector &weights);

    struct EsState
    {
        Vector m;
        double sigma = 1.0;
        Matrix A;
        Vector p_s;
        double g_s = 0.0;
        long t = 0;
        std::optional<double> f_m;

        /// m, sigma, A = I, zero CSA accumulators.
        static EsState initial(Vector mean, double sigma);

        int dim() const { return static_cast<int>(m.size()); }
    };

    /// One iteration's samples. Pair k (0-based) uses direction
    /// k % d of batch k / d; offspring 2k is x_minus(k), 2k+1 is x_plus(k).
    struct Generation
    {
        std::vector<DirectionBatch> batches;
        int lambda_tilde = 0;
        Vector mean;
        double sigma = 0.0;
        Matrix A;
        Matrix x_minus; ///< d x lambda_tilde
        Matrix x_plus;  ///< d x lambda_tilde
        Vector f_minus;
        Vector f_plus;
        std::vector<int> ranks; ///< 1-based rank of each offspring, size 2 lambda_tilde

        int dim() const { return static_cast<int>(mean.size()); }
        Vector direction(int k) const { return batches[k / dim()].direction(k % dim()); }
        double direction_squared_norm(int k) const { return batches[k / dim()].squared_norm(k % dim()); }
    };

    struct GUpdate
    {
        Matrix G;
        std::optional<double> mean_q; ///< absent for the neutral update
        Vector curvatures;            ///< h after truncation; empty for the neutral update
    };

    /// Multiplicative update of the transformation from curvature estimates
    /// along the sampled directions. Returns G with det(G) = 1.
    GUpdate compute_g(std::span<const DirectionBatch> batches, double f_m, const Vector &f_plus,
                      const Vector &f_minus, double sigma, const StrategyParams &params);

    /// Draws n_b orthogonal batches and builds the mirrored offspring (not evaluated).
    Generation sample_generation(const EsState &state, const StrategyParams &params, RandomStream &rng);

    /// Evaluates x_minus(k) then x_plus(k) for each pair in index order.
    void evaluate_generation(Generation &gen, const Objective &obj, EvalCounter &counter);

    /// Ranks all 2 lambda_tilde offspring (1 = best); ties keep offspring order.
    void assign_ranks(Generation &gen);

    /// sum_k (w_k^+ - w_k^-) b_k, with weights looked up by rank.
    Vector selected_direction(const Generation &gen, const StrategyParams &params);

    /// sum of rank-weighted offspring, computed as m + sigma A sum_k (w_k^+ - w_k^-) b_k.
    Vector recombine_mean(const Generation &gen, const StrategyParams &params);

    struct CsaResult
    {
        Vector p_s;
        double g_s = 0.0;
        double sigma = 0.0;
    };

    CsaResult csa_update(const EsState &state, const Generation &gen, const StrategyParams &params);

    /// Everything an iteration does before the mean update: caching f(m),
    /// sampling, evaluation, ranking, the transformation update and CSA.
    struct SharedUpdate
    {
        Generation gen;
        GUpdate g;
        Matrix A_next;
        CsaResult csa;
        double f_m = 0.0;
    };

    SharedUpdate shared_update(const EsState &state, const Objective &obj, EvalCounter &counter,
                               const StrategyParams &params, RandomStream &rng);

    struct HeesStep
    {
        EsState state;
        Generation gen;
        GUpdate g;
    };

    /// One HE-ES iteration: 2 lambda_tilde + 1 evaluations once f(m) is cached.
    HeesStep hees_iteration(const EsState &state, const Objective &obj, EvalCounter &counter,
                            const StrategyParams &params, RandomStream &rng);
}
