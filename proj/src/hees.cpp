#include "qnes/hees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qnes/error.hpp"

namespace qnes
{
    double mirrored_mu_eff(const Vector &weights)
    {
        const Eigen::Index n = weights.size();
        double sum = 0.0;
        for (Eigen::Index k = 0; k < n / 2; ++k)
        {
            const double diff = weights[k] - weights[n - 1 - k];
            sum += diff * diff;
        }
        return 1.0 / sum;
    }

    StrategyParams params_for(int d, int lambda_tilde, double kappa, double eta_a)
    {
        if (d < 1 || lambda_tilde < 1)
            throw InvalidInput("params_for: dimension and number of pairs must be positive");
        if (!(kappa > 1.0))
            throw InvalidInput("params_for: kappa must exceed 1");
        if (!(eta_a > 0.0 && eta_a <= 1.0))
            throw InvalidInput("params_for: eta_A must lie in (0, 1]");

        StrategyParams p;
        p.lambda_tilde = lambda_tilde;
        p.n_batches = (lambda_tilde + d - 1) / d;
        p.kappa = kappa;
        p.eta_a = eta_a;

        const int n = 2 * lambda_tilde;
        p.weights.resize(n);
        const double top = std::log(lambda_tilde + 0.5);
        for (int k = 1; k <= n; ++k)
            p.weights[k - 1] = std::max(0.0, top - std::log(static_cast<double>(k)));
        p.weights /= p.weights.sum();

        p.mu_eff_mirrored = mirrored_mu_eff(p.weights);
        const double mu = p.mu_eff_mirrored;
        p.c_s = (mu + 2.0) / (d + mu + 5.0);
        p.d_s = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu - 1.0) / (d + 1.0)) - 1.0) + p.c_s;
        return p;
    }

    StrategyParams default_params(int d, Algorithm kind)
    {
        if (d < 1)
            throw InvalidInput("default_params: dimension must be positive");
        if (kind == Algorithm::qnes)
            return params_for(d, d);
        const int lambda = 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(d))));
        return params_for(d, std::max(2, (lambda + 1) / 2));
    }

    EsState EsState::initial(Vector mean, double sigma)
    {
        EsState s;
        const auto d = mean.size();
        s.m = std::move(mean);
        s.sigma = sigma;
        s.A = Matrix::Identity(d, d);
        s.p_s = Vector::Zero(d);
        return s;
    }

    GUpdate compute_g(std::span<const DirectionBatch> batches, double f_m, const Vector &f_plus,
                      const Vector &f_minus, double sigma, const StrategyParams &params)
    {
        if (batches.empty())
            throw InvalidInput("compute_g: no direction batches");
        const int d = batches.front().dim();
        const int lambda = params.lambda_tilde;
        const int n_b = static_cast<int>(batches.size());
        if (f_plus.size() != lambda || f_minus.size() != lambda || lambda > n_b * d)
            throw InvalidInput("compute_g: expected one value pair per used direction");
        if (!(sigma > 0.0))
            throw InvalidInput("compute_g: sigma must be positive");
        if (!std::isfinite(f_m) || !f_plus.allFinite() || !f_minus.allFinite())
            throw NumericalAbort("compute_g: non-finite objective value");

        const auto norm_sq = [&](int k) { return batches[k / d].squared_norm(k % d); };

        Vector h(lambda);
        for (int k = 0; k < lambda; ++k)
            h[k] = (f_plus[k] + f_minus[k] - 2.0 * f_m) / (sigma * sigma * norm_sq(k));
        if (!h.allFinite())
            throw NumericalAbort("compute_g: non-finite curvature estimate");

        GUpdate out;
        const double h_max = h.maxCoeff();
        if (h_max <= 0.0)
        {
            out.G = Matrix::Identity(d, d);
            return out;
        }

        const double floor_value = h_max / params.kappa;
        h = h.cwiseMax(floor_value);
        out.curvatures = h;

        Vector q = h.array().log().matrix();
        const double mean_q = q.mean();
        q = (q.array() - mean_q) * (-0.5 * params.eta_a);

        // Directions with k >= lambda_tilde carry q = 0 and drop out of the sum.
        Matrix s = Matrix::Zero(d, d);
        for (int k = 0; k < lambda; ++k)
        {
            const auto b = batches[k / d].direction(k % d);
            s.noalias() += (q[k] / norm_sq(k)) * (b * b.transpose());
        }
        s /= static_cast<double>(n_b);
        if (!s.allFinite())
            throw NumericalAbort("compute_g: non-finite exponent");

        out.G = sym_exp(SymMatrix(s)).matrix();
        out.mean_q = mean_q;
        return out;
    }

    Generation sample_generation(const EsState &state, const StrategyParams &params, RandomStream &rng)
    {
        const int d = state.dim();
        Generation gen;
        gen.lambda_tilde = params.lambda_tilde;
        gen.mean = state.m;
        gen.sigma = state.sigma;
        gen.A = state.A;
        gen.batches.reserve(params.n_batches);
        for (int j = 0; j < params.n_batches; ++j)
            gen.batches.push_back(sample_orthogonal(rng, d));

        gen.x_minus.resize(d, gen.lambda_tilde);
        gen.x_plus.resize(d, gen.lambda_tilde);
        for (int k = 0; k < gen.lambda_tilde; ++k)
        {
            const Vector step = state.sigma * (state.A * gen.direction(k));
            gen.x_minus.col(k) = state.m - step;
            gen.x_plus.col(k) = state.m + step;
        }
        return gen;
    }

    void evaluate_generation(Generation &gen, const Objective &obj, EvalCounter &counter)
    {
        gen.f_minus.resize(gen.lambda_tilde);
        gen.f_plus.resize(gen.lambda_tilde);
        for (int k = 0; k < gen.lambda_tilde; ++k)
        {
            gen.f_minus[k] = evaluate_counted(obj, counter, gen.x_minus.col(k));
            gen.f_plus[k] = evaluate_counted(obj, counter, gen.x_plus.col(k));
        }
    }

    void assign_ranks(Generation &gen)
    {
        const int n = 2 * gen.lambda_tilde;
        const auto value = [&](int o) { return o % 2 == 0 ? gen.f_minus[o / 2] : gen.f_plus[o / 2]; };

        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return value(a) < value(b); });

        gen.ranks.assign(n, 0);
        for (int r = 0; r < n; ++r)
            gen.ranks[order[r]] = r + 1;
    }

    Vector selected_direction(const Generation &gen, const StrategyParams &params)
    {
        if (static_cast<int>(gen.ranks.size()) != 2 * gen.lambda_tilde)
            throw InvalidInput("selected_direction: generation has not been ranked");
        Vector sum = Vector::Zero(gen.dim());
        for (int k = 0; k < gen.lambda_tilde; ++k)
        {
            const double w_minus = params.weights[gen.ranks[2 * k] - 1];
            const double w_plus = params.weights[gen.ranks[2 * k + 1] - 1];
            sum += (w_plus - w_minus) * gen.direction(k);
        }
        return sum;
    }

    Vector recombine_mean(const Generation &gen, const StrategyParams &params)
    {
        // Sum of w x over mirrored pairs, using sum(w) = 1.
        const Vector z = selected_direction(gen, params);
        return gen.mean + gen.sigma * (gen.A * z);
    }

    CsaResult csa_update(const EsState &state, const Generation &gen, const StrategyParams &params)
    {
        const double c = params.c_s;
        const double decay = 1.0 - c;
        CsaResult out;
        out.g_s = decay * decay * state.g_s + c * (2.0 - c);
        out.p_s = decay * state.p_s +
                  std::sqrt(c * (2.0 - c) * params.mu_eff_mirrored) * selected_direction(gen, params);

        const double ratio = out.p_s.norm() / chi_mean(state.dim());
        const double exponent = params.csa_mode == CsaMode::grouped
                                    ? (c / params.d_s) * (ratio - std::sqrt(out.g_s))
                                    : (c / params.d_s) * ratio - std::sqrt(out.g_s);
        out.sigma = state.sigma * std::exp(exponent);
        return out;
    }

    SharedUpdate shared_update(const EsState &state, const Objective &obj, EvalCounter &counter,
                               const StrategyParams &params, RandomStream &rng)
    {
        SharedUpdate out;
        out.f_m = state.f_m ? *state.f_m : evaluate_counted(obj, counter, state.m);

        out.gen = sample_generation(state, params, rng);
        evaluate_generation(out.gen, obj, counter);
        assign_ranks(out.gen);

        out.g = compute_g(out.gen.batches, out.f_m, out.gen.f_plus, out.gen.f_minus, state.sigma, params);
        // A stays symmetric: A <- polar(A G) samples the same distribution as A G.
        out.A_next = out.g.mean_q ? symmetric_polar_factor(state.A * out.g.G) : state.A;
        out.csa = csa_update(state, out.gen, params);
        return out;
    }

    HeesStep hees_iteration(const EsState &state, const Objective &obj, EvalCounter &counter,
                            const StrategyParams &params, RandomStream &rng)
    {
        SharedUpdate shared = shared_update(state, obj, counter, params, rng);

        HeesStep out;
        out.state.m = recombine_mean(shared.gen, params);
        out.state.A = std::move(shared.A_next);
        out.state.sigma = shared.csa.sigma;
        out.state.p_s = std::move(shared.csa.p_s);
        out.state.g_s = shared.csa.g_s;
        out.state.t = state.t + 1;
        out.state.f_m = evaluate_counted(obj, counter, out.state.m);
        out.gen = std::move(shared.gen);
        out.g = std::move(shared.g);
        return out;
    }
}
