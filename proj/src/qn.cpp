#include "qnes/qn.hpp"

#include <algorithm>
#include <cmath>

#include "qnes/error.hpp"

namespace qnes
{
    void EtaTracker::push(double mean_q)
    {
        ring_[head_] = mean_q;
        head_ = (head_ + 1) % capacity;
        size_ = std::min(size_ + 1, capacity);
    }

    std::vector<double> EtaTracker::entries() const
    {
        std::vector<double> out;
        out.reserve(size_);
        const int start = (head_ - size_ + capacity) % capacity;
        for (int i = 0; i < size_; ++i)
            out.push_back(ring_[(start + i) % capacity]);
        return out;
    }

    std::optional<double> EtaTracker::eta() const
    {
        if (size_ == 0)
            return std::nullopt;
        double sum = 0.0;
        for (const double v : entries())
            sum += v;
        return std::exp(-sum / size_);
    }

    EtaTracker eta_update(EtaTracker tracker, double mean_q)
    {
        tracker.push(mean_q);
        return tracker;
    }

    std::optional<double> eta_value(const EtaTracker &tracker)
    {
        return tracker.eta();
    }

    SwitchProbabilities switch_probabilities(double R)
    {
        return {std::clamp(2.5 * (1.0 - R), 0.01, 1.0), std::clamp(2.5 * R, 0.01, 1.0)};
    }

    double switch_update(double R, StepKind winner)
    {
        return winner == StepKind::quasi_newton ? std::min(1.0, 0.8 * R + 0.2) : 0.8 * R;
    }

    Vector estimate_gradient(const Generation &gen, double sigma, int n_batches, GradientMode mode)
    {
        const int d = gen.dim();
        if (gen.lambda_tilde < d)
            throw InvalidInput("estimate_gradient: needs at least d mirrored pairs");
        Vector delta = Vector::Zero(d);
        for (int k = 0; k < gen.lambda_tilde; ++k)
        {
            const double norm_sq = gen.direction_squared_norm(k);
            const double scale = mode == GradientMode::exact ? norm_sq : std::sqrt(norm_sq);
            delta += ((gen.f_plus[k] - gen.f_minus[k]) / scale) * gen.direction(k);
        }
        return delta / (2.0 * sigma * n_batches);
    }

    Vector qn_step(const Matrix &A, const Vector &delta, double eta)
    {
        return -eta * (A.transpose() * delta);
    }

    QnesStep qnes_iteration(const EsState &state, const EtaTracker &tracker, const SwitchState &switch_state,
                            const Objective &obj, EvalCounter &counter, const StrategyParams &params,
                            RandomStream &rng)
    {
        const int d = state.dim();
        if (params.lambda_tilde % d != 0)
            throw InvalidInput("qnes_iteration: lambda_tilde must be a multiple of d");

        SharedUpdate shared = shared_update(state, obj, counter, params, rng);

        QnesStep out;
        out.tracker = tracker;
        out.switch_state = switch_state;
        QnStepRecord &rec = out.record;

        if (shared.g.mean_q)
            out.tracker.push(*shared.g.mean_q);
        rec.eta = out.tracker.eta();
        rec.delta = estimate_gradient(shared.gen, state.sigma, params.n_batches, params.gradient_mode);

        const bool qn_possible = shared.g.mean_q.has_value() && rec.eta.has_value();
        if (qn_possible)
        {
            const SwitchProbabilities prob = switch_probabilities(switch_state.R);
            rec.recombination_active = rng.uniform() < prob.recombination;
            rec.quasi_newton_active = rng.uniform() < prob.quasi_newton;
        }
        else
        {
            rec.recombination_active = true;
        }

        double sigma_next = shared.csa.sigma;
        Vector m_next;
        double f_next = 0.0;

        if (rec.quasi_newton_active)
            rec.p = qn_step(state.A, rec.delta, *rec.eta);

        if (rec.compared())
        {
            const Vector m_rec = recombine_mean(shared.gen, params);
            const Vector m_qn = state.m + rec.p;
            const double f_rec = evaluate_counted(obj, counter, m_rec);
            const double f_qn = evaluate_counted(obj, counter, m_qn);
            const bool qn_wins = f_qn < f_rec;
            rec.applied = qn_wins ? StepKind::quasi_newton : StepKind::recombination;
            out.switch_state.R = switch_update(switch_state.R, rec.applied);
            m_next = qn_wins ? m_qn : m_rec;
            f_next = qn_wins ? f_qn : f_rec;
        }
        else if (rec.quasi_newton_active)
        {
            rec.applied = StepKind::quasi_newton;
            m_next = state.m + rec.p;
            f_next = evaluate_counted(obj, counter, m_next);
        }
        else
        {
            rec.applied = StepKind::recombination;
            m_next = recombine_mean(shared.gen, params);
            f_next = evaluate_counted(obj, counter, m_next);
        }

        if (rec.applied == StepKind::quasi_newton)
            sigma_next = std::min(sigma_next, *rec.eta * rec.delta.norm());

        out.state.m = std::move(m_next);
        out.state.f_m = f_next;
        out.state.sigma = sigma_next;
        out.state.A = std::move(shared.A_next);
        out.state.p_s = std::move(shared.csa.p_s);
        out.state.g_s = shared.csa.g_s;
        out.state.t = state.t + 1;
        out.gen = std::move(shared.gen);
        out.g = std::move(shared.g);
        return out;
    }
}
