#include "qnes/driver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qnes/error.hpp"
#include "qnes/qn.hpp"

namespace qnes
{
    StoppingCriteria StoppingCriteria::defaults(int d)
    {
        StoppingCriteria s;
        s.max_evals = 100000LL * d;
        s.stagnation_window = 50 + 10 * d;
        return s;
    }

    bool detect_stagnation(std::span<const double> f_best_window, const StoppingCriteria &stop)
    {
        if (f_best_window.size() < 2)
            return false;
        const double first = f_best_window.front();
        const double last = f_best_window.back();
        const double threshold = std::max(stop.stagnation_tol * std::abs(first), 1e-30);
        return first - last < threshold;
    }

    StrategyParams grow_population(const StrategyParams &params, int d, int multiplier)
    {
        StrategyParams next = params_for(d, params.lambda_tilde * multiplier, params.kappa, params.eta_a);
        next.gradient_mode = params.gradient_mode;
        next.csa_mode = params.csa_mode;
        return next;
    }

    namespace
    {
        struct RunContext
        {
            Algorithm kind;
            const Objective &obj;
            const StoppingCriteria &stop;
            const InitialConditions &init;
            RandomStream rng;
            RunLog log;
            std::int64_t evaluations = 0;
            double best = std::numeric_limits<double>::infinity();
            long iteration = 0;
        };

        double gap_of(const RunContext &ctx, double f)
        {
            if (!std::isfinite(f))
                return std::numeric_limits<double>::infinity();
            return ctx.obj.gap(f).value_or(std::numeric_limits<double>::quiet_NaN());
        }

        bool target_reached(const RunContext &ctx)
        {
            const double gap = gap_of(ctx, ctx.best);
            return ctx.log.gap_known && gap <= ctx.stop.target_gap;
        }

        bool state_is_sane(const EsState &s)
        {
            if (!s.m.allFinite() || !s.A.allFinite() || !s.p_s.allFinite())
                return false;
            if (!std::isfinite(s.sigma) || s.sigma < 1e-300)
                return false;
            if (!std::isfinite(s.g_s) || (s.f_m && !std::isfinite(*s.f_m)))
                return false;
            return std::abs(s.A.determinant() - 1.0) <= 1e-3;
        }

        Termination run_segment(RunContext &ctx, const StrategyParams &params, int segment)
        {
            const int d = ctx.obj.dim;
            Vector m0(d);
            if (ctx.init.m0 && segment == 0)
                m0 = *ctx.init.m0;
            else
                for (int i = 0; i < d; ++i)
                    m0[i] = ctx.rng.uniform(ctx.init.box_low, ctx.init.box_high);

            EsState state = EsState::initial(std::move(m0), ctx.init.sigma0);
            EtaTracker tracker;
            SwitchState switch_state;
            EvalCounter counter;
            const std::int64_t evals_before = ctx.evaluations;

            const auto sync = [&]
            {
                ctx.evaluations = evals_before + counter.count();
                ctx.best = std::min(ctx.best, counter.best());
            };

            state.f_m = evaluate_counted(ctx.obj, counter, state.m);
            sync();
            if (segment == 0)
                ctx.log.initial_gap = gap_of(ctx, *state.f_m);
            if (target_reached(ctx))
                return Termination::target_reached;

            const auto window = static_cast<std::size_t>(ctx.stop.stagnation_window);
            std::vector<double> segment_best{counter.best()};

            while (true)
            {
                if (ctx.evaluations >= ctx.stop.max_evals)
                    return Termination::budget_exhausted;

                IterationRecord rec;
                try
                {
                    if (ctx.kind == Algorithm::hees)
                    {
                        HeesStep step = hees_iteration(state, ctx.obj, counter, params, ctx.rng);
                        state = std::move(step.state);
                        // HE-ES ignores eta; it is tracked for diagnostics only.
                        if (step.g.mean_q)
                            tracker.push(*step.g.mean_q);
                        rec.step_type = StepType::recombination;
                        rec.eta = tracker.eta();
                    }
                    else
                    {
                        QnesStep step = qnes_iteration(state, tracker, switch_state, ctx.obj, counter, params, ctx.rng);
                        state = std::move(step.state);
                        tracker = step.tracker;
                        switch_state = step.switch_state;
                        const bool qn = step.record.applied == StepKind::quasi_newton;
                        if (step.record.compared())
                            rec.step_type = qn ? StepType::both_quasi_newton_won : StepType::both_recombination_won;
                        else
                            rec.step_type = qn ? StepType::quasi_newton : StepType::recombination;
                        rec.R = switch_state.R;
                        rec.eta = step.record.eta;
                    }
                }
                catch (const NumericalAbort &)
                {
                    sync();
                    return Termination::numerical_abort;
                }
                sync();
                if (!state_is_sane(state))
                    return Termination::numerical_abort;

                rec.iteration = ++ctx.iteration;
                rec.evaluations = ctx.evaluations;
                rec.gap = gap_of(ctx, ctx.best);
                rec.f_mean = *state.f_m;
                rec.sigma = state.sigma;
                rec.det_error = std::abs(state.A.determinant() - 1.0);
                rec.segment = segment;
                ctx.log.records.push_back(rec);
                ctx.log.final_A = state.A;
                ctx.log.final_mean = state.m;
                ctx.log.final_eta = tracker.eta();

                if (target_reached(ctx))
                    return Termination::target_reached;

                segment_best.push_back(counter.best());
                if (segment_best.size() > window &&
                    detect_stagnation(std::span<const double>(segment_best).last(window + 1), ctx.stop))
                    return Termination::stagnation;
            }
        }

        RunContext make_context(Algorithm kind, const Objective &obj, const StrategyParams &params,
                                const StoppingCriteria &stop, std::uint64_t seed, const InitialConditions &init)
        {
            if (kind == Algorithm::qnes && params.lambda_tilde % obj.dim != 0)
                throw InvalidInput("QN-ES needs lambda_tilde to be a multiple of d");
            if (!(stop.target_gap > 0.0))
                throw InvalidInput("target gap must be positive");
            if (init.m0 && init.m0->size() != obj.dim)
                throw InvalidInput("initial mean has the wrong dimension");

            RunContext ctx{kind, obj, stop, init, RandomStream(seed), {}};
            ctx.log.benchmark = obj.name;
            ctx.log.dim = obj.dim;
            ctx.log.kind = kind;
            ctx.log.seed = seed;
            ctx.log.params = params;
            ctx.log.gap_known = obj.has_gap();
            return ctx;
        }
    }

    RunLog run(Algorithm kind, const Objective &obj, const StrategyParams &params, const StoppingCriteria &stop,
               std::uint64_t seed, const InitialConditions &init)
    {
        RunContext ctx = make_context(kind, obj, params, stop, seed, init);
        ctx.log.segment_lambdas.push_back(params.lambda_tilde);
        ctx.log.termination = run_segment(ctx, params, 0);
        ctx.log.evaluations = ctx.evaluations;
        return std::move(ctx.log);
    }

    RunLog ipop_run(Algorithm kind, const Objective &obj, const StrategyParams &base_params,
                    const StoppingCriteria &stop, const RestartPolicy &policy, std::uint64_t seed,
                    const InitialConditions &init)
    {
        if (!policy.enabled)
            return run(kind, obj, base_params, stop, seed, init);

        RunContext ctx = make_context(kind, obj, base_params, stop, seed, init);
        StrategyParams params = base_params;
        for (int segment = 0;; ++segment)
        {
            ctx.log.segment_lambdas.push_back(params.lambda_tilde);
            const Termination reason = run_segment(ctx, params, segment);
            const bool restartable = reason == Termination::stagnation || reason == Termination::numerical_abort;
            if (!restartable)
            {
                ctx.log.termination = reason;
                break;
            }
            if (segment >= policy.max_restarts)
            {
                ctx.log.termination = Termination::max_restarts;
                break;
            }
            if (ctx.evaluations >= stop.max_evals)
            {
                ctx.log.termination = Termination::budget_exhausted;
                break;
            }
            params = grow_population(params, obj.dim, policy.multiplier);
        }
        ctx.log.evaluations = ctx.evaluations;
        return std::move(ctx.log);
    }
}
