#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>

#include "qnes/driver.hpp"
#include "qnes/error.hpp"
#include "qnes/objectives.hpp"

using namespace qnes;

namespace
{
    bool same_records(const RunLog &a, const RunLog &b)
    {
        if (a.records.size() != b.records.size())
            return false;
        for (std::size_t i = 0; i < a.records.size(); ++i)
        {
            const IterationRecord &x = a.records[i];
            const IterationRecord &y = b.records[i];
            if (x.evaluations != y.evaluations || x.gap != y.gap || x.f_mean != y.f_mean || x.sigma != y.sigma ||
                x.R != y.R || x.step_type != y.step_type || x.eta != y.eta || x.segment != y.segment)
                return false;
        }
        return true;
    }

    Objective constant_objective(int d)
    {
        Objective obj;
        obj.name = "constant";
        obj.dim = d;
        obj.evaluator = [](const Vector &) { return 1.0; };
        obj.f_star = 0.0;
        return obj;
    }
}

TEST_CASE("sphere reaches the target")
{
    const Objective sphere = make_benchmark("sphere", 5);
    for (const Algorithm kind : {Algorithm::qnes, Algorithm::hees})
    {
        const RunLog log = run(kind, sphere, default_params(5, kind), StoppingCriteria::defaults(5), 1);
        CHECK(log.termination == Termination::target_reached);
        CHECK(log.records.back().gap <= 1e-20);
        CHECK(log.records.back().det_error <= 1e-8);
    }
}

TEST_CASE("default stopping criteria")
{
    const StoppingCriteria s = StoppingCriteria::defaults(10);
    CHECK(s.max_evals == 1000000);
    CHECK(s.stagnation_window == 150);
    CHECK(s.target_gap == 1e-20);
}

TEST_CASE("same seed gives the same run")
{
    const Objective obj = make_benchmark("rosenbrock", 4);
    for (const Algorithm kind : {Algorithm::qnes, Algorithm::hees})
    {
        const StrategyParams p = default_params(4, kind);
        const RunLog a = ipop_run(kind, obj, p, StoppingCriteria::defaults(4), {}, 77);
        const RunLog b = ipop_run(kind, obj, p, StoppingCriteria::defaults(4), {}, 77);
        CHECK(same_records(a, b));
        CHECK(a.final_mean == b.final_mean);
        const RunLog c = ipop_run(kind, obj, p, StoppingCriteria::defaults(4), {}, 78);
        CHECK_FALSE(same_records(a, c));
    }
}

TEST_CASE("a budget of one iteration")
{
    const int d = 5;
    const Objective obj = make_benchmark("ellipsoid", d);
    const StrategyParams p = default_params(d, Algorithm::qnes);
    StoppingCriteria stop = StoppingCriteria::defaults(d);
    stop.max_evals = 2 * p.lambda_tilde + 2;
    const RunLog log = run(Algorithm::qnes, obj, p, stop, 3);
    CHECK(log.records.size() <= 1);
    CHECK(log.termination == Termination::budget_exhausted);
}

TEST_CASE("the budget is respected up to one iteration")
{
    const int d = 6;
    const Objective obj = make_benchmark("rosenbrock", d);
    for (const Algorithm kind : {Algorithm::qnes, Algorithm::hees})
    {
        const StrategyParams p = default_params(d, kind);
        StoppingCriteria stop = StoppingCriteria::defaults(d);
        stop.max_evals = 1234;
        const RunLog log = ipop_run(kind, obj, p, stop, {}, 4);
        CHECK(log.evaluations <= stop.max_evals + 2 * p.lambda_tilde * (1 << 9) + 2);
        CHECK(log.evaluations >= stop.max_evals);
        CHECK(log.records.back().evaluations == log.evaluations);
    }
}

TEST_CASE("stagnation detection")
{
    StoppingCriteria stop;
    std::vector<double> geometric;
    for (int i = 0; i < 60; ++i)
        geometric.push_back(std::pow(0.9, i));
    CHECK_FALSE(detect_stagnation(geometric, stop));

    const std::vector<double> flat(60, 1.0);
    CHECK(detect_stagnation(flat, stop));

    // Improvement exactly at the threshold is not stagnation.
    StoppingCriteria loose;
    loose.stagnation_tol = 0.25;
    std::vector<double> edge(60, 1.0);
    edge.back() = 0.75;
    CHECK_FALSE(detect_stagnation(edge, loose));
    edge.back() = 0.875;
    CHECK(detect_stagnation(edge, loose));

    // The absolute floor applies near zero.
    const std::vector<double> tiny{1e-40, 1e-41};
    CHECK(detect_stagnation(tiny, stop));
}

TEST_CASE("restarts double the population")
{
    const int d = 3;
    const Objective obj = constant_objective(d);
    StrategyParams p = default_params(d, Algorithm::qnes);
    StoppingCriteria stop = StoppingCriteria::defaults(d);
    stop.stagnation_window = 10;
    RestartPolicy policy;
    policy.max_restarts = 3;
    const RunLog log = ipop_run(Algorithm::qnes, obj, p, stop, policy, 5);
    REQUIRE(log.segment_lambdas.size() == 4);
    for (std::size_t k = 0; k < log.segment_lambdas.size(); ++k)
        CHECK(log.segment_lambdas[k] == p.lambda_tilde * (1 << k));
    CHECK(log.termination == Termination::max_restarts);
    CHECK(log.records.back().segment == 3);

    const StrategyParams grown = grow_population(p, d, 2);
    CHECK(grown.lambda_tilde == 2 * p.lambda_tilde);
    CHECK(grown.n_batches == 2);
    CHECK(grown.kappa == p.kappa);
    CHECK(grown.gradient_mode == p.gradient_mode);
}

TEST_CASE("no restart when the target is reached in the first segment")
{
    const Objective sphere = make_benchmark("sphere", 4);
    const RunLog log =
        ipop_run(Algorithm::qnes, sphere, default_params(4, Algorithm::qnes), StoppingCriteria::defaults(4), {}, 6);
    CHECK(log.termination == Termination::target_reached);
    CHECK(log.segment_lambdas.size() == 1);
}

TEST_CASE("a non-finite value triggers a restart")
{
    const int d = 4;
    const Objective sphere = make_benchmark("sphere", d);
    auto calls = std::make_shared<long>(0);
    Objective faulty = sphere;
    faulty.evaluator = [sphere, calls](const Vector &x)
    {
        return ++*calls == 40 ? std::numeric_limits<double>::quiet_NaN() : sphere(x);
    };
    const StrategyParams p = default_params(d, Algorithm::hees);

    *calls = 0;
    const RunLog single = run(Algorithm::hees, faulty, p, StoppingCriteria::defaults(d), 7);
    CHECK(single.termination == Termination::numerical_abort);

    *calls = 0;
    const RunLog restarted = ipop_run(Algorithm::hees, faulty, p, StoppingCriteria::defaults(d), {}, 7);
    CHECK(restarted.termination == Termination::target_reached);
    CHECK(restarted.segment_lambdas.size() == 2);
    for (const IterationRecord &r : restarted.records)
        CHECK(std::isfinite(r.f_mean));
}

TEST_CASE("best gap never increases across restarts")
{
    const int d = 5;
    const Objective obj = make_benchmark("happycat", d);
    StoppingCriteria stop = StoppingCriteria::defaults(d);
    stop.max_evals = 20000;
    stop.stagnation_window = 20;
    for (const Algorithm kind : {Algorithm::qnes, Algorithm::hees})
    {
        const RunLog log = ipop_run(kind, obj, default_params(d, kind), stop, {}, 8);
        for (std::size_t i = 1; i < log.records.size(); ++i)
            CHECK(log.records[i].gap <= log.records[i - 1].gap);
        CHECK(log.records.back().gap <= log.initial_gap);
    }
}

TEST_CASE("invalid configurations are rejected")
{
    const Objective sphere = make_benchmark("sphere", 4);
    StrategyParams p = params_for(4, 6);
    CHECK_THROWS_AS(run(Algorithm::qnes, sphere, p, StoppingCriteria::defaults(4), 1), InvalidInput);
    StoppingCriteria bad = StoppingCriteria::defaults(4);
    bad.target_gap = 0.0;
    CHECK_THROWS_AS(run(Algorithm::hees, sphere, default_params(4, Algorithm::hees), bad, 1), InvalidInput);
    InitialConditions init;
    init.m0 = Vector::Zero(3);
    CHECK_THROWS_AS(
        run(Algorithm::hees, sphere, default_params(4, Algorithm::hees), StoppingCriteria::defaults(4), 1, init),
        InvalidInput);
}

TEST_CASE("hees records no switch rate")
{
    const Objective sphere = make_benchmark("sphere", 3);
    const RunLog log = run(Algorithm::hees, sphere, default_params(3, Algorithm::hees), StoppingCriteria::defaults(3), 2);
    for (const IterationRecord &r : log.records)
    {
        CHECK_FALSE(r.R);
        CHECK(r.step_type == StepType::recombination);
    }
}
