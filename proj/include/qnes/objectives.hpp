#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "qnes/linalg.hpp"

namespace qnes
{
    /// A deterministic black-box objective f : R^d -> R.
    ///
    /// `f_star` is the optimal value when it is finite and known. Some
    /// problems (log-sphere) have an infimum of -inf; for those the optimality
    /// gap is supplied by `gap_of_value`, a strictly increasing map from f to
    /// a nonnegative gap.
    struct Objective
    {
        std::string name;
        int dim = 0;
        std::function<double(const Vector &)> evaluator;
        std::optional<double> f_star;
        std::optional<Vector> x_star;
        std::function<double(double)> gap_of_value;

        double operator()(const Vector &x) const { return evaluator(x); }

        bool has_gap() const { return f_star.has_value() || static_cast<bool>(gap_of_value); }

        /// f - f_star, or the custom gap. Empty when neither is known.
        std::optional<double> gap(double f) const
        {
            if (f_star)
                return f - *f_star;
            if (gap_of_value)
                return gap_of_value(f);
            return std::nullopt;
        }
    };

    /// Counts evaluator calls and remembers the best finite value seen.
    class EvalCounter
    {
    public:
        std::int64_t count() const { return count_; }
        double best() const { return best_; }

        void record(double value)
        {
            ++count_;
            if (std::isfinite(value) && value < best_)
                best_ = value;
        }

    private:
        std::int64_t count_ = 0;
        double best_ = std::numeric_limits<double>::infinity();
    };

    /// Evaluates obj at x and increments the counter once.
    double evaluate_counted(const Objective &obj, EvalCounter &counter, const Vector &x);

    /// Names accepted by make_benchmark, in table order.
    std::span<const std::string_view> benchmark_names();

    /// Builds one of the nine standard benchmarks: sphere, ellipsoid, discus,
    /// cigar, rosenbrock, log-sphere, one-norm, sum-of-different-powers,
    /// happycat. Rosenbrock is the variant shifted to have its optimum at the
    /// origin; happycat uses the exponent 1/4.
    Objective make_benchmark(std::string_view name, int d);

    /// f(x) = 1/2 x^T diag(h) x.
    Objective make_diagonal_quadratic(const Vector &hessian_diagonal);
}
