#include "qnes/objectives.hpp"

#include <array>
#include <cmath>

#include "qnes/error.hpp"

namespace qnes
{
    namespace
    {
        constexpr std::array<std::string_view, 9> kNames{
            "sphere", "ellipsoid", "discus", "cigar", "rosenbrock",
            "log-sphere", "one-norm", "sum-of-different-powers", "happycat"};

        // Diagonal quadratic sum_i c_i x_i^2.
        Objective weighted_squares(std::string name, Vector coefficients)
        {
            const int d = static_cast<int>(coefficients.size());
            Objective obj;
            obj.name = std::move(name);
            obj.dim = d;
            obj.evaluator = [c = std::move(coefficients)](const Vector &x)
            { return (c.array() * x.array().square()).sum(); };
            obj.f_star = 0.0;
            obj.x_star = Vector::Zero(d);
            return obj;
        }
    }

    double evaluate_counted(const Objective &obj, EvalCounter &counter, const Vector &x)
    {
        if (x.size() != obj.dim)
            throw InvalidInput("evaluate_counted: point has dimension " + std::to_string(x.size()) +
                               ", objective '" + obj.name + "' expects " + std::to_string(obj.dim));
        const double value = obj(x);
        counter.record(value);
        return value;
    }

    std::span<const std::string_view> benchmark_names()
    {
        return kNames;
    }

    Objective make_benchmark(std::string_view name, int d)
    {
        const bool allows_d1 = name == "sphere" || name == "log-sphere" || name == "one-norm";
        bool known = false;
        for (const auto n : kNames)
            known = known || n == name;
        if (!known)
            throw InvalidInput("unknown benchmark '" + std::string(name) + "'");
        if (d < (allows_d1 ? 1 : 2))
            throw InvalidInput("benchmark '" + std::string(name) + "' needs d >= " + (allows_d1 ? "1" : "2"));

        const double n = static_cast<double>(d);

        if (name == "sphere")
            return weighted_squares("sphere", Vector::Ones(d));

        if (name == "ellipsoid")
        {
            Vector c(d);
            for (int i = 0; i < d; ++i)
                c[i] = std::pow(10.0, 6.0 * i / (n - 1.0));
            return weighted_squares("ellipsoid", std::move(c));
        }

        if (name == "discus")
        {
            Vector c = Vector::Ones(d);
            c[0] = 1e6;
            return weighted_squares("discus", std::move(c));
        }

        if (name == "cigar")
        {
            Vector c = Vector::Constant(d, 1e6);
            c[0] = 1.0;
            return weighted_squares("cigar", std::move(c));
        }

        Objective obj;
        obj.name = std::string(name);
        obj.dim = d;

        if (name == "rosenbrock")
        {
            obj.evaluator = [](const Vector &x)
            {
                double sum = 0.0;
                for (Eigen::Index i = 0; i + 1 < x.size(); ++i)
                {
                    const double r = x[i + 1] - 2.0 * x[i] - x[i] * x[i];
                    sum += 100.0 * r * r + x[i] * x[i];
                }
                return sum;
            };
            obj.f_star = 0.0;
            obj.x_star = Vector::Zero(d);
        }
        else if (name == "log-sphere")
        {
            // Infimum is -inf at the origin; the gap is the equivalent sphere
            // value exp(f) = ||x||^2.
            obj.evaluator = [](const Vector &x) { return std::log(x.squaredNorm()); };
            obj.x_star = Vector::Zero(d);
            obj.gap_of_value = [](double f) { return std::exp(f); };
        }
        else if (name == "one-norm")
        {
            obj.evaluator = [](const Vector &x) { return x.lpNorm<1>(); };
            obj.f_star = 0.0;
            obj.x_star = Vector::Zero(d);
        }
        else if (name == "sum-of-different-powers")
        {
            Vector exponents(d);
            for (int i = 0; i < d; ++i)
                exponents[i] = 2.0 + 4.0 * i / (n - 1.0);
            obj.evaluator = [e = std::move(exponents)](const Vector &x)
            {
                double sum = 0.0;
                for (Eigen::Index i = 0; i < x.size(); ++i)
                    sum += std::pow(std::abs(x[i]), e[i]);
                return std::sqrt(sum);
            };
            obj.f_star = 0.0;
            obj.x_star = Vector::Zero(d);
        }
        else // happycat
        {
            obj.evaluator = [n](const Vector &x)
            {
                const double sq = x.squaredNorm();
                const double ring = (sq - n) * (sq - n);
                return std::pow(ring, 0.25) + (0.5 * sq + x.sum()) / n + 0.5;
            };
            obj.f_star = 0.0;
            obj.x_star = Vector::Constant(d, -1.0);
        }
        return obj;
    }

    Objective make_diagonal_quadratic(const Vector &hessian_diagonal)
    {
        return weighted_squares("diagonal-quadratic", 0.5 * hessian_diagonal);
    }
}
