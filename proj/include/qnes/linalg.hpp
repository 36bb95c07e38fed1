#pragma once

#include <Eigen/Dense>

#include "qnes/random.hpp"

namespace qnes
{
    using Vector = Eigen::VectorXd;
    using Matrix = Eigen::MatrixXd;

    /// Dense symmetric matrix with finite entries. Construction symmetrizes
    /// the input as (S + S^T) / 2.
    class SymMatrix
    {
    public:
        explicit SymMatrix(const Matrix &entries);

        static SymMatrix zero(int dim) { return SymMatrix(Matrix::Zero(dim, dim)); }

        int dim() const { return static_cast<int>(entries_.rows()); }
        const Matrix &matrix() const { return entries_; }
        double operator()(int i, int j) const { return entries_(i, j); }

    private:
        Matrix entries_;
    };

    /// One batch of d mutually orthogonal directions, stored as the columns
    /// of a d x d matrix.
    class DirectionBatch
    {
    public:
        explicit DirectionBatch(Matrix directions);

        int dim() const { return static_cast<int>(directions_.rows()); }
        auto direction(int i) const { return directions_.col(i); }
        double squared_norm(int i) const { return directions_.col(i).squaredNorm(); }
        const Matrix &matrix() const { return directions_; }

    private:
        Matrix directions_;
    };

    /// Matrix exponential of a symmetric matrix by eigendecomposition:
    /// Q diag(exp(lambda)) Q^T.
    SymMatrix sym_exp(const SymMatrix &s);

    /// Draws d orthogonal directions with uniformly random orientation. Each
    /// direction's length is an independent chi(d) draw, matching the norm
    /// distribution of a standard normal d-vector.
    DirectionBatch sample_orthogonal(RandomStream &rng, int d);

    /// E||N(0, I_d)|| ~ sqrt(d) (1 - 1/(4d) + 1/(21 d^2)).
    double chi_mean(int d);

    /// Symmetric factor P of the polar decomposition M = P R (R orthogonal).
    /// P P^T = M M^T, so sampling with P b instead of M b leaves the
    /// distribution of rotation-invariant b unchanged.
    Matrix symmetric_polar_factor(const Matrix &m);

    bool all_finite(const Matrix &m);
}
