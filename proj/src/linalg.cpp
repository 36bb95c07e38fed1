#include "qnes/linalg.hpp"

#include <cmath>

#include "qnes/error.hpp"

namespace qnes
{
    bool all_finite(const Matrix &m)
    {
        return m.allFinite();
    }

    SymMatrix::SymMatrix(const Matrix &entries)
    {
        if (entries.rows() != entries.cols() || entries.rows() == 0)
            throw InvalidInput("SymMatrix: expected a non-empty square matrix");
        if (!entries.allFinite())
            throw InvalidInput("SymMatrix: non-finite entries");
        entries_ = 0.5 * (entries + entries.transpose());
    }

    DirectionBatch::DirectionBatch(Matrix directions) : directions_(std::move(directions))
    {
        if (directions_.rows() != directions_.cols() || directions_.rows() == 0)
            throw InvalidInput("DirectionBatch: expected d directions of dimension d");
    }

    SymMatrix sym_exp(const SymMatrix &s)
    {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(s.matrix());
        if (eig.info() != Eigen::Success)
            throw NumericalAbort("sym_exp: eigendecomposition failed");
        const Matrix &q = eig.eigenvectors();
        const Vector scale = eig.eigenvalues().array().exp().matrix();
        return SymMatrix(q * scale.asDiagonal() * q.transpose());
    }

    DirectionBatch sample_orthogonal(RandomStream &rng, int d)
    {
        if (d < 1)
            throw InvalidInput("sample_orthogonal: dimension must be positive");

        Matrix gauss(d, d);
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < d; ++i)
                gauss(i, j) = rng.normal();

        Eigen::HouseholderQR<Matrix> qr(gauss);
        Matrix q = qr.householderQ() * Matrix::Identity(d, d);
        const Matrix &r = qr.matrixQR();

        // Sign fix (diag(R) > 0) makes Q Haar-distributed.
        for (int k = 0; k < d; ++k)
        {
            const double sign = r(k, k) < 0.0 ? -1.0 : 1.0;
            q.col(k) *= sign * rng.chi(d);
        }
        return DirectionBatch(std::move(q));
    }

    double chi_mean(int d)
    {
        const double n = static_cast<double>(d);
        return std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
    }

    Matrix symmetric_polar_factor(const Matrix &m)
    {
        Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU);
        const Matrix &u = svd.matrixU();
        Matrix p = u * svd.singularValues().asDiagonal() * u.transpose();
        return 0.5 * (p + p.transpose());
    }
}
