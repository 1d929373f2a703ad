#include "msamp/normalize.hpp"

#include <cmath>
#include <limits>

namespace msamp {

std::pair<Vector, Matrix> empirical_moments(const Matrix& columns) {
    const Index count = columns.cols();
    if (count < 2) {
        throw DataError("empirical covariance needs at least 2 samples");
    }
    Vector mean = columns.rowwise().mean();
    const Matrix centered = columns.colwise() - mean;
    Matrix cov = (centered * centered.transpose()) / static_cast<double>(count - 1);
    return {std::move(mean), std::move(cov)};
}

PcaModel fit_pca(const DataMatrix& x, double rank_tol) {
    if (!(rank_tol > 0.0 && rank_tol < 1.0)) {
        throw DataError("rank_tol must lie in (0, 1)");
    }
    auto [mean, cov] = empirical_moments(x.values());

    Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw NumericError("covariance eigen-decomposition failed");
    }
    const Vector& values = solver.eigenvalues(); // ascending
    const Index n = values.size();
    const double largest = values(n - 1);

    // Rounding floor for a covariance of identical columns.
    const double magnitude = x.values().cwiseAbs().maxCoeff();
    const double floor = std::pow(std::numeric_limits<double>::epsilon() * magnitude, 2) *
                         static_cast<double>(n);
    if (!(largest > floor) || !(largest > 0.0)) {
        throw NumericError("covariance has no eigenvalue above the rank cutoff "
                           "(all samples are the same point)");
    }

    Index kept = 0;
    for (Index k = n - 1; k >= 0 && values(k) > rank_tol * largest; --k) {
        ++kept;
    }

    PcaModel model;
    model.mean = std::move(mean);
    model.rank_tol = rank_tol;
    model.eigvals.resize(kept);
    model.eigvecs.resize(n, kept);
    for (Index k = 0; k < kept; ++k) {
        const Index src = n - 1 - k;
        model.eigvals(k) = values(src);
        Vector v = solver.eigenvectors().col(src);
        Index pivot = 0;
        v.cwiseAbs().maxCoeff(&pivot);
        if (v(pivot) < 0.0) {
            v = -v;
        }
        model.eigvecs.col(k) = v;
    }
    return model;
}

NormalizedData normalize(const DataMatrix& x, const PcaModel& pca) {
    if (x.features() != pca.dim()) {
        throw DataError("normalize: data has " + std::to_string(x.features()) +
                        " features, model expects " + std::to_string(pca.dim()));
    }
    const Matrix centered = x.values().colwise() - pca.mean;
    const Vector inv_sqrt = pca.eigvals.cwiseSqrt().cwiseInverse();
    return {inv_sqrt.asDiagonal() * (pca.eigvecs.transpose() * centered)};
}

Matrix denormalize(const Matrix& eta_samples, const PcaModel& pca) {
    if (eta_samples.rows() != pca.rank()) {
        throw DataError("denormalize: samples have " + std::to_string(eta_samples.rows()) +
                        " rows, model rank is " + std::to_string(pca.rank()));
    }
    const Matrix scaled = pca.eigvals.cwiseSqrt().asDiagonal() * eta_samples;
    return (pca.eigvecs * scaled).colwise() + pca.mean;
}

} // namespace msamp
