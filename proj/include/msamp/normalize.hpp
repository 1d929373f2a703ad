#ifndef MSAMP_NORMALIZE_HPP
#define MSAMP_NORMALIZE_HPP

#include "msamp/common.hpp"
#include "msamp/dataio.hpp"

namespace msamp {

/**
 * Affine whitening map x = mean + eigvecs * diag(eigvals)^{1/2} * eta.
 *
 * Eigenpairs of the empirical covariance are kept in descending order;
 * those at or below rank_tol * max(eigval) are discarded, so rank() may be
 * smaller than dim().  Each eigenvector's largest-magnitude component is
 * positive.
 */
struct PcaModel {
    Vector mean;
    Vector eigvals;
    Matrix eigvecs;
    double rank_tol = 1e-12;

    Index dim() const { return mean.size(); }
    Index rank() const { return eigvals.size(); }
};

/// nu x N whitened data: zero empirical mean, identity empirical covariance.
struct NormalizedData {
    Matrix eta;

    Index dim() const { return eta.rows(); }
    Index samples() const { return eta.cols(); }
};

inline constexpr double kDefaultRankTol = 1e-12;

/// Empirical mean and (N-1)-normalized covariance of the columns.
std::pair<Vector, Matrix> empirical_moments(const Matrix& columns);

PcaModel fit_pca(const DataMatrix& x, double rank_tol = kDefaultRankTol);
NormalizedData normalize(const DataMatrix& x, const PcaModel& pca);

/// Maps nu x K whitened columns back to x-space.  K may be zero.
Matrix denormalize(const Matrix& eta_samples, const PcaModel& pca);

} // namespace msamp

#endif
