#ifndef MSAMP_DIFFMAPS_HPP
#define MSAMP_DIFFMAPS_HPP

#include "msamp/common.hpp"
#include "msamp/normalize.hpp"

namespace msamp {

/// Eigenvalues below this are treated as numerically zero when kappa > 0.
inline constexpr double kMinBasisEigenvalue = 1e-14;

/// Gaussian kernel matrix K_ij = exp(-|eta_i - eta_j|^2 / (4 epsilon)).
Matrix kernel_matrix(const Matrix& eta, double epsilon);

/// Row-stochastic transition matrix b^{-1} K.
Matrix transition_matrix(const Matrix& eta, double epsilon);

/**
 * Leading eigenpairs of the symmetrised transition matrix
 * b^{-1/2} K b^{-1/2}, in descending eigenvalue order.
 *
 * psi holds the right eigenvectors of the transition matrix, b^{-1/2} phi,
 * so that psi^T diag(b) psi = I.
 */
struct SpectralDecomposition {
    double epsilon = 0.0;
    Vector lambda;
    Matrix psi;
    Vector b_diag;

    Index count() const { return lambda.size(); }
};

SpectralDecomposition decompose(const NormalizedData& eta, double epsilon, Index count);

/**
 * Reduced basis g (N x m) and its pseudo-inverse factor a = g (g^T g)^{-1}.
 *
 * Only span(g) matters to the sampler: the projector a g^T is unchanged by
 * kappa or any rescaling of g's columns.
 */
class DiffusionBasis {
public:
    /// g^alpha = lambda_alpha^kappa psi^alpha over the first m eigenpairs.
    static DiffusionBasis from_spectrum(const SpectralDecomposition& spectrum, int kappa, Index m);

    /// Arbitrary full-column-rank basis (used for invariance checks).
    static DiffusionBasis from_vectors(Matrix g, Vector lambda = {}, double epsilon = 0.0,
                                       int kappa = 0);

    double epsilon() const { return epsilon_; }
    int kappa() const { return kappa_; }
    Index size() const { return g_.cols(); }
    Index samples() const { return g_.rows(); }
    const Vector& lambda() const { return lambda_; }
    const Matrix& g() const { return g_; }
    const Matrix& a() const { return a_; }
    const Vector& b_diag() const { return b_diag_; }

    /// a g^T, N x N.
    Matrix projector() const { return a_ * g_.transpose(); }

private:
    DiffusionBasis() = default;

    double epsilon_ = 0.0;
    int kappa_ = 0;
    Vector lambda_;
    Matrix g_;
    Matrix a_;
    Vector b_diag_;
};

DiffusionBasis build_basis(const NormalizedData& eta, double epsilon, int kappa, Index m);

/// Leading m_max eigenvalues of the transition matrix, descending.
Vector spectrum(const NormalizedData& eta, double epsilon, Index m_max);

/// Reduced coordinates z = eta a  (nu x m).
Matrix project(const Matrix& eta_like, const DiffusionBasis& basis);

/// Median of pairwise squared distances; a starting point for epsilon only.
double median_pairwise_sq_distance(const Matrix& eta);

/// Eigengap heuristic: alpha >= 2 maximising lambda_alpha - lambda_{alpha+1},
/// or 0 if no positive drop exists.
Index spectral_gap_index(const Vector& lambda);

} // namespace msamp

#endif
