#include "msamp/reduction.hpp"

#include <algorithm>

namespace msamp {

namespace {

double relative_covariance_error(const Matrix& cov, const PcaModel& pca, const Matrix& eta_red) {
    const Matrix x_red = denormalize(eta_red, pca);
    const Matrix cov_red = empirical_moments(x_red).second;
    return (cov_red - cov).norm() / cov.norm();
}

} // namespace

double e_red(const DataMatrix& x, const PcaModel& pca, const NormalizedData& eta,
             const DiffusionBasis& basis) {
    if (x.features() != pca.dim() || eta.dim() != pca.rank() || x.samples() != eta.samples() ||
        basis.samples() != eta.samples()) {
        throw DataError("e_red: inconsistent dimensions between data, model, and basis");
    }
    const Matrix cov = empirical_moments(x.values()).second;
    const Matrix eta_red = (eta.eta * basis.a()) * basis.g().transpose();
    return relative_covariance_error(cov, pca, eta_red);
}

std::vector<Index> sweep_schedule(Index m_max) {
    std::vector<Index> out;
    const Index dense_end = std::min<Index>(30, m_max);
    for (Index m = 2; m <= dense_end; ++m) {
        out.push_back(m);
    }
    for (Index m = dense_end + 5; m < m_max; m += 5) {
        out.push_back(m);
    }
    if (out.empty() || out.back() != m_max) {
        if (m_max >= 2) {
            out.push_back(m_max);
        }
    }
    return out;
}

ReductionDiagnostics select_m(const DataMatrix& x, const PcaModel& pca, const NormalizedData& eta,
                              double epsilon, int kappa, double tol, Index m_max) {
    if (!(tol > 0.0 && tol < 1.0)) {
        throw DataError("select_m: tol must lie in (0, 1)");
    }
    if (m_max < 2 || m_max > eta.samples()) {
        throw DataError("select_m: m_max must lie in [2, N]");
    }
    return select_m(x, pca, eta, decompose(eta, epsilon, m_max), kappa, tol);
}

ReductionDiagnostics select_m(const DataMatrix& x, const PcaModel& pca, const NormalizedData& eta,
                              const SpectralDecomposition& spectral, int kappa, double tol) {
    if (!(tol > 0.0 && tol < 1.0)) {
        throw DataError("select_m: tol must lie in (0, 1)");
    }
    const Index m_max = spectral.count();
    if (m_max < 2 || spectral.psi.rows() != eta.samples() || x.samples() != eta.samples() ||
        x.features() != pca.dim() || eta.dim() != pca.rank()) {
        throw DataError("select_m: inconsistent dimensions between data, model, and spectrum");
    }
    const Matrix cov = empirical_moments(x.values()).second;

    ReductionDiagnostics diag;
    diag.tol = tol;
    diag.eigenvalues = spectral.lambda;
    diag.gap_index = spectral_gap_index(spectral.lambda);

    for (Index m : sweep_schedule(m_max)) {
        if (kappa > 0 && !(spectral.lambda(m - 1) > kMinBasisEigenvalue)) {
            break;
        }
        const DiffusionBasis basis = DiffusionBasis::from_spectrum(spectral, kappa, m);
        const Matrix eta_red = (eta.eta * basis.a()) * basis.g().transpose();
        const double err = relative_covariance_error(cov, pca, eta_red);
        diag.m_values.push_back(m);
        diag.e_red.push_back(err);
        if (!diag.m_selected && err <= tol) {
            diag.m_selected = m;
        }
    }
    return diag;
}

} // namespace msamp
