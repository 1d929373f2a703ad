#ifndef MSAMP_REDUCTION_HPP
#define MSAMP_REDUCTION_HPP

#include <optional>
#include <vector>

#include "msamp/common.hpp"
#include "msamp/dataio.hpp"
#include "msamp/diffmaps.hpp"
#include "msamp/normalize.hpp"

namespace msamp {

inline constexpr double kDefaultReductionTol = 1e-3;

/**
 * Relative covariance error of the data reconstructed through the basis:
 * ||cov(x_red) - cov(x)||_F / ||cov(x)||_F with
 * x_red = mean + phi mu^{1/2} eta a g^T.
 */
double e_red(const DataMatrix& x, const PcaModel& pca, const NormalizedData& eta,
             const DiffusionBasis& basis);

/// Candidate m values: 2..min(30, m_max), then every 5th up to m_max
/// (m_max itself always included).
std::vector<Index> sweep_schedule(Index m_max);

struct ReductionDiagnostics {
    std::vector<Index> m_values;
    std::vector<double> e_red;
    std::optional<Index> m_selected; ///< smallest m with e_red(m) <= tol
    double tol = kDefaultReductionTol;
    Index gap_index = 0;             ///< eigenvalue-gap suggestion
    Vector eigenvalues;              ///< leading m_max eigenvalues
};

/**
 * Sweeps m with one eigendecomposition at m_max.  With kappa > 0 the sweep
 * stops before the first m whose basis would contain a numerically zero
 * eigenvalue.  An empty m_selected means no scheduled m met tol.
 */
ReductionDiagnostics select_m(const DataMatrix& x, const PcaModel& pca, const NormalizedData& eta,
                              double epsilon, int kappa, double tol, Index m_max);

/// Same sweep over a precomputed decomposition (m_max = spectral.count()).
ReductionDiagnostics select_m(const DataMatrix& x, const PcaModel& pca, const NormalizedData& eta,
                              const SpectralDecomposition& spectral, int kappa, double tol);

} // namespace msamp

#endif
