#ifndef MSAMP_SAMPLER_HPP
#define MSAMP_SAMPLER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "msamp/common.hpp"
#include "msamp/dataio.hpp"
#include "msamp/isde.hpp"
#include "msamp/kde.hpp"
#include "msamp/normalize.hpp"
#include "msamp/reduction.hpp"

namespace msamp {

/// Everything needed to reproduce a pipeline run.
struct PipelineOptions {
    bool scale = false;
    double eps_s = kDefaultEpsS;
    double rank_tol = kDefaultRankTol;

    double epsilon = 0.0; ///< required, no default
    int kappa = 1;
    std::optional<Index> m; ///< fixed basis size; otherwise chosen by select_m
    double tol = kDefaultReductionTol;
    Index m_max = 100; ///< clipped to N

    bool reduced = true;
    double f0 = kDefaultF0;
    double fac = kDefaultFac;
    std::optional<double> delta_r; ///< overrides 2 pi s_hat / fac
    Index m0 = kDefaultM0;
    Index n_mc = 40;
    std::uint64_t seed = 0;

    KdeOptions kde;

    void validate() const;
};

struct MomentDiscrepancy {
    double mean_max_abs = 0.0;  ///< max |mean_gen - mean_ref|
    double cov_max_abs = 0.0;   ///< max |cov_gen - cov_ref| entrywise
    double cov_rel_frobenius = 0.0;
};

struct PipelineReport {
    Index features = 0;   ///< n
    Index samples = 0;    ///< N
    Index nu = 0;
    bool reduced = true;
    bool scaled = false;
    std::optional<Index> m_selected; ///< from the e_red sweep, when run
    Index m_used = 0;                ///< basis size integrated (N for full order)
    Index gap_index = 0;
    std::optional<double> e_red_used;
    std::vector<Index> e_red_m;
    std::vector<double> e_red_values;
    Vector eigenvalues;
    double s = 0.0;
    double s_hat = 0.0;
    IsdeRunConfig isde;
    Index min_m0 = 0;
    Index total_generated = 0;
    std::optional<MomentDiscrepancy> eta_moments; ///< generated eta vs (0, I)
    std::optional<MomentDiscrepancy> x_moments;   ///< generated x vs given x
    std::vector<std::string> warnings;
};

struct GenerateResult {
    Matrix samples;     ///< n x (n_mc N), in the units of the input data
    Matrix eta_samples; ///< nu x (n_mc N), before denormalization
    PipelineReport report;
};

/**
 * scale -> normalize -> KDE -> basis -> select m -> integrate -> denormalize.
 * Errors carry the failing stage's name as a prefix.
 */
GenerateResult generate(const DataMatrix& x, const PipelineOptions& options);

MomentDiscrepancy moment_discrepancy(const Matrix& samples, const Vector& ref_mean,
                                     const Matrix& ref_cov);

// ---------------------------------------------------------------------------
// Diagnostics

struct Quantiles {
    double q50 = 0.0;
    double q90 = 0.0;
    double q95 = 0.0;
    double q99 = 0.0;
    double max = 0.0;
};

/// Linear-interpolation quantiles (type 7) of a non-empty sample.
Quantiles quantiles(std::vector<double> values);
double quantile(std::vector<double> values, double p);

/// Concentric circles with a common centre.
struct CirclesDescriptor {
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    std::vector<double> radii;
};

struct HelixDescriptor {
    HelixShape shape;
};

using ManifoldDescriptor = std::variant<CirclesDescriptor, HelixDescriptor>;

/// Exact Euclidean distance from each column to the curve.
Vector distance_to_manifold(const Matrix& points, const ManifoldDescriptor& manifold);

/// Distance from each column of query to its nearest column of reference.
Vector nearest_neighbor_distances(const Matrix& query, const Matrix& reference);

struct ConcentrationStats {
    Quantiles nearest_given;                 ///< generated -> nearest given point
    std::optional<Quantiles> manifold_given; ///< given -> analytic curve
    std::optional<Quantiles> manifold_generated;
    MomentDiscrepancy moments; ///< generated vs given
};

ConcentrationStats concentration_stats(const Matrix& given, const Matrix& generated,
                                       const std::optional<ManifoldDescriptor>& reference = {});

struct Grid {
    double lo = 0.0;
    double hi = 1.0;
    Index count = 101;
};

struct Curve {
    Vector x;
    Vector pdf;
};

/// Silverman bandwidth for a 1-D Gaussian KDE: (4 / (3 n))^{1/5} sigma.
double silverman_1d(const Vector& values);

/// 1-D Gaussian KDE of one component over an evenly spaced grid.
Curve marginal_pdf(const Matrix& samples, Index component, const Grid& grid);

} // namespace msamp

#endif
