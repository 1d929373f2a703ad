#include "msamp/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "msamp/diffmaps.hpp"

namespace msamp {

namespace {

template <class F>
auto stage(const char* name, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const NumericError& e) {
        throw NumericError(std::string(name) + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(std::string(name) + ": " + e.what());
    }
}

Matrix concatenate(const std::vector<Matrix>& blocks, Index rows) {
    Index cols = 0;
    for (const auto& b : blocks) {
        cols += b.cols();
    }
    Matrix out(rows, cols);
    Index offset = 0;
    for (const auto& b : blocks) {
        out.middleCols(offset, b.cols()) = b;
        offset += b.cols();
    }
    return out;
}

} // namespace

void PipelineOptions::validate() const {
    if (!(epsilon > 0.0)) {
        throw DataError("epsilon must be given and positive");
    }
    if (kappa < 0) {
        throw DataError("kappa must be non-negative");
    }
    if (scale && !(eps_s > 0.0)) {
        throw DataError("eps_s must be positive");
    }
    if (m && *m < 2) {
        throw DataError("m must be at least 2");
    }
    if (!(tol > 0.0 && tol < 1.0)) {
        throw DataError("tol must lie in (0, 1)");
    }
    if (!(f0 > 0.0)) {
        throw DataError("f0 must be positive");
    }
    if (!delta_r && !(fac > 1.0)) {
        throw DataError("fac must exceed 1");
    }
    if (delta_r && !(*delta_r > 0.0)) {
        throw DataError("delta_r must be positive");
    }
    if (m0 < 1 || n_mc < 0) {
        throw DataError("m0 must be >= 1 and n_mc >= 0");
    }
}

MomentDiscrepancy moment_discrepancy(const Matrix& samples, const Vector& ref_mean,
                                     const Matrix& ref_cov) {
    if (samples.rows() != ref_mean.size()) {
        throw DataError("moment_discrepancy: dimension mismatch");
    }
    const auto [mean, cov] = empirical_moments(samples);
    MomentDiscrepancy d;
    d.mean_max_abs = (mean - ref_mean).cwiseAbs().maxCoeff();
    d.cov_max_abs = (cov - ref_cov).cwiseAbs().maxCoeff();
    const double ref_norm = ref_cov.norm();
    d.cov_rel_frobenius = ref_norm > 0.0 ? (cov - ref_cov).norm() / ref_norm
                                         : (cov - ref_cov).norm();
    return d;
}

GenerateResult generate(const DataMatrix& raw, const PipelineOptions& options) {
    stage("options", [&] { options.validate(); });

    GenerateResult result;
    PipelineReport& report = result.report;
    report.features = raw.features();
    report.samples = raw.samples();
    report.reduced = options.reduced;
    report.scaled = options.scale;

    std::optional<ScalingMap> scaling;
    const DataMatrix x = stage("scale", [&] {
        if (!options.scale) {
            return raw;
        }
        auto [scaled, map] = scale(raw, options.eps_s);
        scaling = map;
        return scaled;
    });

    const PcaModel pca = stage("normalize", [&] { return fit_pca(x, options.rank_tol); });
    const NormalizedData eta = stage("normalize", [&] { return normalize(x, pca); });
    report.nu = pca.rank();
    const Index count = x.samples();

    const KdeModel kde = stage("kde", [&] { return KdeModel::fit(eta, options.kde); });
    report.s = kde.bandwidth();
    report.s_hat = kde.modified_bandwidth();

    std::optional<DiffusionBasis> basis;
    if (options.reduced) {
        stage("basis", [&] {
            const Index m_max = options.m ? *options.m : std::min(options.m_max, count);
            if (m_max < 2 || m_max > count) {
                throw DataError("basis size must lie in [2, N]");
            }
            const SpectralDecomposition spectral = decompose(eta, options.epsilon, m_max);
            report.eigenvalues = spectral.lambda;
            report.gap_index = spectral_gap_index(spectral.lambda);
            Index m = m_max;
            if (!options.m) {
                const ReductionDiagnostics diag =
                    select_m(x, pca, eta, spectral, options.kappa, options.tol);
                report.e_red_m = diag.m_values;
                report.e_red_values = diag.e_red;
                report.m_selected = diag.m_selected;
                if (!diag.m_selected) {
                    throw NumericError("no m <= " + std::to_string(m_max) +
                                       " satisfies e_red <= " + std::to_string(options.tol) +
                                       "; raise m_max or tol");
                }
                m = *diag.m_selected;
            }
            basis = DiffusionBasis::from_spectrum(spectral, options.kappa, m);
            report.e_red_used = e_red(x, pca, eta, *basis);
        });
        report.m_used = basis->size();
    } else {
        report.m_used = count;
    }

    stage("isde", [&] {
        IsdeRunConfig config;
        config.f0 = options.f0;
        config.fac = options.fac;
        config.delta_r = options.delta_r ? *options.delta_r
                                         : derive_step(kde.modified_bandwidth(), options.fac);
        config.n_mc = options.n_mc;
        config.seed = options.seed;
        const double fac_equiv = 2.0 * std::numbers::pi * kde.modified_bandwidth() / config.delta_r;
        report.min_m0 = min_m0(options.f0, fac_equiv, kde.modified_bandwidth());
        config.m0 = options.m0;
        if (options.m0 < report.min_m0) {
            report.warnings.push_back("m0 = " + std::to_string(options.m0) +
                                      " is below the relaxation bound " +
                                      std::to_string(report.min_m0) + "; using " +
                                      std::to_string(report.min_m0));
            config.m0 = report.min_m0;
        }
        report.isde = config;

        BasisRef ref = IdentityBasis{};
        if (basis) {
            ref = std::cref(*basis);
        }
        const std::vector<Matrix> blocks = run(eta, kde, ref, config);
        result.eta_samples = concatenate(blocks, eta.dim());
    });

    stage("denormalize", [&] {
        Matrix generated = denormalize(result.eta_samples, pca);
        if (scaling) {
            generated = scaling->unscale(generated);
        }
        result.samples = std::move(generated);
    });
    report.total_generated = result.samples.cols();

    if (result.eta_samples.cols() >= 2) {
        report.eta_moments = moment_discrepancy(result.eta_samples, Vector::Zero(eta.dim()),
                                                Matrix::Identity(eta.dim(), eta.dim()));
        const auto [given_mean, given_cov] = empirical_moments(raw.values());
        report.x_moments = moment_discrepancy(result.samples, given_mean, given_cov);
    }
    return result;
}

// ---------------------------------------------------------------------------

double quantile(std::vector<double> values, double p) {
    if (values.empty()) {
        throw DataError("quantile of an empty sample");
    }
    std::sort(values.begin(), values.end());
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

Quantiles quantiles(std::vector<double> values) {
    if (values.empty()) {
        throw DataError("quantiles of an empty sample");
    }
    std::sort(values.begin(), values.end());
    auto at = [&](double p) {
        const double pos = p * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };
    return {at(0.5), at(0.9), at(0.95), at(0.99), values.back()};
}

namespace {

std::vector<double> to_std(const Vector& v) {
    return {v.data(), v.data() + v.size()};
}

double helix_distance(const Eigen::Vector3d& p, const HelixShape& shape) {
    auto sq = [&](double t) {
        const Eigen::Vector3d c(std::cos(t), std::sin(t), shape.pitch * t);
        return (p - c).squaredNorm();
    };
    constexpr int kGrid = 4000;
    const double step = (shape.t_max - shape.t_min) / kGrid;
    double best_t = shape.t_min;
    double best = sq(best_t);
    for (int i = 1; i <= kGrid; ++i) {
        const double t = shape.t_min + step * i;
        const double v = sq(t);
        if (v < best) {
            best = v;
            best_t = t;
        }
    }
    // Golden-section refinement inside the bracketing grid cells.
    double lo = std::max(shape.t_min, best_t - step);
    double hi = std::min(shape.t_max, best_t + step);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = sq(c), fd = sq(d);
    for (int it = 0; it < 80; ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = sq(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = sq(d);
        }
    }
    return std::sqrt(std::min({best, fc, fd}));
}

} // namespace

Vector distance_to_manifold(const Matrix& points, const ManifoldDescriptor& manifold) {
    Vector out(points.cols());
    if (const auto* circles = std::get_if<CirclesDescriptor>(&manifold)) {
        if (points.rows() != 2 || circles->radii.empty()) {
            throw DataError("circle descriptor needs 2-D points and at least one radius");
        }
        for (Index j = 0; j < points.cols(); ++j) {
            const double r = (points.col(j) - circles->center).norm();
            double best = std::numeric_limits<double>::infinity();
            for (double radius : circles->radii) {
                best = std::min(best, std::abs(r - radius));
            }
            out(j) = best;
        }
        return out;
    }
    const auto& helix = std::get<HelixDescriptor>(manifold);
    if (points.rows() != 3) {
        throw DataError("helix descriptor needs 3-D points");
    }
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < points.cols(); ++j) {
        out(j) = helix_distance(points.col(j), helix.shape);
    }
    return out;
}

Vector nearest_neighbor_distances(const Matrix& query, const Matrix& reference) {
    if (query.rows() != reference.rows()) {
        throw DataError("nearest_neighbor_distances: dimension mismatch");
    }
    if (reference.cols() == 0) {
        throw DataError("nearest_neighbor_distances: empty reference set");
    }
    Vector out(query.cols());
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < query.cols(); ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (Index i = 0; i < reference.cols(); ++i) {
            best = std::min(best, (query.col(j) - reference.col(i)).squaredNorm());
        }
        out(j) = std::sqrt(best);
    }
    return out;
}

ConcentrationStats concentration_stats(const Matrix& given, const Matrix& generated,
                                       const std::optional<ManifoldDescriptor>& reference) {
    if (given.rows() != generated.rows()) {
        throw DataError("concentration_stats: given has " + std::to_string(given.rows()) +
                        " features, generated has " + std::to_string(generated.rows()));
    }
    if (given.cols() < 2 || generated.cols() < 2) {
        throw DataError("concentration_stats needs at least two given and generated samples");
    }
    ConcentrationStats stats;
    stats.nearest_given = quantiles(to_std(nearest_neighbor_distances(generated, given)));
    if (reference) {
        stats.manifold_given = quantiles(to_std(distance_to_manifold(given, *reference)));
        stats.manifold_generated = quantiles(to_std(distance_to_manifold(generated, *reference)));
    }
    const auto [mean, cov] = empirical_moments(given);
    stats.moments = moment_discrepancy(generated, mean, cov);
    return stats;
}

double silverman_1d(const Vector& values) {
    const Index n = values.size();
    if (n == 0) {
        throw DataError("bandwidth of an empty sample");
    }
    const double mean = values.mean();
    double sigma = n > 1 ? std::sqrt((values.array() - mean).square().sum() / (n - 1)) : 0.0;
    if (!(sigma > 0.0)) {
        // Degenerate sample: a narrow bump relative to the value's magnitude.
        sigma = 1e-3 * std::max(1.0, std::abs(mean));
    }
    return std::pow(4.0 / (3.0 * static_cast<double>(n)), 0.2) * sigma;
}

Curve marginal_pdf(const Matrix& samples, Index component, const Grid& grid) {
    if (component < 0 || component >= samples.rows()) {
        throw DataError("component index " + std::to_string(component) + " out of range");
    }
    if (samples.cols() == 0) {
        throw DataError("marginal_pdf of an empty sample");
    }
    if (grid.count < 2 || !(grid.hi > grid.lo)) {
        throw DataError("grid needs count >= 2 and hi > lo");
    }
    const Vector values = samples.row(component).transpose();
    const double h = silverman_1d(values);
    const double norm = 1.0 / (static_cast<double>(values.size()) * h *
                               std::sqrt(2.0 * std::numbers::pi));
    Curve curve;
    curve.x = Vector::LinSpaced(grid.count, grid.lo, grid.hi);
    curve.pdf.resize(grid.count);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < grid.count; ++i) {
        const double x = curve.x(i);
        double sum = 0.0;
        for (Index j = 0; j < values.size(); ++j) {
            const double z = (x - values(j)) / h;
            sum += std::exp(-0.5 * z * z);
        }
        curve.pdf(i) = norm * sum;
    }
    return curve;
}

} // namespace msamp
