#include "msamp/kde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace msamp {

namespace {

constexpr Index kColumnBlock = 256;
constexpr double kTruncationExponent = 20.0;

} // namespace

double silverman_bandwidth(Index nu, Index count) {
    if (nu < 1 || count < 1) {
        throw DataError("silverman_bandwidth needs nu >= 1 and N >= 1");
    }
    const double n = static_cast<double>(count);
    const double d = static_cast<double>(nu);
    return std::pow(4.0 / (n * (2.0 + d)), 1.0 / (d + 4.0));
}

double modified_bandwidth(double s, Index count) {
    const double n = static_cast<double>(count);
    return s / std::sqrt(s * s + (n - 1.0) / n);
}

KdeModel KdeModel::fit(const NormalizedData& eta, KdeOptions options) {
    if (eta.dim() < 1 || eta.samples() < 1) {
        throw DataError("kde fit needs a non-empty sample matrix");
    }
    if (!eta.eta.allFinite()) {
        throw DataError("kde fit: non-finite samples");
    }
    KdeModel model;
    model.s_ = silverman_bandwidth(eta.dim(), eta.samples());
    model.s_hat_ = msamp::modified_bandwidth(model.s_, eta.samples());
    model.centers_ = (model.s_hat_ / model.s_) * eta.eta;
    model.center_sq_norms_ = model.centers_.colwise().squaredNorm().transpose();
    model.options_ = options;
    return model;
}

double KdeModel::log_q(const Eigen::Ref<const Vector>& point) const {
    if (point.size() != dim()) {
        throw DataError("kde: point has dimension " + std::to_string(point.size()) +
                        ", model has " + std::to_string(dim()));
    }
    const double inv_two_var = 0.5 / (s_hat_ * s_hat_);
    Vector exponents(samples());
    for (Index j = 0; j < samples(); ++j) {
        exponents(j) = -(centers_.col(j) - point).squaredNorm() * inv_two_var;
    }
    const double top = exponents.maxCoeff();
    double sum = 0.0;
    for (Index j = 0; j < samples(); ++j) {
        const double e = exponents(j) - top;
        if (options_.truncate && e < -kTruncationExponent) {
            continue;
        }
        sum += std::exp(e);
    }
    return top + std::log(sum) - std::log(static_cast<double>(samples()));
}

double KdeModel::log_density(const Eigen::Ref<const Vector>& point) const {
    const double nu = static_cast<double>(dim());
    return log_q(point) - 0.5 * nu * std::log(2.0 * std::numbers::pi * s_hat_ * s_hat_);
}

Matrix KdeModel::potential_gradient(const Matrix& u) const {
    Matrix out;
    potential_gradient(u, out);
    return out;
}

void KdeModel::potential_gradient(const Matrix& u, Matrix& out) const {
    if (u.rows() != dim()) {
        throw DataError("potential_gradient: input has " + std::to_string(u.rows()) +
                        " rows, model dimension is " + std::to_string(dim()));
    }
    out.resize(u.rows(), u.cols());
    const Index columns = u.cols();
    const Index blocks = (columns + kColumnBlock - 1) / kColumnBlock;
    const double var = s_hat_ * s_hat_;
    const double inv_two_var = 0.5 / var;

#pragma omp parallel for schedule(static)
    for (Index blk = 0; blk < blocks; ++blk) {
        const Index first = blk * kColumnBlock;
        const Index width = std::min(kColumnBlock, columns - first);
        const auto u_block = u.middleCols(first, width);

        // Squared distances, centres along rows, block columns along columns.
        Matrix weights = -2.0 * (centers_.transpose() * u_block);
        weights.colwise() += center_sq_norms_;
        weights.rowwise() += u_block.colwise().squaredNorm();

        for (Index l = 0; l < width; ++l) {
            auto col = weights.col(l);
            const double nearest = col.minCoeff();
            for (Index j = 0; j < col.size(); ++j) {
                const double e = (col(j) - nearest) * inv_two_var;
                col(j) = (options_.truncate && e > kTruncationExponent) ? 0.0 : std::exp(-e);
            }
            col /= col.sum();
        }
        const Matrix weighted_mean = centers_ * weights;
        out.middleCols(first, width) = (weighted_mean - u_block) / var;
    }
}

KdeMoments KdeModel::analytic_moments() const {
    const double n = static_cast<double>(samples());
    KdeMoments moments;
    moments.mean = centers_.rowwise().mean();
    moments.second_moment = (centers_ * centers_.transpose()) / n;
    moments.second_moment.diagonal().array() += s_hat_ * s_hat_;
    return moments;
}

} // namespace msamp
