#ifndef MSAMP_KDE_HPP
#define MSAMP_KDE_HPP

#include "msamp/common.hpp"
#include "msamp/normalize.hpp"

namespace msamp {

/// Silverman bandwidth for unit-variance components: (4 / (N (2 + nu)))^{1/(nu+4)}.
double silverman_bandwidth(Index nu, Index count);

/// Shrunken bandwidth s / sqrt(s^2 + (N-1)/N), which makes the mixture's
/// second moment equal to the empirical one.
double modified_bandwidth(double s, Index count);

struct KdeOptions {
    /// Drop kernel terms whose exponent is more than 20 below the column's
    /// largest (squared distance more than 40 s_hat^2 beyond the nearest).
    bool truncate = false;
};

struct KdeMoments {
    Vector mean;
    Matrix second_moment; ///< E[eta eta^T], not centred
};

/**
 * Gaussian mixture with N equal-weight components of width s_hat centred at
 * (s_hat / s) * eta_j.
 *
 * Immutable after fit.  potential_gradient() evaluates every column
 * independently and is safe to call concurrently.
 */
class KdeModel {
public:
    static KdeModel fit(const NormalizedData& eta, KdeOptions options = {});

    Index dim() const { return centers_.rows(); }
    Index samples() const { return centers_.cols(); }
    double bandwidth() const { return s_; }
    double modified_bandwidth() const { return s_hat_; }
    const Matrix& centers() const { return centers_; }
    const KdeOptions& options() const { return options_; }

    /// log p_H(point), evaluated with log-sum-exp.
    double log_density(const Eigen::Ref<const Vector>& point) const;

    /// log q(point), the unnormalized kernel sum driving the dynamics.
    double log_q(const Eigen::Ref<const Vector>& point) const;

    /**
     * Column l of the result is grad log q(u_l).
     *
     * Computed as a softmax-weighted mean of the centres, so the ratio
     * grad q / q never under- or overflows.
     */
    Matrix potential_gradient(const Matrix& u) const;
    void potential_gradient(const Matrix& u, Matrix& out) const;

    KdeMoments analytic_moments() const;

private:
    KdeModel() = default;

    double s_ = 0.0;
    double s_hat_ = 0.0;
    Matrix centers_;
    Vector center_sq_norms_;
    KdeOptions options_;
};

} // namespace msamp

#endif
