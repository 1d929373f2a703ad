#ifndef MSAMP_ISDE_HPP
#define MSAMP_ISDE_HPP

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "msamp/common.hpp"
#include "msamp/diffmaps.hpp"
#include "msamp/kde.hpp"
#include "msamp/normalize.hpp"

namespace msamp {

inline constexpr double kDefaultF0 = 1.5;
inline constexpr double kDefaultFac = 20.0;
inline constexpr Index kDefaultM0 = 110;

/// Integration step 2 pi s_hat / fac.
double derive_step(double s_hat, double fac);

/// Smallest integer strictly above 2 log(100) fac / (pi f0 s_hat), the
/// sampling interval that damps a transient to 1/100.
Index min_m0(double f0, double fac, double s_hat);

struct IsdeRunConfig {
    double f0 = kDefaultF0;
    double fac = kDefaultFac;
    double delta_r = 0.0;
    Index m0 = kDefaultM0;
    Index n_mc = 0;
    std::uint64_t seed = 0;
    std::uint32_t chain = 0;

    /// delta_r derived from s_hat and fac.
    static IsdeRunConfig derived(double s_hat, double f0, double fac, Index m0, Index n_mc,
                                 std::uint64_t seed);

    Index total_steps() const { return n_mc * m0; }
    void validate() const;
};

/// Position z and velocity y, both nu x m (nu x N for the full-order system).
struct IsdeState {
    Matrix z;
    Matrix y;
    Index step_index = 0;
};

/// Marker for the full-order system (g = a = I_N).
struct IdentityBasis {};

using BasisRef = std::variant<IdentityBasis, std::reference_wrapper<const DiffusionBasis>>;

/// Writes grad log q for each column of u into out (same shape as u).
using DriftField = std::function<void(const Matrix& u, Matrix& out)>;

DriftField kde_drift(const KdeModel& kde);

/**
 * One Stormer-Verlet step of the damped stochastic Hamiltonian system:
 *
 *   z_half = z + dr/2 y
 *   y'     = (1-b)/(1+b) y + dr/(1+b) L(z_half g^T) a + sqrt(f0)/(1+b) dW a
 *   z'     = z_half + dr/2 y'
 *
 * with b = f0 dr / 4.  noise is the full nu x N Wiener increment (variance
 * dr per entry) and is projected here.
 *
 * Throws NumericError if the new state is not finite.
 */
IsdeState verlet_step(const IsdeState& state, const DriftField& drift, const BasisRef& basis,
                      const IsdeRunConfig& config, const Matrix& noise);

IsdeState verlet_step(const IsdeState& state, const KdeModel& kde, const BasisRef& basis,
                      const IsdeRunConfig& config, const Matrix& noise);

/**
 * Integrates n_mc * m0 steps from z0 = eta a, y0 = N a (N standard normal)
 * and returns every m0-th position mapped back by g^T: n_mc matrices of
 * shape nu x N.  Noise comes from counter-based streams keyed by
 * (seed, chain, step), so equal configs give bitwise-equal output.
 */
std::vector<Matrix> run(const NormalizedData& eta, const KdeModel& kde, const BasisRef& basis,
                        const IsdeRunConfig& config);

/// Same, with an arbitrary drift field.
std::vector<Matrix> run(const NormalizedData& eta, const DriftField& drift, const BasisRef& basis,
                        const IsdeRunConfig& config);

/// Wiener increment for a given step: sqrt(dr) * N(0,1), nu x N.
Matrix wiener_increment(const IsdeRunConfig& config, Index nu, Index count, Index step);

} // namespace msamp

#endif
