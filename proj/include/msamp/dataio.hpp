#ifndef MSAMP_DATAIO_HPP
#define MSAMP_DATAIO_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "msamp/common.hpp"

namespace msamp {

/**
 * n x N sample matrix, one sample per column.
 *
 * Invariants: n >= 1, N >= 2, every entry finite.  Checked on construction.
 */
class DataMatrix {
public:
    explicit DataMatrix(Matrix values);

    const Matrix& values() const { return values_; }
    Index features() const { return values_.rows(); }
    Index samples() const { return values_.cols(); }

private:
    Matrix values_;
};

enum class Layout { RowsAreSamples, ColumnsAreSamples };

Layout parse_layout(const std::string& name);

/**
 * Min-max scaling of each feature to [eps_s, 1 + eps_s].
 *
 * A constant feature (max == min) maps every entry to eps_s; unscale then
 * restores the constant.
 */
struct ScalingMap {
    Vector min;
    Vector max;
    double eps_s = 1e-9;

    Matrix apply(const Matrix& raw) const;
    Matrix unscale(const Matrix& scaled) const;
};

inline constexpr double kDefaultEpsS = 1e-9;

DataMatrix load_csv(const std::filesystem::path& path, Layout layout);
DataMatrix parse_csv(std::istream& in, Layout layout, const std::string& source = "<stream>");

/// Writes 17 significant digits so doubles round-trip exactly.
void save_csv(const std::filesystem::path& path, const Matrix& columns_are_samples, Layout layout,
              const std::vector<std::string>& header = {});
void write_csv(std::ostream& out, const Matrix& columns_are_samples, Layout layout,
               const std::vector<std::string>& header = {});

std::pair<DataMatrix, ScalingMap> scale(const DataMatrix& raw, double eps_s = kDefaultEpsS);

/// Two concentric circles centred at the origin, N/2 points on each.
DataMatrix synth_circles(Index count, std::array<double, 2> radii, double noise_sigma,
                         std::uint64_t seed);

/// Helix parameters used by synth_helix and the helix distance descriptor.
struct HelixShape {
    double pitch = 0.25;     // c in (cos t, sin t, c t)
    double t_min = 0.0;
    double t_max = 12.566370614359172; // two full turns
};

DataMatrix synth_helix(Index count, double noise_sigma, std::uint64_t seed, HelixShape shape = {});

/**
 * Stand-in for a high-dimensional tabular database: 35 features driven by a
 * low-dimensional latent variable through smooth nonlinear maps, with three
 * exactly linearly-dependent features (so the covariance has rank 32) and
 * widely varying feature ranges (so min-max scaling matters).
 */
DataMatrix synth_composite35(Index count, double noise_sigma, std::uint64_t seed);

} // namespace msamp

#endif
