#include "msamp/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "msamp/rng.hpp"

namespace msamp {

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.rows() < 1) {
        throw DataError("data matrix needs at least one feature");
    }
    if (values_.cols() < 2) {
        throw DataError("data matrix needs at least two samples, got " +
                        std::to_string(values_.cols()));
    }
    if (!values_.allFinite()) {
        throw DataError("data matrix contains non-finite entries");
    }
}

Layout parse_layout(const std::string& name) {
    if (name == "rows" || name == "rows-are-samples") {
        return Layout::RowsAreSamples;
    }
    if (name == "columns" || name == "columns-are-samples") {
        return Layout::ColumnsAreSamples;
    }
    throw DataError("unknown layout '" + name + "' (expected rows or columns)");
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return cells;
}

bool parse_double(std::string_view cell, double& value) {
    if (!cell.empty() && cell.front() == '+') {
        cell.remove_prefix(1);
    }
    if (cell.empty()) {
        return false;
    }
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(value);
}

} // namespace

DataMatrix parse_csv(std::istream& in, Layout layout, const std::string& source) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool first_content_line = true;
    std::string header_error;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view view = trim(line);
        if (view.empty()) {
            continue;
        }
        const auto cells = split(view);
        std::vector<double> row(cells.size());
        std::size_t bad = cells.size();
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (!parse_double(cells[c], row[c])) {
                bad = c;
                break;
            }
        }
        if (bad != cells.size()) {
            const std::string message = source + ": unparseable cell '" +
                                        std::string(cells[bad]) + "' at row " +
                                        std::to_string(line_no) + ", column " +
                                        std::to_string(bad + 1);
            if (first_content_line) {
                first_content_line = false; // header
                header_error = message;
                continue;
            }
            throw DataError(message);
        }
        first_content_line = false;
        if (rows.empty()) {
            width = row.size();
        } else if (row.size() != width) {
            throw DataError(source + ": ragged row " + std::to_string(line_no) + " has " +
                            std::to_string(row.size()) + " cells, expected " +
                            std::to_string(width));
        }
        rows.push_back(std::move(row));
    }
    if (in.bad()) {
        throw DataError(source + ": read failure");
    }
    if (rows.empty()) {
        throw DataError(header_error.empty() ? source + ": no numeric rows" : header_error);
    }
    const Index r = static_cast<Index>(rows.size());
    const Index c = static_cast<Index>(width);
    Matrix values(layout == Layout::RowsAreSamples ? c : r,
                  layout == Layout::RowsAreSamples ? r : c);
    for (Index i = 0; i < r; ++i) {
        for (Index j = 0; j < c; ++j) {
            if (layout == Layout::RowsAreSamples) {
                values(j, i) = rows[i][j];
            } else {
                values(i, j) = rows[i][j];
            }
        }
    }
    if (values.cols() < 2) {
        throw DataError(source + ": need at least 2 samples, found " +
                        std::to_string(values.cols()));
    }
    return DataMatrix(std::move(values));
}

DataMatrix load_csv(const std::filesystem::path& path, Layout layout) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "' for reading");
    }
    return parse_csv(in, layout, path.string());
}

void write_csv(std::ostream& out, const Matrix& m, Layout layout,
               const std::vector<std::string>& header) {
    if (!header.empty()) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            out << (i ? "," : "") << header[i];
        }
        out << '\n';
    }
    const Index out_rows = layout == Layout::RowsAreSamples ? m.cols() : m.rows();
    const Index out_cols = layout == Layout::RowsAreSamples ? m.rows() : m.cols();
    char buffer[32];
    for (Index i = 0; i < out_rows; ++i) {
        for (Index j = 0; j < out_cols; ++j) {
            const double v = layout == Layout::RowsAreSamples ? m(j, i) : m(i, j);
            std::snprintf(buffer, sizeof buffer, "%.17g", v);
            if (j) {
                out << ',';
            }
            out << buffer;
        }
        out << '\n';
    }
}

void save_csv(const std::filesystem::path& path, const Matrix& m, Layout layout,
              const std::vector<std::string>& header) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot open '" + path.string() + "' for writing");
    }
    write_csv(out, m, layout, header);
    if (!out) {
        throw DataError("write failure on '" + path.string() + "'");
    }
}

Matrix ScalingMap::apply(const Matrix& raw) const {
    if (raw.rows() != min.size()) {
        throw DataError("scaling map has " + std::to_string(min.size()) +
                        " features, data has " + std::to_string(raw.rows()));
    }
    Matrix out(raw.rows(), raw.cols());
    for (Index k = 0; k < raw.rows(); ++k) {
        const double range = max(k) - min(k);
        if (range > 0.0) {
            out.row(k) = ((raw.row(k).array() - min(k)) / range + eps_s).matrix();
        } else {
            out.row(k).setConstant(eps_s);
        }
    }
    return out;
}

Matrix ScalingMap::unscale(const Matrix& scaled) const {
    if (scaled.rows() != min.size()) {
        throw DataError("scaling map has " + std::to_string(min.size()) +
                        " features, data has " + std::to_string(scaled.rows()));
    }
    Matrix out(scaled.rows(), scaled.cols());
    for (Index k = 0; k < scaled.rows(); ++k) {
        const double range = max(k) - min(k);
        if (range > 0.0) {
            out.row(k) = ((scaled.row(k).array() - eps_s) * range + min(k)).matrix();
        } else {
            out.row(k).setConstant(min(k));
        }
    }
    return out;
}

std::pair<DataMatrix, ScalingMap> scale(const DataMatrix& raw, double eps_s) {
    if (!(eps_s > 0.0)) {
        throw DataError("eps_s must be positive");
    }
    ScalingMap map;
    map.min = raw.values().rowwise().minCoeff();
    map.max = raw.values().rowwise().maxCoeff();
    map.eps_s = eps_s;
    return {DataMatrix(map.apply(raw.values())), map};
}

DataMatrix synth_circles(Index count, std::array<double, 2> radii, double noise_sigma,
                         std::uint64_t seed) {
    if (count < 4 || count % 2 != 0) {
        throw DataError("synth_circles needs an even count >= 4");
    }
    if (!(radii[0] > 0.0 && radii[1] > 0.0) || noise_sigma < 0.0) {
        throw DataError("synth_circles needs positive radii and non-negative noise");
    }
    const CounterStream angles(seed, StreamPurpose::Synthetic, 0);
    const CounterStream noise(seed, StreamPurpose::Synthetic, 1);
    Matrix x(2, count);
    const Index half = count / 2;
    for (Index j = 0; j < count; ++j) {
        const double r = radii[j < half ? 0 : 1];
        const double theta = 2.0 * std::numbers::pi * angles.uniform(0, j);
        const double rho = r + noise_sigma * noise.normal(0, j);
        x(0, j) = rho * std::cos(theta);
        x(1, j) = rho * std::sin(theta);
    }
    return DataMatrix(std::move(x));
}

DataMatrix synth_helix(Index count, double noise_sigma, std::uint64_t seed, HelixShape shape) {
    if (count < 2 || noise_sigma < 0.0) {
        throw DataError("synth_helix needs count >= 2 and non-negative noise");
    }
    const CounterStream param(seed, StreamPurpose::Synthetic, 0);
    const CounterStream noise(seed, StreamPurpose::Synthetic, 1);
    Matrix x(3, count);
    for (Index j = 0; j < count; ++j) {
        const double t = shape.t_min + (shape.t_max - shape.t_min) * param.uniform(0, j);
        x(0, j) = std::cos(t) + noise_sigma * noise.normal(0, 3 * j);
        x(1, j) = std::sin(t) + noise_sigma * noise.normal(0, 3 * j + 1);
        x(2, j) = shape.pitch * t + noise_sigma * noise.normal(0, 3 * j + 2);
    }
    return DataMatrix(std::move(x));
}

DataMatrix synth_composite35(Index count, double noise_sigma, std::uint64_t seed) {
    if (count < 2 || noise_sigma < 0.0) {
        throw DataError("synth_composite35 needs count >= 2 and non-negative noise");
    }
    constexpr Index kBase = 32;
    constexpr Index kLatent = 3;
    const CounterStream latent_rng(seed, StreamPurpose::Synthetic, 0);
    const CounterStream noise_rng(seed, StreamPurpose::Synthetic, 1);
    // Fixed feature map, independent of the sample seed.
    const CounterStream map_rng(0x5eed5eedULL, StreamPurpose::Synthetic, 2);

    Matrix freq(kBase, kLatent);
    Vector phase(kBase), amplitude(kBase), offset(kBase);
    for (Index k = 0; k < kBase; ++k) {
        for (Index l = 0; l < kLatent; ++l) {
            freq(k, l) = 2.0 * map_rng.uniform(0, k * kLatent + l) - 1.0;
        }
        phase(k) = 2.0 * std::numbers::pi * map_rng.uniform(1, k);
        amplitude(k) = std::pow(10.0, static_cast<double>(k % 5) - 2.0);
        offset(k) = 10.0 * map_rng.uniform(2, k);
    }

    Matrix x(35, count);
    for (Index j = 0; j < count; ++j) {
        Eigen::Vector3d t;
        for (Index l = 0; l < kLatent; ++l) {
            t(l) = latent_rng.uniform(0, j * kLatent + l);
        }
        for (Index k = 0; k < kBase; ++k) {
            const double arg = std::numbers::pi * freq.row(k).dot(t) + phase(k);
            const double quad = t(k % kLatent) * t((k + 1) % kLatent);
            const double clean = std::sin(arg) + 0.5 * quad;
            x(k, j) = offset(k) +
                      amplitude(k) * (clean + noise_sigma * noise_rng.normal(0, j * kBase + k));
        }
        // Strictly positive feature.
        x(15, j) = std::exp(x(15, j) - offset(15));
        x(32, j) = x(0, j) + x(1, j);
        x(33, j) = x(2, j) - x(5, j);
        x(34, j) = 2.0 * x(7, j) + x(10, j);
    }
    return DataMatrix(std::move(x));
}

} // namespace msamp
