#include "msamp/persist.hpp"

#include <fstream>

namespace msamp {

namespace {

Json vector_json(const Vector& v) {
    return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector vector_from(const Json& doc, const char* field) {
    if (!doc.contains(field) || !doc.at(field).is_array()) {
        throw DataError(std::string("missing array field '") + field + "'");
    }
    const auto values = doc.at(field).get<std::vector<double>>();
    return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

// Row-major nested arrays.
Json matrix_json(const Matrix& m) {
    Json rows = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(m.cols()));
        for (Index j = 0; j < m.cols(); ++j) {
            row[static_cast<std::size_t>(j)] = m(i, j);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from(const Json& doc, const char* field, Index rows, Index cols) {
    const Json& arr = doc.at(field);
    if (!arr.is_array() || static_cast<Index>(arr.size()) != rows) {
        throw DataError(std::string("field '") + field + "' has the wrong number of rows");
    }
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const auto row = arr.at(static_cast<std::size_t>(i)).get<std::vector<double>>();
        if (static_cast<Index>(row.size()) != cols) {
            throw DataError(std::string("field '") + field + "' has a ragged row");
        }
        for (Index j = 0; j < cols; ++j) {
            m(i, j) = row[static_cast<std::size_t>(j)];
        }
    }
    return m;
}

void check_version(const Json& doc, const char* kind) {
    if (!doc.contains("kind") || doc.at("kind") != kind) {
        throw DataError(std::string("document is not a ") + kind);
    }
    if (!doc.contains("version") || doc.at("version").get<int>() != kFormatVersion) {
        throw DataError(std::string("unsupported ") + kind + " version");
    }
}

Json quantiles_json(const Quantiles& q) {
    return {{"q50", q.q50}, {"q90", q.q90}, {"q95", q.q95}, {"q99", q.q99}, {"max", q.max}};
}

Json moments_json(const MomentDiscrepancy& d) {
    return {{"mean_max_abs", d.mean_max_abs},
            {"cov_max_abs", d.cov_max_abs},
            {"cov_rel_frobenius", d.cov_rel_frobenius}};
}

} // namespace

Json to_json(const ScalingMap& map) {
    return {{"kind", "scaling_map"},   {"version", kFormatVersion}, {"n", map.min.size()},
            {"min", vector_json(map.min)}, {"max", vector_json(map.max)}, {"eps_s", map.eps_s}};
}

ScalingMap scaling_from_json(const Json& doc) {
    try {
        check_version(doc, "scaling_map");
        ScalingMap map;
        map.min = vector_from(doc, "min");
        map.max = vector_from(doc, "max");
        map.eps_s = doc.at("eps_s").get<double>();
        if (map.min.size() != map.max.size() || !(map.eps_s > 0.0)) {
            throw DataError("inconsistent scaling map");
        }
        return map;
    } catch (const Json::exception& e) {
        throw DataError(std::string("malformed scaling map: ") + e.what());
    }
}

Json to_json(const PcaModel& model) {
    return {{"kind", "pca_model"},
            {"version", kFormatVersion},
            {"n", model.dim()},
            {"nu", model.rank()},
            {"rank_tol", model.rank_tol},
            {"mean", vector_json(model.mean)},
            {"eigvals", vector_json(model.eigvals)},
            {"eigvecs", matrix_json(model.eigvecs)}};
}

PcaModel pca_from_json(const Json& doc) {
    try {
        check_version(doc, "pca_model");
        PcaModel model;
        const Index n = doc.at("n").get<Index>();
        const Index nu = doc.at("nu").get<Index>();
        model.rank_tol = doc.at("rank_tol").get<double>();
        model.mean = vector_from(doc, "mean");
        model.eigvals = vector_from(doc, "eigvals");
        if (model.mean.size() != n || model.eigvals.size() != nu || nu < 1 || nu > n) {
            throw DataError("inconsistent pca model dimensions");
        }
        model.eigvecs = matrix_from(doc, "eigvecs", n, nu);
        return model;
    } catch (const Json::exception& e) {
        throw DataError(std::string("malformed pca model: ") + e.what());
    }
}

Json basis_metadata(const DiffusionBasis& basis) {
    return {{"kind", "diffusion_basis"},      {"version", kFormatVersion},
            {"epsilon", basis.epsilon()},     {"kappa", basis.kappa()},
            {"m", basis.size()},              {"N", basis.samples()},
            {"lambda", vector_json(basis.lambda())}};
}

void save_basis_bundle(const std::filesystem::path& prefix, const DiffusionBasis& basis) {
    const std::string stem = prefix.string();
    save_json(stem + ".json", basis_metadata(basis));
    save_csv(stem + "_g.csv", basis.g(), Layout::ColumnsAreSamples);
    save_csv(stem + "_a.csv", basis.a(), Layout::ColumnsAreSamples);
}

Json to_json(const ReductionDiagnostics& diag) {
    Json doc = {{"kind", "reduction_diagnostics"},
                {"version", kFormatVersion},
                {"tol", diag.tol},
                {"gap_index", diag.gap_index},
                {"m_values", diag.m_values},
                {"e_red", diag.e_red},
                {"eigenvalues", vector_json(diag.eigenvalues)}};
    doc["m_selected"] = diag.m_selected ? Json(*diag.m_selected) : Json(nullptr);
    return doc;
}

Json to_json(const PipelineReport& r) {
    Json doc = {{"kind", "pipeline_report"},
                {"version", kFormatVersion},
                {"n", r.features},
                {"N", r.samples},
                {"nu", r.nu},
                {"reduced", r.reduced},
                {"scaled", r.scaled},
                {"m_used", r.m_used},
                {"gap_index", r.gap_index},
                {"e_red_curve", {{"m", r.e_red_m}, {"e_red", r.e_red_values}}},
                {"eigenvalues", vector_json(r.eigenvalues)},
                {"bandwidths", {{"s", r.s}, {"s_hat", r.s_hat}}},
                {"isde",
                 {{"f0", r.isde.f0},
                  {"fac", r.isde.fac},
                  {"delta_r", r.isde.delta_r},
                  {"m0", r.isde.m0},
                  {"min_m0", r.min_m0},
                  {"n_mc", r.isde.n_mc},
                  {"M", r.isde.total_steps()},
                  {"seed", r.isde.seed}}},
                {"counts",
                 {{"N", r.samples}, {"n_mc", r.isde.n_mc}, {"total_generated", r.total_generated}}},
                {"warnings", r.warnings}};
    doc["m_selected"] = r.m_selected ? Json(*r.m_selected) : Json(nullptr);
    doc["e_red_used"] = r.e_red_used ? Json(*r.e_red_used) : Json(nullptr);
    Json diag = Json::object();
    if (r.eta_moments) {
        diag["eta_vs_identity"] = moments_json(*r.eta_moments);
    }
    if (r.x_moments) {
        diag["x_vs_given"] = moments_json(*r.x_moments);
    }
    doc["diagnostics"] = diag;
    return doc;
}

Json to_json(const ConcentrationStats& stats) {
    Json doc = {{"kind", "concentration_stats"},
                {"version", kFormatVersion},
                {"nearest_given", quantiles_json(stats.nearest_given)},
                {"moments", moments_json(stats.moments)}};
    if (stats.manifold_given) {
        doc["manifold_given"] = quantiles_json(*stats.manifold_given);
    }
    if (stats.manifold_generated) {
        doc["manifold_generated"] = quantiles_json(*stats.manifold_generated);
    }
    return doc;
}

Json run_manifest(const PipelineOptions& o, const std::string& input, Index features,
                  Index samples) {
    // Keys mirror the CLI flag names so a manifest can be passed back via --config.
    Json doc = {{"kind", "run_manifest"},
                {"version", kFormatVersion},
                {"library_version", kLibraryVersion},
                {"input", input},
                {"input_shape", {{"n", features}, {"N", samples}}},
                {"scale", o.scale},
                {"eps-s", o.eps_s},
                {"rank-tol", o.rank_tol},
                {"epsilon", o.epsilon},
                {"kappa", o.kappa},
                {"tol", o.tol},
                {"m-max", o.m_max},
                {"reduced", o.reduced},
                {"f0", o.f0},
                {"fac", o.fac},
                {"m0", o.m0},
                {"nmc", o.n_mc},
                {"seed", o.seed},
                {"kde-truncate", o.kde.truncate}};
    if (o.m) {
        doc["m"] = *o.m;
    }
    if (o.delta_r) {
        doc["delta-r"] = *o.delta_r;
    }
    return doc;
}

void save_json(const std::filesystem::path& path, const Json& doc) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot open '" + path.string() + "' for writing");
    }
    out << doc.dump(2) << '\n';
    if (!out) {
        throw DataError("write failure on '" + path.string() + "'");
    }
}

Json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "' for reading");
    }
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw DataError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

} // namespace msamp
