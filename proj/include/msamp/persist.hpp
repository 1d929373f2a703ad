#ifndef MSAMP_PERSIST_HPP
#define MSAMP_PERSIST_HPP

#include <filesystem>
#include <string>

#include <json.hpp>

#include "msamp/dataio.hpp"
#include "msamp/diffmaps.hpp"
#include "msamp/normalize.hpp"
#include "msamp/reduction.hpp"
#include "msamp/sampler.hpp"

namespace msamp {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr int kFormatVersion = 1;

using Json = nlohmann::json;

Json to_json(const ScalingMap& map);
ScalingMap scaling_from_json(const Json& doc);

Json to_json(const PcaModel& model);
PcaModel pca_from_json(const Json& doc);

/// eps, kappa, m, lambda.  The matrices go to CSV via save_basis_bundle.
Json basis_metadata(const DiffusionBasis& basis);

/// Writes <prefix>.json, <prefix>_g.csv, <prefix>_a.csv.
void save_basis_bundle(const std::filesystem::path& prefix, const DiffusionBasis& basis);

Json to_json(const ReductionDiagnostics& diag);
Json to_json(const PipelineReport& report);
Json to_json(const ConcentrationStats& stats);

/// Inputs only: resolved options plus input identity and library version.
Json run_manifest(const PipelineOptions& options, const std::string& input, Index features,
                  Index samples);

void save_json(const std::filesystem::path& path, const Json& doc);
Json load_json(const std::filesystem::path& path);

} // namespace msamp

#endif
