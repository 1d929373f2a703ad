// msamp command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 data or numeric error.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <omp.h>

#include "msamp/dataio.hpp"
#include "msamp/diffmaps.hpp"
#include "msamp/kde.hpp"
#include "msamp/normalize.hpp"
#include "msamp/persist.hpp"
#include "msamp/reduction.hpp"
#include "msamp/sampler.hpp"

namespace {

using namespace msamp;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string layout = "rows";
    int threads = 0;
};

struct Input {
    std::string path;
    bool scale = false;
    double eps_s = kDefaultEpsS;
    double rank_tol = kDefaultRankTol;
};

// Raw data plus its scaled and normalized forms.
struct Prepared {
    DataMatrix raw;
    DataMatrix x;
    std::optional<ScalingMap> scaling;
    PcaModel pca;
    NormalizedData eta;
};

Prepared prepare(const Input& in, Layout layout) {
    DataMatrix raw = load_csv(in.path, layout);
    std::optional<ScalingMap> scaling;
    DataMatrix x = raw;
    if (in.scale) {
        auto [scaled, map] = scale(raw, in.eps_s);
        x = std::move(scaled);
        scaling = map;
    }
    PcaModel pca = fit_pca(x, in.rank_tol);
    NormalizedData eta = normalize(x, pca);
    return {std::move(raw), std::move(x), std::move(scaling), std::move(pca), std::move(eta)};
}

std::vector<std::string> feature_header(Index n, const char* prefix) {
    std::vector<std::string> h;
    for (Index k = 0; k < n; ++k) {
        h.push_back(prefix + std::to_string(k + 1));
    }
    return h;
}

void emit_csv(const std::string& path, const Matrix& columns, Layout layout,
              const std::vector<std::string>& header) {
    if (path.empty() || path == "-") {
        write_csv(std::cout, columns, layout, header);
    } else {
        save_csv(path, columns, layout, header);
    }
}

void echo(const Json& resolved) {
    std::cerr << "resolved config: " << resolved.dump() << '\n';
}

void add_input_options(CLI::App* sub, Input& in, bool with_scaling) {
    sub->add_option("--input,-i", in.path, "Input CSV, one sample per row (see --layout)")
        ->required()
        ->check(CLI::ExistingFile);
    if (with_scaling) {
        sub->add_flag("--scale,!--no-scale", in.scale,
                      "Min-max scale each feature before whitening; use when feature ranges "
                      "differ by orders of magnitude")
            ->capture_default_str();
        sub->add_option("--eps-s", in.eps_s,
                        "Offset added after min-max scaling so no feature is exactly zero")
            ->capture_default_str();
    }
    sub->add_option("--rank-tol", in.rank_tol,
                    "Relative threshold below which covariance eigenvalues are dropped")
        ->capture_default_str();
}

// Adds JSON config values as arguments for every option the user did not set.
std::vector<std::string> config_arguments(CLI::App* sub, const Json& doc) {
    static const std::set<std::string> ignored = {"kind", "version", "library_version",
                                                  "input_shape"};
    static const std::map<std::string, std::string> negations = {{"scale", "--no-scale"},
                                                                 {"reduced", "--full"}};
    if (!doc.is_object()) {
        throw UsageError("config file must hold a JSON object");
    }
    std::vector<std::string> args;
    for (const auto& [key, value] : doc.items()) {
        if (ignored.count(key) || key == "config") {
            continue;
        }
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr && sub->get_parent() != nullptr) {
            opt = sub->get_parent()->get_option_no_throw("--" + key);
        }
        if (opt == nullptr) {
            throw UsageError("config key '" + key + "' is not a flag of '" + sub->get_name() + "'");
        }
        if (opt->count() > 0) {
            continue; // flags win
        }
        if (value.is_boolean()) {
            if (value.get<bool>()) {
                args.push_back("--" + key);
            } else if (const auto it = negations.find(key); it != negations.end()) {
                args.push_back(it->second);
            }
        } else if (value.is_string()) {
            args.push_back("--" + key);
            args.push_back(value.get<std::string>());
        } else if (value.is_number()) {
            args.push_back("--" + key);
            args.push_back(value.dump());
        } else if (!value.is_null()) {
            throw UsageError("config key '" + key + "' must be a scalar");
        }
    }
    return args;
}

// ---------------------------------------------------------------------------

int run_synth(const std::string& shape, Index count, double noise, std::uint64_t seed,
              const std::vector<double>& radii, const std::string& output, Layout layout) {
    DataMatrix data = [&] {
        if (shape == "circles") {
            if (radii.size() != 2) {
                throw UsageError("--radii needs exactly two values");
            }
            return synth_circles(count, {radii[0], radii[1]}, noise, seed);
        }
        if (shape == "helix") {
            return synth_helix(count, noise, seed);
        }
        return synth_composite35(count, noise, seed);
    }();
    echo({{"shape", shape}, {"count", count}, {"noise", noise}, {"seed", seed}, {"output", output}});
    emit_csv(output, data.values(), layout, feature_header(data.features(), "x"));
    return 0;
}

int run_scale(const Input& in, const std::string& output, const std::string& map_path,
              Layout layout) {
    const DataMatrix raw = load_csv(in.path, layout);
    const auto [scaled, map] = scale(raw, in.eps_s);
    echo({{"input", in.path}, {"eps-s", in.eps_s}, {"output", output}, {"map", map_path}});
    emit_csv(output, scaled.values(), layout, feature_header(raw.features(), "x"));
    if (!map_path.empty()) {
        save_json(map_path, to_json(map));
    }
    return 0;
}

int run_normalize(const Input& in, const std::string& output, const std::string& model_path,
                  Layout layout) {
    const Prepared p = prepare(in, layout);
    echo({{"input", in.path}, {"scale", in.scale}, {"rank-tol", in.rank_tol}, {"output", output}});
    std::cerr << "n = " << p.pca.dim() << ", nu = " << p.pca.rank() << ", N = " << p.x.samples()
              << '\n';
    emit_csv(output, p.eta.eta, layout, feature_header(p.pca.rank(), "eta"));
    if (!model_path.empty()) {
        Json doc = to_json(p.pca);
        if (p.scaling) {
            doc["scaling"] = to_json(*p.scaling);
        }
        save_json(model_path, doc);
    }
    return 0;
}

int run_spectrum(const Input& in, double epsilon, Index m_max, const std::string& output,
                 Layout layout) {
    if (!(epsilon > 0.0)) {
        throw UsageError("--epsilon is required and must be positive");
    }
    const Prepared p = prepare(in, layout);
    const Index count = std::min(m_max, p.eta.samples());
    echo({{"input", in.path}, {"scale", in.scale}, {"epsilon", epsilon}, {"m-max", count}});
    const Vector lambda = spectrum(p.eta, epsilon, count);
    std::cerr << "median pairwise squared distance (heuristic epsilon scale): "
              << median_pairwise_sq_distance(p.eta.eta) << '\n';
    std::cerr << "eigengap index: " << spectral_gap_index(lambda) << '\n';
    Matrix table(2, count);
    for (Index k = 0; k < count; ++k) {
        table(0, k) = static_cast<double>(k + 1);
        table(1, k) = lambda(k);
    }
    emit_csv(output, table, Layout::RowsAreSamples, {"alpha", "lambda"});
    return 0;
}

int run_select_m(const Input& in, double epsilon, int kappa, double tol, Index m_max,
                 const std::string& output, const std::string& report, Layout layout) {
    if (!(epsilon > 0.0)) {
        throw UsageError("--epsilon is required and must be positive");
    }
    const Prepared p = prepare(in, layout);
    const Index top = std::min(m_max, p.eta.samples());
    echo({{"input", in.path},
          {"scale", in.scale},
          {"epsilon", epsilon},
          {"kappa", kappa},
          {"tol", tol},
          {"m-max", top}});
    const ReductionDiagnostics diag = select_m(p.x, p.pca, p.eta, epsilon, kappa, tol, top);
    Matrix curve(2, static_cast<Index>(diag.m_values.size()));
    for (std::size_t i = 0; i < diag.m_values.size(); ++i) {
        curve(0, static_cast<Index>(i)) = static_cast<double>(diag.m_values[i]);
        curve(1, static_cast<Index>(i)) = diag.e_red[i];
    }
    if (!output.empty()) {
        save_csv(output, curve, Layout::RowsAreSamples, {"m", "e_red"});
    }
    if (!report.empty()) {
        save_json(report, to_json(diag));
    }
    std::cerr << "eigengap index: " << diag.gap_index << '\n';
    if (!diag.m_selected) {
        std::cout << "m=none\n";
        std::cerr << "no m <= " << top << " reaches e_red <= " << tol << '\n';
        return 2;
    }
    std::cout << "m=" << *diag.m_selected << '\n';
    return 0;
}

int run_sample(const std::string& input, PipelineOptions options, std::optional<double> delta_r,
               std::optional<Index> m, const std::string& output, const std::string& report,
               const std::string& manifest, const std::string& basis_prefix,
               const std::string& layout_name) {
    if (!(options.epsilon > 0.0)) {
        throw UsageError("--epsilon is required (directly or via --config) and must be positive");
    }
    options.delta_r = delta_r;
    options.m = m;
    const Layout layout = parse_layout(layout_name);
    const DataMatrix x = load_csv(input, layout);
    Json resolved = run_manifest(options, input, x.features(), x.samples());
    resolved["layout"] = layout_name;
    echo(resolved);

    const GenerateResult result = generate(x, options);
    for (const std::string& w : result.report.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    std::cerr << "generated " << result.report.total_generated << " samples (m = "
              << result.report.m_used << ", delta_r = " << result.report.isde.delta_r
              << ", M0 = " << result.report.isde.m0 << ")\n";
    emit_csv(output, result.samples, layout, feature_header(x.features(), "x"));
    if (!report.empty()) {
        save_json(report, to_json(result.report));
    }
    if (!manifest.empty()) {
        save_json(manifest, resolved);
    }
    if (!basis_prefix.empty() && options.reduced) {
        const DataMatrix xs = options.scale ? scale(x, options.eps_s).first : x;
        const PcaModel pca = fit_pca(xs, options.rank_tol);
        const DiffusionBasis basis = build_basis(normalize(xs, pca), options.epsilon,
                                                 options.kappa, result.report.m_used);
        save_basis_bundle(basis_prefix, basis);
    }
    return 0;
}

int run_diagnose(const std::string& given_path, const std::string& generated_path,
                 const std::string& manifold, const std::vector<double>& radii, Index grid_points,
                 const std::string& report, const std::string& marginals, Layout layout) {
    const DataMatrix given = load_csv(given_path, layout);
    echo({{"given", given_path},
          {"generated", generated_path},
          {"manifold", manifold},
          {"grid-points", grid_points}});
    {
        const PcaModel pca = fit_pca(given);
        std::cerr << "median pairwise squared distance of whitened data (heuristic epsilon "
                     "scale): "
                  << median_pairwise_sq_distance(normalize(given, pca).eta) << '\n';
    }
    if (generated_path.empty()) {
        return 0;
    }
    const DataMatrix generated = load_csv(generated_path, layout);
    std::optional<ManifoldDescriptor> reference;
    if (manifold == "circles") {
        reference = CirclesDescriptor{Eigen::Vector2d::Zero(), radii};
    } else if (manifold == "helix") {
        reference = HelixDescriptor{};
    }
    const ConcentrationStats stats =
        concentration_stats(given.values(), generated.values(), reference);
    Json doc = to_json(stats);

    const Index n = given.features();
    Matrix table(4, n * grid_points);
    Json sup = Json::array();
    for (Index k = 0; k < n; ++k) {
        const double lo = std::min(given.values().row(k).minCoeff(),
                                   generated.values().row(k).minCoeff());
        const double hi = std::max(given.values().row(k).maxCoeff(),
                                   generated.values().row(k).maxCoeff());
        const double pad = 0.1 * std::max(hi - lo, 1e-12);
        const Grid grid{lo - pad, hi + pad, grid_points};
        const Curve a = marginal_pdf(given.values(), k, grid);
        const Curve b = marginal_pdf(generated.values(), k, grid);
        sup.push_back((a.pdf - b.pdf).cwiseAbs().maxCoeff());
        for (Index i = 0; i < grid_points; ++i) {
            table.col(k * grid_points + i) << static_cast<double>(k + 1), a.x(i), a.pdf(i),
                b.pdf(i);
        }
    }
    doc["marginal_sup_gap"] = sup;
    if (!marginals.empty()) {
        save_csv(marginals, table, Layout::RowsAreSamples,
                 {"component", "x", "pdf_given", "pdf_generated"});
    }
    if (report.empty()) {
        std::cout << doc.dump(2) << '\n';
    } else {
        save_json(report, doc);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"msamp: generate new samples concentrated near the manifold of a data set"};
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    app.add_option("--layout", common.layout,
                   "CSV orientation: 'rows' (one sample per row) or 'columns'")
        ->check(CLI::IsMember({"rows", "columns"}))
        ->capture_default_str();
    app.add_option("--threads", common.threads,
                   "Cap on worker threads for kernel sums and eigen setup (0 = runtime default)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();

    // synth
    auto* synth = app.add_subcommand("synth", "Write a synthetic benchmark data set");
    std::string shape = "circles";
    Index synth_count = 230;
    double synth_noise = 0.02;
    std::uint64_t synth_seed = 1;
    std::vector<double> radii{1.0, 2.0};
    std::string synth_out;
    synth->add_option("shape", shape, "circles | helix | composite35")
        ->check(CLI::IsMember({"circles", "helix", "composite35"}))
        ->capture_default_str();
    synth->add_option("--count,-N", synth_count, "Number of samples")->capture_default_str();
    synth->add_option("--noise", synth_noise, "Standard deviation of isotropic Gaussian noise")
        ->capture_default_str();
    synth->add_option("--seed", synth_seed, "Random seed")->capture_default_str();
    synth->add_option("--radii", radii, "Circle radii (two values)")
        ->delimiter(',')
        ->capture_default_str();
    synth->add_option("--output,-o", synth_out, "Output CSV (default: stdout)");

    // scale
    auto* scale_cmd = app.add_subcommand("scale", "Min-max scale each feature");
    Input scale_in;
    std::string scale_out, scale_map;
    scale_cmd->add_option("--input,-i", scale_in.path, "Input CSV")->required()->check(
        CLI::ExistingFile);
    scale_cmd->add_option("--eps-s", scale_in.eps_s, "Offset added after scaling")
        ->capture_default_str();
    scale_cmd->add_option("--output,-o", scale_out, "Scaled CSV (default: stdout)");
    scale_cmd->add_option("--map", scale_map, "Write the scaling map as JSON");

    // normalize
    auto* norm_cmd = app.add_subcommand("normalize", "Whiten the data by principal components");
    Input norm_in;
    std::string norm_out, norm_model;
    add_input_options(norm_cmd, norm_in, true);
    norm_cmd->add_option("--output,-o", norm_out, "Whitened CSV (default: stdout)");
    norm_cmd->add_option("--model", norm_model, "Write the whitening model as JSON");

    // spectrum
    auto* spec_cmd = app.add_subcommand(
        "spectrum", "Diffusion-map eigenvalues, to help choose epsilon and m");
    Input spec_in;
    double spec_eps = 0.0;
    Index spec_m_max = 30;
    std::string spec_out;
    add_input_options(spec_cmd, spec_in, true);
    spec_cmd->add_option("--epsilon", spec_eps, "Kernel scale (required, no default)")
        ->required();
    spec_cmd->add_option("--m-max", spec_m_max, "Number of eigenvalues")->capture_default_str();
    spec_cmd->add_option("--output,-o", spec_out, "CSV of alpha,lambda (default: stdout)");

    // select-m
    auto* sel_cmd = app.add_subcommand("select-m", "Sweep the basis size and pick m by e_red");
    Input sel_in;
    double sel_eps = 0.0;
    int sel_kappa = 1;
    double sel_tol = kDefaultReductionTol;
    Index sel_m_max = 100;
    std::string sel_out, sel_report;
    add_input_options(sel_cmd, sel_in, true);
    sel_cmd->add_option("--epsilon", sel_eps, "Kernel scale (required, no default)")->required();
    sel_cmd->add_option("--kappa", sel_kappa,
                        "Eigenvalue power in the basis; does not change the selected span")
        ->capture_default_str();
    sel_cmd->add_option("--tol", sel_tol,
                        "Accept the smallest m whose relative covariance error is below this")
        ->capture_default_str();
    sel_cmd->add_option("--m-max", sel_m_max, "Largest m considered (clipped to N)")
        ->capture_default_str();
    sel_cmd->add_option("--output,-o", sel_out, "CSV of the m,e_red curve");
    sel_cmd->add_option("--report", sel_report, "JSON diagnostics");

    // sample
    auto* sample = app.add_subcommand("sample", "Generate new samples");
    std::string sample_input, sample_out, sample_report, sample_manifest, sample_basis, config;
    PipelineOptions opts;
    std::optional<double> delta_r;
    std::optional<Index> fixed_m;
    sample->add_option("--config", config,
                       "JSON file of flag values (a saved manifest works); flags given on the "
                       "command line win")
        ->check(CLI::ExistingFile);
    sample->add_option("--input,-i", sample_input, "Input CSV")->check(CLI::ExistingFile);
    sample->add_flag("--reduced,!--full", opts.reduced,
                     "Project the dynamics on the diffusion-map basis (--full integrates all N "
                     "columns and scatters samples)")
        ->capture_default_str();
    sample->add_flag("--scale,!--no-scale", opts.scale,
                     "Min-max scale features first; use when ranges differ by orders of "
                     "magnitude")
        ->capture_default_str();
    sample->add_option("--eps-s", opts.eps_s, "Offset added after min-max scaling")
        ->capture_default_str();
    sample->add_option("--rank-tol", opts.rank_tol,
                       "Relative threshold for dropping covariance eigenvalues")
        ->capture_default_str();
    sample->add_option("--epsilon", opts.epsilon,
                       "Diffusion-map kernel scale; required, see the spectrum subcommand");
    sample->add_option("--kappa", opts.kappa,
                       "Eigenvalue power in the basis; samples do not depend on it")
        ->capture_default_str();
    sample->add_option("--m", fixed_m, "Basis size; when omitted, chosen by --tol");
    sample->add_option("--tol", opts.tol, "e_red threshold used when --m is omitted")
        ->capture_default_str();
    sample->add_option("--m-max", opts.m_max, "Largest m considered when --m is omitted")
        ->capture_default_str();
    sample->add_option("--f0", opts.f0,
                       "Damping; controls how fast transients from the initial state die out")
        ->capture_default_str();
    sample->add_option("--fac", opts.fac,
                       "Oversampling factor: step = 2 pi s_hat / fac, with s_hat the kernel "
                       "bandwidth")
        ->capture_default_str();
    sample->add_option("--delta-r", delta_r, "Explicit step size, overriding --fac");
    sample->add_option("--m0", opts.m0,
                       "Steps between retained samples; raised to the relaxation bound when "
                       "smaller")
        ->capture_default_str();
    sample->add_option("--nmc", opts.n_mc, "Number of retained sample sets (each has N samples)")
        ->capture_default_str();
    sample->add_option("--seed", opts.seed, "Random seed; equal seeds give identical output")
        ->capture_default_str();
    sample->add_flag("--kde-truncate", opts.kde.truncate,
                     "Skip kernel terms more than 40 s_hat^2 beyond the nearest centre")
        ->capture_default_str();
    sample->add_option("--output,-o", sample_out, "Generated samples CSV (default: stdout)");
    sample->add_option("--report", sample_report, "JSON run report");
    sample->add_option("--manifest", sample_manifest,
                       "JSON of the resolved inputs; replay with --config");
    sample->add_option("--basis", sample_basis,
                       "Write the basis as <prefix>.json, <prefix>_g.csv, <prefix>_a.csv");

    // diagnose
    auto* diag = app.add_subcommand("diagnose", "Compare generated samples with the data");
    std::string diag_given, diag_generated, diag_manifold = "none", diag_report, diag_marginals;
    std::vector<double> diag_radii{1.0, 2.0};
    Index grid_points = 201;
    diag->add_option("--given", diag_given, "Given data CSV")->required()->check(
        CLI::ExistingFile);
    diag->add_option("--generated", diag_generated, "Generated samples CSV")
        ->check(CLI::ExistingFile);
    diag->add_option("--manifold", diag_manifold,
                     "Analytic reference curve for distance statistics")
        ->check(CLI::IsMember({"none", "circles", "helix"}))
        ->capture_default_str();
    diag->add_option("--radii", diag_radii, "Circle radii for --manifold circles")
        ->delimiter(',')
        ->capture_default_str();
    diag->add_option("--grid-points", grid_points, "Grid size for marginal densities")
        ->capture_default_str();
    diag->add_option("--report", diag_report, "JSON statistics (default: stdout)");
    diag->add_option("--marginals", diag_marginals, "CSV of marginal densities for plotting");

    try {
        app.parse(argc, argv);
        if (sample->parsed() && !config.empty()) {
            const std::vector<std::string> extra = config_arguments(sample, load_json(config));
            std::vector<std::string> args(argv + 1, argv + argc);
            args.insert(args.end(), extra.begin(), extra.end());
            std::reverse(args.begin(), args.end());
            app.parse(std::move(args));
        }
        if (common.threads > 0) {
            omp_set_num_threads(common.threads);
        }
        const Layout layout = parse_layout(common.layout);

        if (synth->parsed()) {
            return run_synth(shape, synth_count, synth_noise, synth_seed, radii, synth_out, layout);
        }
        if (scale_cmd->parsed()) {
            return run_scale(scale_in, scale_out, scale_map, layout);
        }
        if (norm_cmd->parsed()) {
            return run_normalize(norm_in, norm_out, norm_model, layout);
        }
        if (spec_cmd->parsed()) {
            return run_spectrum(spec_in, spec_eps, spec_m_max, spec_out, layout);
        }
        if (sel_cmd->parsed()) {
            return run_select_m(sel_in, sel_eps, sel_kappa, sel_tol, sel_m_max, sel_out,
                                sel_report, layout);
        }
        if (sample->parsed()) {
            if (sample_input.empty()) {
                throw UsageError("--input is required (directly or via --config)");
            }
            return run_sample(sample_input, opts, delta_r, fixed_m, sample_out, sample_report,
                              sample_manifest, sample_basis, common.layout);
        }
        if (diag->parsed()) {
            return run_diagnose(diag_given, diag_generated, diag_manifold, diag_radii,
                                grid_points, diag_report, diag_marginals, layout);
        }
        return 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\nRun with --help for usage.\n";
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const msamp::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
