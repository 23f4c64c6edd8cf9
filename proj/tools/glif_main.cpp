// glif: command-line front end for graph Laplacian individual-fairness
// post-processing.
//
// Exit codes: 0 success, 1 validation error, 2 numerical failure. Errors are
// reported on stderr as a single line "glif: error code=<Code> message=<text>".

#include "glif/baseline.hpp"
#include "glif/error.hpp"
#include "glif/evalmetrics.hpp"
#include "glif/graph.hpp"
#include "glif/io.hpp"
#include "glif/laplacian.hpp"
#include "glif/metric.hpp"
#include "glif/smoother.hpp"
#include "glif/synthcheck.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using glif::ErrorCode;
using glif::Index;
using nlohmann::json;
namespace io = glif::io;

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
    } else {
        io::write_text(out_path, text);
    }
}

std::vector<double> parse_number_list(const std::string& text, const char* flag) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find(',', pos);
        const std::string tok = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
        char* stop = nullptr;
        const double v = std::strtod(tok.c_str(), &stop);
        if (tok.empty() || stop != tok.c_str() + tok.size()) {
            glif::fail(ErrorCode::ParseError, std::string(flag) + ": not a number '" + tok + "'");
        }
        out.push_back(v);
        if (end == std::string::npos) {
            break;
        }
        pos = end + 1;
    }
    return out;
}

// graph build ---------------------------------------------------------------

struct GraphBuildArgs {
    std::string embeddings;
    std::string metric;
    double theta = glif::kDefaultTheta;
    std::string tau;
    std::string out;
};

glif::FairMetricSpec load_metric(const std::string& path) {
    if (path.empty()) {
        return {};
    }
    json j;
    try {
        j = json::parse(io::read_text(path));
    } catch (const json::parse_error& e) {
        glif::fail(ErrorCode::ParseError, path + ": " + e.what());
    }
    return glif::validate_metric(io::metric_from_json(j));
}

double parse_tau(const std::string& text) {
    if (text == "inf" || text == "infinity") {
        return glif::kInfiniteTau;
    }
    const auto values = parse_number_list(text, "--tau");
    if (values.size() != 1) {
        glif::fail(ErrorCode::ParseError, "--tau takes a single value");
    }
    return values[0];
}

void run_graph_build(const GraphBuildArgs& a) {
    const double tau = parse_tau(a.tau);
    if (!(a.theta > 0.0) || !(tau > 0.0)) {
        glif::fail(ErrorCode::InvalidParameter, "theta and tau must be positive");
    }
    const glif::FairMetricSpec metric = load_metric(a.metric);
    const glif::Matrix X = io::read_csv_matrix(a.embeddings);
    const auto g = glif::build_similarity_graph(X, metric, a.theta, tau);
    emit(a.out, io::format_edge_list(g));
}

struct GraphAnnotateArgs {
    std::string pairs;
    Index n = 0;
    std::string out;
};

void run_graph_annotate(const GraphAnnotateArgs& a) {
    std::vector<std::pair<Index, Index>> pairs;
    for (const auto& [j, w] : io::parse_weight_row(io::read_text(a.pairs), a.pairs)) {
        if (w != std::floor(w)) {
            glif::fail(ErrorCode::ParseError, a.pairs + ": pair indices must be integers");
        }
        pairs.emplace_back(j, static_cast<Index>(w));
    }
    emit(a.out, io::format_edge_list(glif::graph_from_annotations(pairs, a.n)));
}

// smooth --------------------------------------------------------------------

struct SmoothArgs {
    std::string graph;
    std::string outputs;
    std::string config;
    std::string out;
    std::string meta;
    std::optional<double> lambda;
    std::optional<std::string> laplacian_kind;
    std::optional<std::string> mode;
    std::optional<int> epochs;
    std::optional<Index> batch_size;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> discrepancy;
    std::optional<bool> nrw_lambda_scaling;
    std::optional<double> tolerance;
    std::optional<Index> dense_limit;
    bool no_fallback = false;
};

glif::SmoothingConfig build_config(const SmoothArgs& a) {
    glif::SmoothingConfig config;
    if (!a.config.empty()) {
        json j;
        try {
            j = json::parse(io::read_text(a.config));
        } catch (const json::parse_error& e) {
            glif::fail(ErrorCode::ParseError, a.config + ": " + e.what());
        }
        config = io::config_from_json(j, config);
    }
    // Flags take precedence over the config file.
    json overrides = json::object();
    if (a.lambda) overrides["lambda"] = *a.lambda;
    if (a.laplacian_kind) overrides["laplacian_kind"] = *a.laplacian_kind;
    if (a.mode) overrides["mode"] = *a.mode;
    if (a.epochs) overrides["epochs"] = *a.epochs;
    if (a.batch_size) overrides["batch_size"] = *a.batch_size;
    if (a.seed) overrides["seed"] = *a.seed;
    if (a.discrepancy) overrides["discrepancy"] = *a.discrepancy;
    if (a.nrw_lambda_scaling) overrides["nrw_lambda_scaling"] = *a.nrw_lambda_scaling;
    if (a.tolerance) overrides["tolerance"] = *a.tolerance;
    config = io::config_from_json(overrides, config);
    if (a.dense_limit) config.dense_limit = *a.dense_limit;
    config.allow_fallback = !a.no_fallback;
    glif::validate(config);
    return config;
}

void run_smooth(const SmoothArgs& a) {
    if (a.graph.empty() || a.outputs.empty()) {
        glif::fail(ErrorCode::InvalidParameter, "smooth requires --graph and --outputs");
    }
    const glif::SmoothingConfig config = build_config(a);
    const auto g = io::read_edge_list(a.graph);
    const glif::OutputMatrix yhat = io::read_csv_matrix(a.outputs);
    if (yhat.rows() != g.num_nodes()) {
        glif::fail(ErrorCode::RowCountMismatch,
                   "outputs have " + std::to_string(yhat.rows()) + " rows but the graph has " +
                       std::to_string(g.num_nodes()) + " nodes");
    }
    const auto laplacian = glif::make_laplacian(g, config.laplacian_kind);
    const auto result = glif::smooth(yhat, laplacian, config);
    for (const auto& w : result.warnings) {
        std::cerr << "glif: warning " << w << '\n';
    }
    emit(a.out, io::format_csv_matrix(result.values));
    std::string meta_path = a.meta;
    if (meta_path.empty() && !a.out.empty() && a.out != "-") {
        meta_path = a.out + ".meta.json";
    }
    if (!meta_path.empty()) {
        io::write_text(meta_path, io::smooth_metadata(config, result).dump(2) + "\n");
    }
}

struct InductiveArgs {
    std::string fitted;
    std::string weights;
    std::string yhat_new;
    double lambda = 0.0;
    std::string out;
};

void run_inductive(const InductiveArgs& a) {
    const glif::OutputMatrix fitted = io::read_csv_matrix(a.fitted);
    const auto weights = io::parse_weight_row(io::read_text(a.weights), a.weights);
    const auto values = parse_number_list(a.yhat_new, "--yhat-new");
    const glif::Vector yhat_new = Eigen::Map<const glif::Vector>(values.data(), static_cast<Index>(values.size()));
    const glif::Vector f = glif::inductive_update(fitted, weights, yhat_new, a.lambda);
    emit(a.out, io::format_csv_matrix(glif::Matrix(f.transpose())));
}

// baseline project ----------------------------------------------------------

struct BaselineArgs {
    std::string distances;
    std::string embeddings;
    std::string metric;
    std::string outputs;
    double lipschitz = 0.0;
    double tol = glif::kDefaultProjectionTolerance;
    int max_iter = glif::kDefaultProjectionSweeps;
    std::string out;
};

std::vector<glif::PairDistance> all_pair_distances(const glif::Matrix& X,
                                                   const glif::FairMetricSpec& metric) {
    const glif::Matrix d = glif::pairwise_fair_distances(metric, X);
    std::vector<glif::PairDistance> pairs;
    for (Index i = 0; i < X.rows(); ++i) {
        for (Index j = i + 1; j < X.rows(); ++j) {
            pairs.push_back({i, j, d(i, j)});
        }
    }
    return pairs;
}

void run_baseline(const BaselineArgs& a) {
    if (a.distances.empty() == a.embeddings.empty()) {
        glif::fail(ErrorCode::InvalidParameter,
                   "baseline project needs exactly one of --distances or --embeddings");
    }
    const glif::OutputMatrix yhat = io::read_csv_matrix(a.outputs);
    std::vector<glif::PairDistance> pairs;
    if (!a.distances.empty()) {
        pairs = io::read_distances(a.distances);
    } else {
        pairs = all_pair_distances(io::read_csv_matrix(a.embeddings), load_metric(a.metric));
    }
    const auto constraints = glif::make_constraints(pairs, a.lipschitz);
    const auto result = glif::global_if_project(yhat, constraints, a.tol, a.max_iter);
    emit(a.out, io::format_csv_matrix(result.values));
}

// eval ----------------------------------------------------------------------

struct EvalArgs {
    std::string outputs;
    std::string groups;
    std::string labels;
    std::string distances;
    std::optional<double> lipschitz;
    int bins = 10;
    std::string subset;
    std::string group_a;
    std::string group_b;
    Index column = 0;
    double threshold = 0.5;
    std::string out;
};

void run_eval(const EvalArgs& a) {
    const glif::OutputMatrix outputs = io::read_csv_matrix(a.outputs);
    glif::EvaluationReport report;

    const auto records = io::parse_groups(io::read_text(a.groups), a.groups);
    report.prediction_consistency =
        glif::prediction_consistency(io::make_grouped(outputs, records), a.threshold);

    if (!a.labels.empty()) {
        const auto labels = io::parse_labels(io::read_text(a.labels), outputs.rows(), a.labels);
        report.accuracy = glif::accuracy(outputs, labels, a.threshold);
        const auto bal = glif::balanced_accuracy(outputs, labels, a.threshold);
        report.balanced_accuracy = bal.value;
        report.balanced_accuracy_excluded_classes = bal.excluded_classes;
    }
    std::vector<Index> subset;
    if (a.subset.empty()) {
        subset.resize(static_cast<std::size_t>(outputs.rows()));
        for (Index i = 0; i < outputs.rows(); ++i) {
            subset[static_cast<std::size_t>(i)] = i;
        }
    } else {
        subset = io::parse_index_list(io::read_text(a.subset), a.subset);
    }
    report.output_std = glif::output_std(outputs, subset, a.column);

    if (a.group_a.empty() != a.group_b.empty()) {
        glif::fail(ErrorCode::InvalidParameter, "--group-a and --group-b must be given together");
    }
    if (!a.group_a.empty()) {
        report.group_gap = glif::group_gap(outputs, io::parse_index_list(io::read_text(a.group_a), a.group_a),
                                           io::parse_index_list(io::read_text(a.group_b), a.group_b),
                                           a.column);
    }
    if (!a.distances.empty()) {
        if (!a.lipschitz) {
            glif::fail(ErrorCode::InvalidParameter, "--distances requires --lipschitz");
        }
        report.violation_histogram = glif::violation_histogram(
            outputs, io::read_distances(a.distances), *a.lipschitz, a.bins);
    }
    emit(a.out, io::report_to_json(report).dump(2) + "\n");
}

// check limits --------------------------------------------------------------

struct CheckArgs {
    Index d = 1;
    std::string function = "cosine_product";
    std::string n_grid = "500,5000";
    std::string seeds = "0,1,2,3,4";
    double sigma_exponent = 1.0 / 6.0;
    std::string out;
};

void run_check_limits(const CheckArgs& a) {
    glif::SyntheticSpec spec;
    spec.dimension = a.d;
    spec.sigma_exponent = a.sigma_exponent;
    if (a.function == "cosine_product") {
        spec.target = glif::TargetFunction::cosine_product;
    } else if (a.function == "cosine_sum") {
        spec.target = glif::TargetFunction::cosine_sum;
    } else if (a.function == "constant") {
        spec.target = glif::TargetFunction::constant;
    } else {
        glif::fail(ErrorCode::InvalidParameter, "unknown --function '" + a.function + "'");
    }
    glif::validate(spec);
    std::vector<Index> grid;
    for (double v : parse_number_list(a.n_grid, "--n-grid")) {
        grid.push_back(static_cast<Index>(v));
    }
    std::vector<std::uint64_t> seeds;
    for (double v : parse_number_list(a.seeds, "--seeds")) {
        seeds.push_back(static_cast<std::uint64_t>(v));
    }
    emit(a.out, io::format_convergence_csv(glif::convergence_report(spec, grid, seeds)));
}

// aggregate -----------------------------------------------------------------

void run_aggregate(const std::vector<std::string>& inputs, const std::string& out) {
    std::vector<json> reports;
    for (const auto& path : inputs) {
        try {
            reports.push_back(json::parse(io::read_text(path)));
        } catch (const json::parse_error& e) {
            glif::fail(ErrorCode::ParseError, path + ": " + e.what());
        }
    }
    emit(out, io::aggregate_reports(reports).dump(2) + "\n");
}

int report_error(ErrorCode code, const std::string& message) {
    std::string flat = message;
    for (char& c : flat) {
        if (c == '\n') c = ' ';
    }
    std::cerr << "glif: error code=" << glif::to_string(code) << " message=" << flat << '\n';
    return glif::is_numerical(code) ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph Laplacian individual-fairness post-processing"};
    app.require_subcommand(1);

    auto* graph = app.add_subcommand("graph", "Similarity graph construction");
    graph->require_subcommand(1);
    GraphBuildArgs gb;
    auto* build = graph->add_subcommand("build", "Build W_ij = exp(-theta d^2) for d <= tau");
    build->add_option("--embeddings", gb.embeddings, "CSV of input embeddings")->required();
    build->add_option("--metric", gb.metric, "Fair metric JSON (default: euclidean)");
    build->add_option("--theta", gb.theta, "Kernel scale theta")->capture_default_str();
    build->add_option("--tau", gb.tau, "Distance threshold (number or 'inf')")->required();
    build->add_option("--out", gb.out, "Edge-list output (default: stdout)");
    GraphAnnotateArgs ga;
    auto* annotate = graph->add_subcommand("annotate", "Binary graph from annotated pairs");
    annotate->add_option("--pairs", ga.pairs, "TSV of 'i<TAB>j' pairs")->required();
    annotate->add_option("--n", ga.n, "Number of individuals")->required();
    annotate->add_option("--out", ga.out, "Edge-list output (default: stdout)");

    SmoothArgs sm;
    auto* smooth = app.add_subcommand("smooth", "Laplacian smoothing of model outputs");
    smooth->add_option("--graph", sm.graph, "Edge-list file");
    smooth->add_option("--outputs", sm.outputs, "CSV of model outputs");
    smooth->add_option("--config", sm.config, "SmoothingConfig JSON");
    smooth->add_option("--out", sm.out, "Smoothed CSV (default: stdout)");
    smooth->add_option("--meta", sm.meta, "Metadata JSON (default: <out>.meta.json)");
    smooth->add_option("--lambda", sm.lambda);
    smooth->add_option("--laplacian-kind", sm.laplacian_kind)
        ->check(CLI::IsMember({"unnormalized", "normalized_random_walk"}));
    smooth->add_option("--mode", sm.mode)->check(CLI::IsMember({"closed_form", "coordinate_descent"}));
    smooth->add_option("--epochs", sm.epochs);
    smooth->add_option("--batch-size", sm.batch_size);
    smooth->add_option("--seed", sm.seed);
    smooth->add_option("--discrepancy", sm.discrepancy)->check(CLI::IsMember({"squared", "kl"}));
    smooth->add_option("--nrw-lambda-scaling", sm.nrw_lambda_scaling);
    smooth->add_option("--tolerance", sm.tolerance);
    smooth->add_option("--dense-limit", sm.dense_limit);
    smooth->add_flag("--no-fallback", sm.no_fallback,
                     "Fail instead of falling back to coordinate descent");
    InductiveArgs ind;
    auto* inductive = smooth->add_subcommand("inductive", "One coordinate step for a new point");
    inductive->add_option("--fitted", ind.fitted, "CSV of post-processed outputs")->required();
    inductive->add_option("--weights", ind.weights, "TSV 'j<TAB>w' weights to fitted points")->required();
    inductive->add_option("--yhat-new", ind.yhat_new, "Comma-separated model output")->required();
    inductive->add_option("--lambda", ind.lambda)->required();
    inductive->add_option("--out", ind.out, "Output CSV (default: stdout)");

    auto* baseline = app.add_subcommand("baseline", "Global IF-constraints projection");
    baseline->require_subcommand(1);
    BaselineArgs bl;
    auto* project = baseline->add_subcommand("project", "Dykstra projection onto Lipschitz constraints");
    project->add_option("--distances", bl.distances, "TSV 'i<TAB>j<TAB>d'");
    project->add_option("--embeddings", bl.embeddings, "CSV embeddings (all pairs)");
    project->add_option("--metric", bl.metric, "Fair metric JSON for --embeddings");
    project->add_option("--outputs", bl.outputs, "CSV of model outputs")->required();
    project->add_option("--lipschitz", bl.lipschitz, "Lipschitz constant L")->required();
    project->add_option("--tol", bl.tol)->capture_default_str();
    project->add_option("--max-iter", bl.max_iter)->capture_default_str();
    project->add_option("--out", bl.out, "Projected CSV (default: stdout)");

    EvalArgs ev;
    auto* eval = app.add_subcommand("eval", "Fairness and accuracy report");
    eval->add_option("--outputs", ev.outputs)->required();
    eval->add_option("--groups", ev.groups, "CSV row_index,group_id,is_original")->required();
    eval->add_option("--labels", ev.labels, "CSV row_index,label");
    eval->add_option("--distances", ev.distances, "TSV 'i<TAB>j<TAB>d' for the violation histogram");
    eval->add_option("--lipschitz", ev.lipschitz);
    eval->add_option("--bins", ev.bins)->capture_default_str();
    eval->add_option("--subset", ev.subset, "Rows for output_std (default: all)");
    eval->add_option("--group-a", ev.group_a, "Rows of group A for group_gap");
    eval->add_option("--group-b", ev.group_b, "Rows of group B for group_gap");
    eval->add_option("--column", ev.column)->capture_default_str();
    eval->add_option("--threshold", ev.threshold, "Decision threshold for scalar outputs")
        ->capture_default_str();
    eval->add_option("--out", ev.out, "Report JSON (default: stdout)");

    auto* check = app.add_subcommand("check", "Empirical checks");
    check->require_subcommand(1);
    CheckArgs ck;
    auto* limits = check->add_subcommand("limits", "Large-n limits of the Laplacian functionals");
    limits->add_option("--d", ck.d)->capture_default_str();
    limits->add_option("--function", ck.function)
        ->check(CLI::IsMember({"cosine_product", "cosine_sum", "constant"}))
        ->capture_default_str();
    limits->add_option("--n-grid", ck.n_grid)->capture_default_str();
    limits->add_option("--seeds", ck.seeds)->capture_default_str();
    limits->add_option("--sigma-exponent", ck.sigma_exponent)->capture_default_str();
    limits->add_option("--out", ck.out, "CSV output (default: stdout)");

    std::vector<std::string> agg_inputs;
    std::string agg_out;
    auto* aggregate = app.add_subcommand("aggregate", "Mean and std of report JSONs");
    aggregate->add_option("reports", agg_inputs, "Report JSON files")->required();
    aggregate->add_option("--out", agg_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        return report_error(ErrorCode::ParseError, e.what());
    }

    try {
        if (*build) {
            run_graph_build(gb);
        } else if (*annotate) {
            run_graph_annotate(ga);
        } else if (*inductive) {
            run_inductive(ind);
        } else if (*smooth) {
            run_smooth(sm);
        } else if (*project) {
            run_baseline(bl);
        } else if (*eval) {
            run_eval(ev);
        } else if (*limits) {
            run_check_limits(ck);
        } else if (*aggregate) {
            run_aggregate(agg_inputs, agg_out);
        }
    } catch (const glif::Error& e) {
        return report_error(e.code(), e.what());
    } catch (const std::exception& e) {
        return report_error(ErrorCode::ParseError, e.what());
    }
    return 0;
}
