#include "glif/io.hpp"

#include "glif/error.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace glif::io {

using nlohmann::json;

std::string format_double(double x) {
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::ParseError, "cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            fail(ErrorCode::ParseError, "cannot write " + path.string());
        }
        out << text;
        if (!out) {
            fail(ErrorCode::ParseError, "failed writing " + path.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

namespace {

struct Line {
    std::size_t number = 0;  // 1-based
    std::string text;
};

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<Line> lines_of(const std::string& text) {
    std::vector<Line> out;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        std::string raw = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
        ++number;
        std::string t = trim(raw);
        if (!t.empty()) {
            out.push_back({number, std::move(t)});
        }
        if (end == std::string::npos) {
            break;
        }
        pos = end + 1;
    }
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto end = s.find(sep, pos);
        out.push_back(trim(s.substr(pos, end == std::string::npos ? std::string::npos : end - pos)));
        if (end == std::string::npos) {
            break;
        }
        pos = end + 1;
    }
    return out;
}

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& what) {
    std::ostringstream msg;
    msg << source << ":" << line << ": " << what;
    fail(ErrorCode::ParseError, msg.str());
}

bool try_double(const std::string& token, double& out) {
    if (token.empty()) {
        return false;
    }
    errno = 0;
    char* end = nullptr;
    out = std::strtod(token.c_str(), &end);
    return end == token.c_str() + token.size() && errno != ERANGE;
}

double parse_double(const std::string& token, const std::string& source, std::size_t line) {
    double v = 0.0;
    if (!try_double(token, v)) {
        parse_fail(source, line, "not a number: '" + token + "'");
    }
    return v;
}

std::int64_t parse_int(const std::string& token, const std::string& source, std::size_t line) {
    if (token.empty()) {
        parse_fail(source, line, "empty integer field");
    }
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(token.c_str(), &end, 10);
    if (end != token.c_str() + token.size() || errno == ERANGE) {
        parse_fail(source, line, "not an integer: '" + token + "'");
    }
    return v;
}

Index parse_index(const std::string& token, const std::string& source, std::size_t line) {
    const auto v = parse_int(token, source, line);
    if (v < 0) {
        parse_fail(source, line, "negative index " + token);
    }
    return static_cast<Index>(v);
}

// Tab separated; also accepts runs of spaces.
std::vector<std::string> split_fields(const std::string& s) {
    if (s.find('\t') != std::string::npos) {
        return split(s, '\t');
    }
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) {
        out.push_back(tok);
    }
    return out;
}

}  // namespace

Matrix parse_csv_matrix(const std::string& text, const std::string& source) {
    const auto lines = lines_of(text);
    std::vector<std::vector<double>> rows;
    std::size_t cols = 0;
    for (std::size_t k = 0; k < lines.size(); ++k) {
        const auto fields = split(lines[k].text, ',');
        if (k == 0) {
            double probe = 0.0;
            cols = fields.size();
            if (!try_double(fields[0], probe)) {
                continue;  // header row
            }
        }
        if (fields.size() != cols) {
            std::ostringstream what;
            what << "expected " << cols << " columns, found " << fields.size();
            parse_fail(source, lines[k].number, what.str());
        }
        std::vector<double> row;
        row.reserve(cols);
        for (const auto& f : fields) {
            const double v = parse_double(f, source, lines[k].number);
            if (!std::isfinite(v)) {
                parse_fail(source, lines[k].number, "non-finite value '" + f + "'");
            }
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        fail(ErrorCode::ParseError, source + ": no data rows");
    }
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Index>(i), static_cast<Index>(c)) = rows[i][c];
        }
    }
    return m;
}

Matrix read_csv_matrix(const std::filesystem::path& path) {
    return parse_csv_matrix(read_text(path), path.string());
}

std::string format_csv_matrix(const Matrix& m, bool header) {
    std::string out;
    if (header) {
        for (Index c = 0; c < m.cols(); ++c) {
            out += (c ? ",c" : "c") + std::to_string(c);
        }
        out += '\n';
    }
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index c = 0; c < m.cols(); ++c) {
            if (c) {
                out += ',';
            }
            out += format_double(m(i, c));
        }
        out += '\n';
    }
    return out;
}

SimilarityGraph parse_edge_list(const std::string& text, const std::string& source) {
    const auto lines = lines_of(text);
    std::optional<Index> n;
    std::vector<Edge> edges;
    std::set<std::pair<Index, Index>> seen;
    for (const auto& line : lines) {
        if (line.text[0] == '#') {
            const std::string body = trim(line.text.substr(1));
            if (body.rfind("n=", 0) == 0) {
                if (n) {
                    parse_fail(source, line.number, "duplicate '# n=' header");
                }
                n = parse_index(trim(body.substr(2)), source, line.number);
            }
            continue;
        }
        if (!n) {
            parse_fail(source, line.number, "edge before the '# n=<n>' header");
        }
        const auto fields = split_fields(line.text);
        if (fields.size() != 3) {
            parse_fail(source, line.number, "expected 'i<TAB>j<TAB>w'");
        }
        const Index i = parse_index(fields[0], source, line.number);
        const Index j = parse_index(fields[1], source, line.number);
        const double w = parse_double(fields[2], source, line.number);
        if (i >= *n || j >= *n) {
            parse_fail(source, line.number, "edge index out of range for n=" + std::to_string(*n));
        }
        if (i >= j) {
            parse_fail(source, line.number, "edges must satisfy i < j");
        }
        if (!(w > 0.0) || !std::isfinite(w)) {
            parse_fail(source, line.number, "edge weight must be positive and finite");
        }
        if (!seen.insert({i, j}).second) {
            parse_fail(source, line.number, "duplicate edge");
        }
        edges.push_back({i, j, w});
    }
    if (!n) {
        fail(ErrorCode::ParseError, source + ": missing '# n=<n>' header");
    }
    return SimilarityGraph(*n, std::move(edges));
}

SimilarityGraph read_edge_list(const std::filesystem::path& path) {
    return parse_edge_list(read_text(path), path.string());
}

std::string format_edge_list(const SimilarityGraph& g) {
    std::string out = "# n=" + std::to_string(g.num_nodes()) + "\n";
    for (const Edge& e : g.edges()) {
        out += std::to_string(e.i) + '\t' + std::to_string(e.j) + '\t' + format_double(e.w) + '\n';
    }
    return out;
}

std::vector<PairDistance> parse_distances(const std::string& text, const std::string& source) {
    std::vector<PairDistance> out;
    for (const auto& line : lines_of(text)) {
        if (line.text[0] == '#') {
            continue;
        }
        const auto fields = split_fields(line.text);
        if (fields.size() != 3) {
            parse_fail(source, line.number, "expected 'i<TAB>j<TAB>d'");
        }
        PairDistance p;
        p.i = parse_index(fields[0], source, line.number);
        p.j = parse_index(fields[1], source, line.number);
        p.d = parse_double(fields[2], source, line.number);
        if (p.i == p.j) {
            parse_fail(source, line.number, "distance pair with i == j");
        }
        if (!(p.d >= 0.0)) {
            parse_fail(source, line.number, "distance must be nonnegative");
        }
        out.push_back(p);
    }
    return out;
}

std::vector<PairDistance> read_distances(const std::filesystem::path& path) {
    return parse_distances(read_text(path), path.string());
}

std::string format_distances(const std::vector<PairDistance>& pairs) {
    std::string out;
    for (const auto& p : pairs) {
        out += std::to_string(p.i) + '\t' + std::to_string(p.j) + '\t' + format_double(p.d) + '\n';
    }
    return out;
}

std::vector<std::pair<Index, double>> parse_weight_row(const std::string& text,
                                                       const std::string& source) {
    std::vector<std::pair<Index, double>> out;
    for (const auto& line : lines_of(text)) {
        if (line.text[0] == '#') {
            continue;
        }
        const auto fields = split_fields(line.text);
        if (fields.size() != 2) {
            parse_fail(source, line.number, "expected 'j<TAB>w'");
        }
        const Index j = parse_index(fields[0], source, line.number);
        const double w = parse_double(fields[1], source, line.number);
        if (!(w >= 0.0) || !std::isfinite(w)) {
            parse_fail(source, line.number, "weight must be nonnegative and finite");
        }
        out.emplace_back(j, w);
    }
    return out;
}

std::vector<GroupRecord> parse_groups(const std::string& text, const std::string& source) {
    std::vector<GroupRecord> out;
    const auto lines = lines_of(text);
    for (std::size_t k = 0; k < lines.size(); ++k) {
        const auto fields = split(lines[k].text, ',');
        if (k == 0 && fields.size() == 3 && fields[0] == "row_index") {
            continue;
        }
        if (fields.size() != 3) {
            parse_fail(source, lines[k].number, "expected 'row_index,group_id,is_original'");
        }
        GroupRecord r;
        r.row = parse_index(fields[0], source, lines[k].number);
        r.group = parse_int(fields[1], source, lines[k].number);
        const auto flag = parse_int(fields[2], source, lines[k].number);
        if (flag != 0 && flag != 1) {
            parse_fail(source, lines[k].number, "is_original must be 0 or 1");
        }
        r.is_original = flag == 1;
        out.push_back(r);
    }
    return out;
}

GroupedPredictions make_grouped(const OutputMatrix& outputs,
                                const std::vector<GroupRecord>& records) {
    const auto n = static_cast<std::size_t>(outputs.rows());
    GroupedPredictions g;
    g.outputs = outputs;
    g.group_of.assign(n, 0);
    g.is_original.assign(n, false);
    std::vector<bool> seen(n, false);
    for (const auto& r : records) {
        if (r.row >= outputs.rows()) {
            std::ostringstream msg;
            msg << "group record for row " << r.row << " but outputs have " << outputs.rows()
                << " rows";
            fail(ErrorCode::IndexOutOfRange, msg.str());
        }
        const auto idx = static_cast<std::size_t>(r.row);
        if (seen[idx]) {
            fail(ErrorCode::ParseError, "row " + std::to_string(r.row) + " assigned to two groups");
        }
        seen[idx] = true;
        g.group_of[idx] = r.group;
        g.is_original[idx] = r.is_original;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!seen[i]) {
            fail(ErrorCode::EmptyGroup, "row " + std::to_string(i) + " belongs to no group");
        }
    }
    return g;
}

std::vector<int> parse_labels(const std::string& text, Index num_rows, const std::string& source) {
    std::vector<int> labels(static_cast<std::size_t>(num_rows), -1);
    const auto lines = lines_of(text);
    for (std::size_t k = 0; k < lines.size(); ++k) {
        const auto fields = split(lines[k].text, ',');
        if (k == 0 && fields.size() == 2 && fields[0] == "row_index") {
            continue;
        }
        if (fields.size() != 2) {
            parse_fail(source, lines[k].number, "expected 'row_index,label'");
        }
        const Index row = parse_index(fields[0], source, lines[k].number);
        const auto label = parse_int(fields[1], source, lines[k].number);
        if (row >= num_rows) {
            parse_fail(source, lines[k].number, "row index out of range");
        }
        labels[static_cast<std::size_t>(row)] = static_cast<int>(label);
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0) {
            fail(ErrorCode::NoLabels, source + ": no label for row " + std::to_string(i));
        }
    }
    return labels;
}

std::vector<Index> parse_index_list(const std::string& text, const std::string& source) {
    std::vector<Index> out;
    for (const auto& line : lines_of(text)) {
        if (line.text[0] == '#') {
            continue;
        }
        for (const auto& tok : split(line.text, ',')) {
            if (!tok.empty()) {
                out.push_back(parse_index(tok, source, line.number));
            }
        }
    }
    return out;
}

namespace {

Matrix matrix_from_json(const json& j, const char* field) {
    if (!j.is_array() || j.empty()) {
        fail(ErrorCode::ParseError, std::string("'") + field + "' must be a nonempty array of rows");
    }
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols || cols == 0) {
            fail(ErrorCode::ParseError, std::string("'") + field + "' has a ragged or empty row " +
                                            std::to_string(r));
        }
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[r][c].is_number()) {
                fail(ErrorCode::ParseError,
                     std::string("'") + field + "' entry is not a number at row " +
                         std::to_string(r));
            }
            m(static_cast<Index>(r), static_cast<Index>(c)) = j[r][c].get<double>();
        }
    }
    return m;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const char* what) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) {
            fail(ErrorCode::ParseError, std::string(what) + ": unexpected field '" + key + "'");
        }
    }
}

template <class T>
T get_field(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        fail(ErrorCode::ParseError, std::string("field '") + key + "': " + e.what());
    }
}

}  // namespace

FairMetricSpec metric_from_json(const json& j) {
    if (!j.is_object()) {
        fail(ErrorCode::ParseError, "metric spec must be a JSON object");
    }
    if (!j.contains("kind")) {
        fail(ErrorCode::ParseError, "metric spec is missing 'kind'");
    }
    const auto kind = get_field<std::string>(j, "kind");
    FairMetricSpec spec;
    if (kind == "euclidean") {
        reject_unknown(j, {"kind"}, "euclidean metric");
        spec.kind = MetricKind::euclidean;
    } else if (kind == "mahalanobis") {
        reject_unknown(j, {"kind", "sigma"}, "mahalanobis metric");
        if (!j.contains("sigma")) {
            fail(ErrorCode::ParseError, "mahalanobis metric requires 'sigma'");
        }
        spec.kind = MetricKind::mahalanobis;
        spec.sigma = matrix_from_json(j.at("sigma"), "sigma");
    } else if (kind == "projection_complement") {
        reject_unknown(j, {"kind", "basis"}, "projection_complement metric");
        if (!j.contains("basis")) {
            fail(ErrorCode::ParseError, "projection_complement metric requires 'basis'");
        }
        spec.kind = MetricKind::projection_complement;
        spec.basis = matrix_from_json(j.at("basis"), "basis");
    } else {
        fail(ErrorCode::ParseError, "unknown metric kind '" + kind + "'");
    }
    return spec;
}

json metric_to_json(const FairMetricSpec& spec) {
    json j;
    j["kind"] = to_string(spec.kind);
    if (spec.kind == MetricKind::mahalanobis) {
        j["sigma"] = matrix_to_json(spec.sigma);
    } else if (spec.kind == MetricKind::projection_complement) {
        j["basis"] = matrix_to_json(spec.basis);
    }
    return j;
}

SmoothingConfig config_from_json(const json& j, SmoothingConfig base) {
    if (!j.is_object()) {
        fail(ErrorCode::ParseError, "smoothing config must be a JSON object");
    }
    reject_unknown(j,
                   {"lambda", "laplacian_kind", "mode", "epochs", "batch_size", "seed",
                    "discrepancy", "nrw_lambda_scaling", "tolerance"},
                   "smoothing config");
    if (j.contains("lambda")) base.lambda = get_field<double>(j, "lambda");
    if (j.contains("epochs")) base.epochs = get_field<int>(j, "epochs");
    if (j.contains("batch_size")) base.batch_size = get_field<Index>(j, "batch_size");
    if (j.contains("seed")) base.seed = get_field<std::uint64_t>(j, "seed");
    if (j.contains("nrw_lambda_scaling"))
        base.nrw_lambda_scaling = get_field<bool>(j, "nrw_lambda_scaling");
    if (j.contains("tolerance")) base.tolerance = get_field<double>(j, "tolerance");
    if (j.contains("laplacian_kind")) {
        const auto v = get_field<std::string>(j, "laplacian_kind");
        if (v == "unnormalized") {
            base.laplacian_kind = LaplacianKind::unnormalized;
        } else if (v == "normalized_random_walk") {
            base.laplacian_kind = LaplacianKind::normalized_random_walk;
        } else {
            fail(ErrorCode::ParseError, "unknown laplacian_kind '" + v + "'");
        }
    }
    if (j.contains("mode")) {
        const auto v = get_field<std::string>(j, "mode");
        if (v == "closed_form") {
            base.mode = SolveMode::closed_form;
        } else if (v == "coordinate_descent") {
            base.mode = SolveMode::coordinate_descent;
        } else {
            fail(ErrorCode::ParseError, "unknown mode '" + v + "'");
        }
    }
    if (j.contains("discrepancy")) {
        const auto v = get_field<std::string>(j, "discrepancy");
        if (v == "squared") {
            base.discrepancy = Discrepancy::squared;
        } else if (v == "kl") {
            base.discrepancy = Discrepancy::kl;
        } else {
            fail(ErrorCode::ParseError, "unknown discrepancy '" + v + "'");
        }
    }
    return base;
}

json config_to_json(const SmoothingConfig& c) {
    return json{{"lambda", c.lambda},
                {"laplacian_kind", to_string(c.laplacian_kind)},
                {"mode", to_string(c.mode)},
                {"epochs", c.epochs},
                {"batch_size", c.batch_size},
                {"seed", c.seed},
                {"discrepancy", to_string(c.discrepancy)},
                {"nrw_lambda_scaling", c.nrw_lambda_scaling},
                {"tolerance", c.tolerance}};
}

json smooth_metadata(const SmoothingConfig& config, const SmoothResult& result) {
    json j;
    j["config"] = config_to_json(config);
    j["lambda"] = result.lambda;
    j["effective_lambda"] = result.effective_lambda;
    j["average_degree"] = result.average_degree;
    j["laplacian_kind"] = to_string(config.laplacian_kind);
    j["discrepancy"] = to_string(config.discrepancy);
    j["mode"] = to_string(config.mode);
    j["mode_used"] = to_string(result.mode_used);
    j["epochs_used"] = result.epochs_used;
    j["final_residual"] = result.residual;
    j["fallback"] = result.fell_back;
    j["warnings"] = result.warnings;
    return j;
}

json report_to_json(const EvaluationReport& r) {
    json j = json::object();
    if (r.accuracy) j["accuracy"] = *r.accuracy;
    if (r.balanced_accuracy) {
        j["balanced_accuracy"] = *r.balanced_accuracy;
        if (!r.balanced_accuracy_excluded_classes.empty()) {
            j["balanced_accuracy_excluded_classes"] = r.balanced_accuracy_excluded_classes;
        }
    }
    if (r.prediction_consistency) j["prediction_consistency"] = *r.prediction_consistency;
    if (r.output_std) j["output_std"] = *r.output_std;
    if (r.group_gap) j["group_gap"] = *r.group_gap;
    if (r.violation_histogram) {
        json bins = json::array();
        for (const auto& b : *r.violation_histogram) {
            bins.push_back(json::array({b.lo, b.hi, b.total, b.violated}));
        }
        j["violation_histogram"] = std::move(bins);
    }
    return j;
}

std::string format_convergence_csv(const std::vector<ConvergenceRow>& rows) {
    std::string out = "kind,n,sigma,empirical_mean,empirical_std,analytic,relative_error\n";
    for (const auto& r : rows) {
        out += to_string(r.kind) + ',' + std::to_string(r.n) + ',' + format_double(r.sigma) + ',' +
               format_double(r.empirical_mean) + ',' + format_double(r.empirical_std) + ',' +
               format_double(r.analytic) + ',' + format_double(r.relative_error) + '\n';
    }
    return out;
}

json aggregate_reports(const std::vector<json>& reports) {
    if (reports.empty()) {
        fail(ErrorCode::InvalidParameter, "aggregate needs at least one report");
    }
    std::map<std::string, std::vector<double>> values;
    for (const auto& [key, value] : reports.front().items()) {
        if (value.is_number()) {
            values[key];
        }
    }
    for (const auto& r : reports) {
        for (auto& [key, list] : values) {
            if (r.contains(key) && r.at(key).is_number()) {
                list.push_back(r.at(key).get<double>());
            }
        }
    }
    json out = json::object();
    for (const auto& [key, list] : values) {
        if (list.size() != reports.size()) {
            continue;  // field missing from some report
        }
        double mean = 0.0;
        for (double v : list) mean += v;
        mean /= static_cast<double>(list.size());
        double ss = 0.0;
        for (double v : list) ss += (v - mean) * (v - mean);
        const double sd = list.size() > 1 ? std::sqrt(ss / static_cast<double>(list.size() - 1)) : 0.0;
        out[key] = json{{"mean", mean}, {"std", sd}, {"count", list.size()}};
    }
    return out;
}

std::string to_string(LaplacianKind kind) {
    return kind == LaplacianKind::unnormalized ? "unnormalized" : "normalized_random_walk";
}

std::string to_string(SolveMode mode) {
    return mode == SolveMode::closed_form ? "closed_form" : "coordinate_descent";
}

std::string to_string(Discrepancy d) {
    return d == Discrepancy::squared ? "squared" : "kl";
}

std::string to_string(MetricKind kind) {
    switch (kind) {
        case MetricKind::euclidean: return "euclidean";
        case MetricKind::mahalanobis: return "mahalanobis";
        case MetricKind::projection_complement: return "projection_complement";
    }
    return "unknown";
}

}  // namespace glif::io
