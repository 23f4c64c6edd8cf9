#pragma once

#include "glif/baseline.hpp"
#include "glif/evalmetrics.hpp"
#include "glif/graph.hpp"
#include "glif/metric.hpp"
#include "glif/smoother.hpp"
#include "glif/synthcheck.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace glif::io {

// Shortest form is not required; 17 significant digits round-trip doubles.
std::string format_double(double x);

std::string read_text(const std::filesystem::path& path);
// Writes through a temporary file so readers never see partial output.
void write_text(const std::filesystem::path& path, const std::string& text);

/// Numeric CSV, one row per individual, optional "c0,c1,..." header.
Matrix parse_csv_matrix(const std::string& text, const std::string& source = "<csv>");
Matrix read_csv_matrix(const std::filesystem::path& path);
std::string format_csv_matrix(const Matrix& m, bool header = true);

/// Edge list: "# n=<n>" header, then "i<TAB>j<TAB>w" lines with i < j.
SimilarityGraph parse_edge_list(const std::string& text, const std::string& source = "<edges>");
SimilarityGraph read_edge_list(const std::filesystem::path& path);
std::string format_edge_list(const SimilarityGraph& g);

/// "i<TAB>j<TAB>d" fair distances; "inf" marks an unconstrained pair.
std::vector<PairDistance> parse_distances(const std::string& text,
                                          const std::string& source = "<distances>");
std::vector<PairDistance> read_distances(const std::filesystem::path& path);
std::string format_distances(const std::vector<PairDistance>& pairs);

/// Sparse weight row for a new point: "j<TAB>w" lines.
std::vector<std::pair<Index, double>> parse_weight_row(const std::string& text,
                                                       const std::string& source = "<weights>");

struct GroupRecord {
    Index row = 0;
    std::int64_t group = 0;
    bool is_original = false;
};

/// "row_index,group_id,is_original" (header optional).
std::vector<GroupRecord> parse_groups(const std::string& text,
                                      const std::string& source = "<groups>");
GroupedPredictions make_grouped(const OutputMatrix& outputs,
                                const std::vector<GroupRecord>& records);

/// "row_index,label" (header optional); returns labels indexed by row.
std::vector<int> parse_labels(const std::string& text, Index num_rows,
                              const std::string& source = "<labels>");

/// One row index per line (or comma separated).
std::vector<Index> parse_index_list(const std::string& text, const std::string& source = "<rows>");

FairMetricSpec metric_from_json(const nlohmann::json& j);
nlohmann::json metric_to_json(const FairMetricSpec& spec);

/// Applies fields from `j` on top of `base`; unknown fields are rejected.
SmoothingConfig config_from_json(const nlohmann::json& j, SmoothingConfig base = {});
nlohmann::json config_to_json(const SmoothingConfig& config);

nlohmann::json smooth_metadata(const SmoothingConfig& config, const SmoothResult& result);

nlohmann::json report_to_json(const EvaluationReport& report);

std::string format_convergence_csv(const std::vector<ConvergenceRow>& rows);

/// Mean and sample std of every numeric top-level field across reports.
nlohmann::json aggregate_reports(const std::vector<nlohmann::json>& reports);

std::string to_string(LaplacianKind kind);
std::string to_string(SolveMode mode);
std::string to_string(Discrepancy d);
std::string to_string(MetricKind kind);

}  // namespace glif::io
