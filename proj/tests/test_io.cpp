#include "glif/error.hpp"
#include "glif/io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

using glif::ErrorCode;
using glif::Matrix;
using nlohmann::json;
namespace io = glif::io;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const glif::Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::DimensionMismatch;
}

}  // namespace

TEST_CASE("format_double round-trips") {
    for (double x : {0.1, 1.0 / 3, -2.5e-300, 6.02214076e23, 0.0}) {
        CHECK(std::stod(io::format_double(x)) == x);
    }
    CHECK(io::format_double(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("csv matrices") {
    const Matrix a = io::parse_csv_matrix("c0,c1\n1,2\n3e-1,-4\n");
    REQUIRE(a.rows() == 2);
    CHECK(a(1, 0) == 0.3);
    CHECK(a(1, 1) == -4.0);
    const Matrix b = io::parse_csv_matrix("1,2\n3,4\n");
    CHECK(b.rows() == 2);
    CHECK(io::parse_csv_matrix(io::format_csv_matrix(a)) == a);
    CHECK(io::format_csv_matrix(a).rfind("c0,c1\n", 0) == 0);
    CHECK(code_of([] { io::parse_csv_matrix("1,2\n3\n"); }) == ErrorCode::ParseError);
    try {
        io::parse_csv_matrix("1,2\n3,x\n", "outputs.csv");
        FAIL("expected ParseError");
    } catch (const glif::Error& e) {
        CHECK(std::string(e.what()).find("outputs.csv:2") != std::string::npos);
    }
}

TEST_CASE("edge lists") {
    const auto g = io::parse_edge_list("# n=4\n0\t1\t0.5\n2\t3\t1e-3\n");
    CHECK(g.num_nodes() == 4);
    CHECK(g.num_edges() == 2);
    const std::string text = io::format_edge_list(g);
    CHECK(text.rfind("# n=4\n", 0) == 0);
    CHECK(io::format_edge_list(io::parse_edge_list(text)) == text);
    CHECK(io::parse_edge_list("# n=3\n").num_edges() == 0);
    CHECK(code_of([] { io::parse_edge_list("0\t1\t1\n"); }) == ErrorCode::ParseError);
    try {
        io::parse_edge_list("# n=3\n0\t1\t1\n1\t0\t1\n", "g.tsv");
        FAIL("expected an error");
    } catch (const glif::Error& e) {
        CHECK(std::string(e.what()).find("g.tsv:3") != std::string::npos);
    }
}

TEST_CASE("distances") {
    const auto d = io::parse_distances("0\t1\t0.5\n1\t2\tinf\n");
    REQUIRE(d.size() == 2);
    CHECK(std::isinf(d[1].d));
    CHECK(io::parse_distances(io::format_distances(d)).size() == 2);
}

TEST_CASE("groups, labels and index lists") {
    const auto g = io::parse_groups("row_index,group_id,is_original\n0,4,1\n1,4,0\n");
    REQUIRE(g.size() == 2);
    CHECK(g[0].group == 4);
    CHECK(g[0].is_original);
    CHECK_FALSE(g[1].is_original);
    CHECK(code_of([] { io::parse_groups("0,1,2\n"); }) == ErrorCode::ParseError);
    const auto labels = io::parse_labels("row_index,label\n1,3\n0,2\n", 2);
    CHECK(labels == std::vector<int>{2, 3});
    CHECK(code_of([] { io::parse_labels("0,1\n", 2); }) == ErrorCode::NoLabels);
    CHECK(io::parse_index_list("3\n1,2\n") == std::vector<glif::Index>{3, 1, 2});
}

TEST_CASE("metric json") {
    const auto e = io::metric_from_json(json::parse(R"({"kind":"euclidean"})"));
    CHECK(e.kind == glif::MetricKind::euclidean);
    const auto m = io::metric_from_json(json::parse(R"({"kind":"mahalanobis","sigma":[[2,0],[0,1]]})"));
    CHECK(m.sigma(0, 0) == 2.0);
    CHECK(io::metric_from_json(io::metric_to_json(m)).sigma == m.sigma);
    CHECK(code_of([] {
              io::metric_from_json(json::parse(R"({"kind":"euclidean","sigma":[[1]]})"));
          }) == ErrorCode::ParseError);
    CHECK(code_of([] { io::metric_from_json(json::parse(R"({"kind":"mahalanobis"})")); }) ==
          ErrorCode::ParseError);
    CHECK(code_of([] { io::metric_from_json(json::parse(R"({"kind":"cosine"})")); }) ==
          ErrorCode::ParseError);
}

TEST_CASE("config json") {
    const auto c = io::config_from_json(json::parse(
        R"({"lambda":2.5,"laplacian_kind":"normalized_random_walk","mode":"coordinate_descent","epochs":3,"seed":7})"));
    CHECK(c.lambda == 2.5);
    CHECK(c.laplacian_kind == glif::LaplacianKind::normalized_random_walk);
    CHECK(c.mode == glif::SolveMode::coordinate_descent);
    CHECK(c.epochs == 3);
    CHECK(c.seed == 7);
    const auto back = io::config_from_json(io::config_to_json(c));
    CHECK(back.lambda == c.lambda);
    CHECK(back.epochs == c.epochs);
    CHECK(code_of([] { io::config_from_json(json::parse(R"({"lamda":1})")); }) == ErrorCode::ParseError);
    CHECK(code_of([] { io::config_from_json(json::parse(R"({"mode":"fast"})")); }) == ErrorCode::ParseError);
}

TEST_CASE("report json omits absent fields") {
    glif::EvaluationReport r;
    r.prediction_consistency = 1.0;
    const json j = io::report_to_json(r);
    CHECK(j.contains("prediction_consistency"));
    CHECK_FALSE(j.contains("accuracy"));
    r.violation_histogram = std::vector<glif::HistogramBin>{{0.0, 1.0, 3, 1}};
    CHECK(io::report_to_json(r)["violation_histogram"][0] == json::array({0.0, 1.0, 3, 1}));
}

TEST_CASE("aggregate_reports") {
    const auto agg = io::aggregate_reports({json{{"a", 1.0}, {"b", "x"}}, json{{"a", 3.0}}});
    CHECK(agg["a"]["mean"] == 2.0);
    CHECK(agg["a"]["std"].get<double>() == doctest::Approx(std::sqrt(2.0)));
    CHECK(agg["a"]["count"] == 2);
    CHECK_FALSE(agg.contains("b"));
    CHECK(code_of([] { io::aggregate_reports({}); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("write_text and read_text") {
    const auto dir = std::filesystem::temp_directory_path() / "glif_io_test";
    std::filesystem::create_directories(dir);
    io::write_text(dir / "a.txt", "hello\n");
    CHECK(io::read_text(dir / "a.txt") == "hello\n");
    CHECK_FALSE(std::filesystem::exists(dir / "a.txt.tmp"));
    CHECK(code_of([&] { io::read_text(dir / "missing.txt"); }) == ErrorCode::ParseError);
    std::filesystem::remove_all(dir);
}
