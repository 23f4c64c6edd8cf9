#include "glif/io.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using glif::Matrix;
using nlohmann::json;
namespace io = glif::io;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

class Workspace {
public:
    Workspace() {
        static int counter = 0;
        dir_ = fs::temp_directory_path() / ("glif_cli_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter++));
        fs::create_directories(dir_);
    }
    ~Workspace() { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string put(const std::string& name, const std::string& text) const {
        std::ofstream(path(name)) << text;
        return path(name);
    }

    std::string get(const std::string& name) const { return io::read_text(path(name)); }

    Run run(const std::string& args) const {
        const std::string cmd = std::string("\"") + GLIF_CLI_PATH + "\" " + args + " >\"" +
                                path("stdout") + "\" 2>\"" + path("stderr") + "\"";
        const int status = std::system(cmd.c_str());
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, get("stdout"), get("stderr")};
    }

private:
    fs::path dir_;
};

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("cli graph build") {
    Workspace w;
    w.put("same.csv", "c0,c1\n1,2\n1,2\n");
    auto r = w.run("graph build --embeddings " + w.path("same.csv") + " --tau 0.5 --out " + w.path("g.tsv"));
    REQUIRE(r.code == 0);
    CHECK(w.get("g.tsv") == "# n=2\n0\t1\t1\n");

    w.put("far.csv", "0,0\n5,0\n0,7\n");
    r = w.run("graph build --embeddings " + w.path("far.csv") + " --tau 1");
    CHECK(r.code == 0);
    CHECK(r.out == "# n=3\n");

    w.put("pts.csv", "0,0\n1,0\n0,1\n0.5,0.5\n");
    w.put("metric.json", R"({"kind":"mahalanobis","sigma":[[2,0],[0,0.5]]})");
    const std::string args = "graph build --embeddings " + w.path("pts.csv") + " --metric " +
                             w.path("metric.json") + " --theta 0.7 --tau inf";
    const auto a = w.run(args);
    const auto b = w.run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(io::parse_edge_list(a.out).num_edges() == 6);

    r = w.run("graph build --embeddings " + w.path("pts.csv") + " --tau 1 --theta -1");
    CHECK(r.code == 1);
    CHECK(r.err.find("code=InvalidParameter") != std::string::npos);

    w.put("bad.csv", "0,0\n1,x\n");
    r = w.run("graph build --embeddings " + w.path("bad.csv") + " --tau 1");
    CHECK(r.code == 1);
    CHECK(r.err.find("code=ParseError") != std::string::npos);
    CHECK(r.err.find(":2:") != std::string::npos);
}

TEST_CASE("cli graph annotate") {
    Workspace w;
    w.put("pairs.tsv", "0\t1\n1\t0\n2\t3\n");
    const auto r = w.run("graph annotate --pairs " + w.path("pairs.tsv") + " --n 4");
    CHECK(r.code == 0);
    CHECK(r.out == "# n=4\n0\t1\t1\n2\t3\t1\n");
}

TEST_CASE("cli smooth") {
    Workspace w;
    w.put("g.tsv", "# n=4\n0\t1\t1\n1\t2\t0.5\n2\t3\t0.25\n0\t3\t0.1\n");
    w.put("y.csv", "c0,c1\n0.2,1\n0.9,-1\n0.4,3\n-0.5,0.25\n");
    const Matrix y = io::read_csv_matrix(w.path("y.csv"));
    const std::string base = "smooth --graph " + w.path("g.tsv") + " --outputs " + w.path("y.csv");

    auto r = w.run(base + " --lambda 0 --out " + w.path("f0.csv"));
    REQUIRE(r.code == 0);
    CHECK(io::read_csv_matrix(w.path("f0.csv")) == y);
    const json meta = json::parse(w.get("f0.csv.meta.json"));
    CHECK(meta["lambda"] == 0.0);
    CHECK(meta["mode_used"] == "closed_form");
    CHECK(meta["fallback"] == false);

    r = w.run(base + " --lambda 2 --out " + w.path("cf.csv"));
    REQUIRE(r.code == 0);
    r = w.run(base + " --lambda 2 --mode coordinate_descent --epochs 100000 --tolerance 1e-13 --out " +
              w.path("cd.csv") + " --meta " + w.path("cd.json"));
    REQUIRE(r.code == 0);
    CHECK(max_abs(io::read_csv_matrix(w.path("cf.csv")) - io::read_csv_matrix(w.path("cd.csv"))) < 1e-6);
    CHECK(json::parse(w.get("cd.json"))["mode_used"] == "coordinate_descent");

    w.put("cfg.json", R"({"lambda": 2, "laplacian_kind": "normalized_random_walk", "epochs": 4})");
    r = w.run(base + " --config " + w.path("cfg.json") + " --lambda 3 --out " + w.path("n.csv"));
    REQUIRE(r.code == 0);
    const json nm = json::parse(w.get("n.csv.meta.json"));
    CHECK(nm["lambda"] == 3.0);
    CHECK(nm["config"]["epochs"] == 4);
    CHECK(nm["effective_lambda"].get<double>() == doctest::Approx(3.0 * (2 * 1.85) / 4));

    w.put("y3.csv", "1\n2\n3\n");
    r = w.run("smooth --graph " + w.path("g.tsv") + " --outputs " + w.path("y3.csv") + " --lambda 1");
    CHECK(r.code == 1);
    CHECK(r.err.find("code=RowCountMismatch") != std::string::npos);

    w.put("p.csv", "0.5,0.5\n0.5,0.6\n0.1,0.9\n1,0\n");
    r = w.run("smooth --graph " + w.path("g.tsv") + " --outputs " + w.path("p.csv") +
              " --lambda 1 --discrepancy kl");
    CHECK(r.code == 1);
    CHECK(r.err.find("code=InvalidSimplexRow") != std::string::npos);
    CHECK(r.err.find("row 1") != std::string::npos);

    r = w.run(base + " --lambda 1 --config " + w.path("missing.json"));
    CHECK(r.code == 1);
    r = w.run(base + " --lambda 1 --mode fast");
    CHECK(r.code == 1);
}

TEST_CASE("cli smooth without fallback exits with a numerical error") {
    Workspace w;
    w.put("g.tsv", "# n=5\n0\t3\t5.082722\n0\t4\t0.101391\n1\t3\t0.013907\n2\t3\t28.569636\n3\t4\t14419.218032\n");
    w.put("y.csv", "1\n-1\n0.5\n2\n0\n");
    const std::string base = "smooth --graph " + w.path("g.tsv") + " --outputs " + w.path("y.csv") +
                             " --laplacian-kind normalized_random_walk --nrw-lambda-scaling false --lambda 20";
    auto r = w.run(base + " --no-fallback");
    CHECK(r.code == 2);
    CHECK(r.err.find("code=NotPositiveDefinite") != std::string::npos);
    r = w.run(base + " --epochs 2 --out " + w.path("f.csv"));
    CHECK(r.code == 0);
    CHECK(r.err.find("warning") != std::string::npos);
    CHECK(json::parse(w.get("f.csv.meta.json"))["fallback"] == true);
}

TEST_CASE("cli smooth inductive") {
    Workspace w;
    w.put("fitted.csv", "c0\n1\n3\n");
    w.put("zero.tsv", "0\t0\n1\t0\n");
    w.put("one.tsv", "0\t1\n");
    const std::string fitted = " --fitted " + w.path("fitted.csv");
    auto r = w.run("smooth inductive" + fitted + " --weights " + w.path("zero.tsv") + " --yhat-new 0.25 --lambda 4");
    CHECK(r.code == 0);
    CHECK(io::parse_csv_matrix(r.out)(0, 0) == 0.25);
    r = w.run("smooth inductive" + fitted + " --weights " + w.path("one.tsv") + " --yhat-new 0 --lambda 1");
    CHECK(io::parse_csv_matrix(r.out)(0, 0) == 0.5);
    r = w.run("smooth inductive" + fitted + " --weights " + w.path("one.tsv") + " --yhat-new 0.7 --lambda 0");
    CHECK(io::parse_csv_matrix(r.out)(0, 0) == 0.7);
}

TEST_CASE("cli baseline project") {
    Workspace w;
    w.put("y.csv", "c0\n0\n1\n");
    w.put("d.tsv", "0\t1\t1\n");
    auto r = w.run("baseline project --distances " + w.path("d.tsv") + " --outputs " + w.path("y.csv") +
                   " --lipschitz 0.5");
    REQUIRE(r.code == 0);
    const Matrix f = io::parse_csv_matrix(r.out);
    CHECK(f(0, 0) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(f(1, 0) == doctest::Approx(0.75).epsilon(1e-10));

    r = w.run("baseline project --distances " + w.path("d.tsv") + " --outputs " + w.path("y.csv") +
              " --lipschitz 2 --out " + w.path("same.csv"));
    CHECK(r.code == 0);
    CHECK(io::read_csv_matrix(w.path("same.csv")) == io::read_csv_matrix(w.path("y.csv")));

    w.put("x.csv", "0\n1\n");
    r = w.run("baseline project --embeddings " + w.path("x.csv") + " --outputs " + w.path("y.csv") +
              " --lipschitz 0.5");
    CHECK(r.code == 0);
    CHECK(io::parse_csv_matrix(r.out)(0, 0) == doctest::Approx(0.25).epsilon(1e-10));

    r = w.run("baseline project --distances " + w.path("nope.tsv") + " --outputs " + w.path("y.csv") +
              " --lipschitz 0.5");
    CHECK(r.code == 1);
    CHECK(r.err.find("code=ParseError") != std::string::npos);

    w.put("y4.csv", "0\n10\n20\n30\n");
    w.put("d4.tsv", "0\t1\t1\n0\t2\t1\n0\t3\t1\n1\t2\t1\n1\t3\t1\n2\t3\t1\n");
    r = w.run("baseline project --distances " + w.path("d4.tsv") + " --outputs " + w.path("y4.csv") +
              " --lipschitz 0.1 --tol 1e-14 --max-iter 1");
    CHECK(r.code == 2);
    CHECK(r.err.find("code=NotConverged") != std::string::npos);
}

TEST_CASE("cli eval and aggregate") {
    Workspace w;
    w.put("y.csv", "c0\n0.9\n0.8\n0.2\n0.7\n");
    w.put("singletons.csv", "row_index,group_id,is_original\n0,0,1\n1,1,1\n2,2,1\n3,3,1\n");
    auto r = w.run("eval --outputs " + w.path("y.csv") + " --groups " + w.path("singletons.csv") +
                   " --out " + w.path("r1.json"));
    REQUIRE(r.code == 0);
    const json r1 = json::parse(w.get("r1.json"));
    CHECK(r1["prediction_consistency"] == 1.0);
    CHECK_FALSE(r1.contains("accuracy"));
    CHECK_FALSE(r1.contains("balanced_accuracy"));

    w.put("groups.csv", "0,0,1\n1,0,0\n2,1,1\n3,1,0\n");
    w.put("labels.csv", "0,1\n1,1\n2,0\n3,0\n");
    w.put("d.tsv", "0\t1\t0.1\n0\t2\t1\n1\t3\t2\n2\t3\t0.5\n0\t3\t3\n");
    w.put("a.txt", "0\n1\n");
    w.put("b.txt", "2,3\n");
    r = w.run("eval --outputs " + w.path("y.csv") + " --groups " + w.path("groups.csv") + " --labels " +
              w.path("labels.csv") + " --distances " + w.path("d.tsv") + " --lipschitz 0.2 --bins 3" +
              " --group-a " + w.path("a.txt") + " --group-b " + w.path("b.txt") + " --out " + w.path("r2.json"));
    REQUIRE(r.code == 0);
    const json r2 = json::parse(w.get("r2.json"));
    CHECK(r2["prediction_consistency"] == 0.5);
    CHECK(r2["accuracy"] == 0.75);
    CHECK(r2["group_gap"].get<double>() == doctest::Approx(0.4));
    std::int64_t total = 0;
    for (const auto& bin : r2["violation_histogram"]) total += bin[2].get<std::int64_t>();
    CHECK(total == 5);

    r = w.run("aggregate " + w.path("r1.json") + " " + w.path("r2.json"));
    REQUIRE(r.code == 0);
    const json agg = json::parse(r.out);
    CHECK(agg["prediction_consistency"]["mean"] == 0.75);
    CHECK(agg["prediction_consistency"]["count"] == 2);

    r = w.run("eval --outputs " + w.path("y.csv") + " --groups " + w.path("groups.csv") + " --distances " +
              w.path("d.tsv"));
    CHECK(r.code == 1);
}

TEST_CASE("cli check limits") {
    Workspace w;
    auto r = w.run("check limits --d 1 --function cosine_product --n-grid 200,1600 --seeds 0,1,2");
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "kind,n,sigma,empirical_mean,empirical_std,analytic,relative_error");
    std::vector<double> errors;
    for (std::string line; std::getline(lines, line);) {
        errors.push_back(std::stod(line.substr(line.rfind(',') + 1)));
    }
    REQUIRE(errors.size() == 4);
    CHECK(errors[1] < errors[0]);
    CHECK(errors[3] < errors[2]);

    r = w.run("check limits --function constant --n-grid 50,100 --seeds 0,1,2");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("constant") == std::string::npos);
    std::istringstream c(r.out);
    std::getline(c, header);
    for (std::string line; std::getline(c, line);) {
        CHECK(std::stod(line.substr(line.rfind(',') + 1)) == 0.0);
    }

    r = w.run("check limits --sigma-exponent 0.3");
    CHECK(r.code == 1);
    CHECK(r.err.find("code=InvalidParameter") != std::string::npos);
}

TEST_CASE("cli usage errors") {
    Workspace w;
    CHECK(w.run("").code == 1);
    CHECK(w.run("frobnicate").code == 1);
    CHECK(w.run("--help").code == 0);
}
