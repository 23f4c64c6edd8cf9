#include "glif/baseline.hpp"
#include "glif/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using glif::ErrorCode;
using glif::Index;
using glif::LipschitzConstraint;
using glif::Matrix;
using glif::Vector;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

std::vector<LipschitzConstraint> all_pairs(Index n, double bound) {
    std::vector<LipschitzConstraint> cs;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) cs.push_back({i, j, bound});
    return cs;
}

}  // namespace

TEST_CASE("project_pair examples") {
    auto [a, b] = glif::project_pair(vec({0}), vec({0.3}), 0.5);
    CHECK(a(0) == 0.0);
    CHECK(b(0) == 0.3);
    std::tie(a, b) = glif::project_pair(vec({0}), vec({1}), 0.5);
    CHECK(a(0) == doctest::Approx(0.25));
    CHECK(b(0) == doctest::Approx(0.75));
    std::tie(a, b) = glif::project_pair(vec({0, 2}), vec({4, 0}), 0.0);
    CHECK((a - vec({2, 1})).norm() < 1e-15);
    CHECK((b - vec({2, 1})).norm() < 1e-15);
    std::tie(a, b) = glif::project_pair(vec({0, 0}), vec({3, 4}), 1.0);
    CHECK((a - b).norm() == doctest::Approx(1.0));
    CHECK((a + b - vec({3, 4})).norm() < 1e-14);
}

TEST_CASE("global_if_project examples") {
    Matrix feasible(3, 1);
    feasible << 0, 0.1, 0.2;
    const auto r = glif::global_if_project(feasible, all_pairs(3, 0.5));
    CHECK(r.values == feasible);

    Matrix two(2, 1);
    two << 0, 1;
    const auto one = glif::global_if_project(two, {{0, 1, 0.5}});
    CHECK(one.values(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(one.values(1, 0) == doctest::Approx(0.75).epsilon(1e-12));

    Matrix y(3, 1);
    y << 0, 1, 2;
    const auto p = glif::global_if_project(y, all_pairs(3, 0.5));
    const Vector qp = oracle::project_scalar_qp(y.col(0), {{0, 1, 0.5}, {0, 2, 0.5}, {1, 2, 0.5}});
    CHECK((p.values.col(0) - qp).cwiseAbs().maxCoeff() < 1e-4);
    // By symmetry the answer is (0.75, 1, 1.25).
    CHECK(p.values(0, 0) == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(p.values(2, 0) == doctest::Approx(1.25).epsilon(1e-6));
}

TEST_CASE("global_if_project errors") {
    Matrix y(2, 1);
    y << 0, 1;
    try {
        glif::global_if_project(y, {{0, 5, 0.5}});
        FAIL("expected IndexOutOfRange");
    } catch (const glif::Error& e) {
        CHECK(e.code() == ErrorCode::IndexOutOfRange);
    }
    Matrix z(4, 1);
    z << 0, 10, 20, 30;
    try {
        glif::global_if_project(z, all_pairs(4, 0.1), 1e-14, 1);
        FAIL("expected NotConverged");
    } catch (const glif::Error& e) {
        CHECK(e.code() == ErrorCode::NotConverged);
        CHECK(std::string(e.what()).find("violation") != std::string::npos);
    }
}

TEST_CASE("make_constraints skips infinite distances") {
    const auto cs = glif::make_constraints(
        {{0, 1, 2.0}, {1, 2, std::numeric_limits<double>::infinity()}}, 0.5);
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].bound == 1.0);
    CHECK_THROWS_AS(glif::make_constraints({{0, 1, 1.0}}, -1.0), glif::Error);
}

TEST_CASE("count_violations") {
    Matrix y(2, 1);
    y << 0, 1;
    const auto v = glif::count_violations(y, {{0, 1, 0.5}}, 0.0);
    REQUIRE(v.size() == 1);
    CHECK(v[0].excess == doctest::Approx(0.5));
    CHECK(glif::count_violations(y, {{0, 1, 0.5}}, std::numeric_limits<double>::infinity()).empty());
    const auto p = glif::global_if_project(y, {{0, 1, 0.5}});
    CHECK(glif::count_violations(p.values, {{0, 1, 0.5}}, 1e-6).empty());
}

TEST_CASE("Dykstra on random instances: optimality, feasibility, idempotence") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 15; ++trial) {
        const Index n = 2 + static_cast<Index>(rng() % 4);
        const Matrix y = oracle::random_matrix(n, 1, rng);
        std::vector<LipschitzConstraint> cs;
        std::vector<oracle::PairBound> pb;
        for (Index i = 0; i < n; ++i) {
            for (Index j = i + 1; j < n; ++j) {
                const double b = 0.05 + 0.5 * u(rng);
                cs.push_back({i, j, b});
                pb.push_back({i, j, b});
            }
        }
        const auto r = glif::global_if_project(y, cs, 1e-10, 100000);
        CHECK((r.values.col(0) - oracle::project_scalar_qp(y.col(0), pb)).cwiseAbs().maxCoeff() < 1e-4);
        CHECK(glif::count_violations(r.values, cs, 1e-8).empty());
        const auto again = glif::global_if_project(r.values, cs, 1e-10, 100000);
        CHECK((again.values - r.values).cwiseAbs().maxCoeff() < 1e-8);
        // Collapsing to the mean is feasible, so it cannot be closer.
        const Matrix mean = Matrix::Constant(n, 1, y.mean());
        CHECK((r.values - y).norm() <= (mean - y).norm() + 1e-9);
    }
}

TEST_CASE("vector outputs use the Euclidean row norm") {
    Matrix y(3, 2);
    y << 0, 0, 3, 4, 0, 1;
    const auto cs = all_pairs(3, 1.0);
    const auto r = glif::global_if_project(y, cs, 1e-10, 100000);
    CHECK(glif::count_violations(r.values, cs, 1e-8).empty());
}
