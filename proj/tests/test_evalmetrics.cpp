#include "glif/error.hpp"
#include "glif/evalmetrics.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using glif::ErrorCode;
using glif::GroupedPredictions;
using glif::Index;
using glif::Matrix;

namespace {

Matrix column(std::initializer_list<double> v) {
    Matrix m(static_cast<Index>(v.size()), 1);
    Index i = 0;
    for (double x : v) m(i++, 0) = x;
    return m;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const glif::Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::ParseError;
}

}  // namespace

TEST_CASE("predicted_class") {
    Eigen::RowVectorXd tie(3);
    tie << 0.2, 0.4, 0.4;
    CHECK(glif::predicted_class(tie) == 1);
    Eigen::RowVectorXd s(1);
    s << 0.5;
    CHECK(glif::predicted_class(s) == 0);
    s << 0.51;
    CHECK(glif::predicted_class(s) == 1);
    CHECK(glif::predicted_class(s, 0.6) == 0);
}

TEST_CASE("prediction_consistency examples") {
    GroupedPredictions singletons{column({0.1, 0.9, 0.3}), {0, 1, 2}, {true, true, true}};
    CHECK(glif::prediction_consistency(singletons) == 1.0);

    GroupedPredictions flipped{column({0.9, 0.8, 0.1, 0.2}), {0, 0, 1, 1}, {true, false, true, false}};
    CHECK(glif::prediction_consistency(flipped) == 1.0);
    flipped.outputs(3, 0) = 0.7;
    CHECK(glif::prediction_consistency(flipped) == 0.5);

    Matrix dup(4, 2);
    dup << 1, 2, 1, 2, 3, 0, 3, 0;
    CHECK(glif::prediction_consistency({dup, {5, 5, 7, 7}, {false, true, true, false}}) == 1.0);
}

TEST_CASE("prediction_consistency is invariant under monotone logit transforms") {
    Matrix logits(4, 3);
    logits << 1, 2, 3, 0.5, 2.5, 2.9, -1, 0, 1, 2, 1, 0;
    GroupedPredictions g{logits, {0, 0, 1, 1}, {true, false, true, false}};
    const double base = glif::prediction_consistency(g);
    g.outputs = (logits.array() * 3.0 + 7.0).matrix();
    CHECK(glif::prediction_consistency(g) == base);
    g.outputs = logits.array().exp().matrix();
    CHECK(glif::prediction_consistency(g) == base);
}

TEST_CASE("prediction_consistency errors") {
    CHECK(code_of([] {
              glif::prediction_consistency({column({1, 2}), {0, 0}, {false, false}});
          }) == ErrorCode::EmptyGroup);
    CHECK(code_of([] {
              glif::prediction_consistency({column({1, 2}), {0, 0}, {true, true}});
          }) == ErrorCode::InvalidParameter);
    CHECK(code_of([] {
              glif::prediction_consistency({column({1, 2}), {0}, {true}});
          }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("output_std examples") {
    CHECK(glif::output_std(column({2, 2, 2}), {0, 1, 2}, 0) == 0.0);
    CHECK(glif::output_std(column({0, 1, 9}), {0, 1}, 0) == 0.5);
    CHECK(glif::output_std(column({0, 1, 9}), {2}, 0) == 0.0);
    CHECK(code_of([] { glif::output_std(column({1}), {}, 0); }) == ErrorCode::EmptySubset);
    CHECK(code_of([] { glif::output_std(column({1}), {0}, 1); }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("group_gap examples") {
    const Matrix v = column({0.8, 0.8, 0.5, 0.7});
    CHECK(glif::group_gap(v, {0, 1}, {0, 1}, 0) == 0.0);
    CHECK(glif::group_gap(v, {0, 1}, {2, 3}, 0) == doctest::Approx(0.2));
    CHECK(glif::group_gap(v, {2, 3}, {0, 1}, 0) == -glif::group_gap(v, {0, 1}, {2, 3}, 0));
    CHECK(code_of([&] { glif::group_gap(v, {}, {0}, 0); }) == ErrorCode::EmptySubset);
}

TEST_CASE("balanced_accuracy examples") {
    Matrix logits(4, 2);
    logits << 1, 0, 1, 0, 0, 1, 0, 1;
    CHECK(glif::balanced_accuracy(logits, {0, 0, 1, 1}).value == 1.0);
    CHECK(glif::balanced_accuracy(logits, {0, 0, 0, 0}).value == 0.5);
    const auto single = glif::balanced_accuracy(logits, {1, 1, 1, 1});
    CHECK(single.value == 0.5);
    REQUIRE(single.excluded_classes.size() == 1);
    CHECK(single.excluded_classes[0] == 0);
    CHECK(glif::balanced_accuracy(column({0.9, 0.1, 0.2}), {1, 1, 0}).value == doctest::Approx(0.75));
    CHECK(glif::accuracy(logits, {0, 0, 0, 0}) == 0.5);
    CHECK(code_of([&] { glif::balanced_accuracy(Matrix(0, 2), {}); }) == ErrorCode::NoLabels);
}

TEST_CASE("violation_histogram examples") {
    const std::vector<glif::PairDistance> pairs{{0, 1, 0.0}, {0, 2, 1.0}, {1, 2, 2.0}, {0, 3, 0.5}};
    const auto flat = glif::violation_histogram(column({1, 1, 1, 1}), pairs, 1.0, 4);
    std::int64_t total = 0;
    for (const auto& b : flat) {
        CHECK(b.violated == 0);
        total += b.total;
    }
    CHECK(total == 4);
    CHECK(flat.front().lo == 0.0);
    CHECK(flat.back().hi == 2.0);
    CHECK(flat[0].total == 1);
    CHECK(flat[1].total == 1);
    CHECK(flat[2].total == 1);
    CHECK(flat[3].total == 1);

    const auto one = glif::violation_histogram(column({0, 3}), {{0, 1, 1.0}}, 2.25, 3);
    std::int64_t violated = 0;
    for (const auto& b : one) violated += b.violated;
    CHECK(violated == 1);
    CHECK(one.back().violated == 1);

    const auto none = glif::violation_histogram(column({0, 3}), {{0, 1, 1.0}},
                                                std::numeric_limits<double>::infinity(), 3);
    for (const auto& b : none) CHECK(b.violated == 0);

    CHECK(code_of([] { glif::violation_histogram(column({0}), {}, 1.0, 2); }) == ErrorCode::EmptyPairs);
    CHECK(code_of([&] { glif::violation_histogram(column({0, 1}), {{0, 1, 1.0}}, 0.0, 2); }) ==
          ErrorCode::InvalidParameter);
    CHECK(code_of([&] { glif::violation_histogram(column({0, 1}), {{0, 1, 1.0}}, 1.0, 0); }) ==
          ErrorCode::InvalidParameter);
}

TEST_CASE("all-zero distances fall in the first bin") {
    const auto h = glif::violation_histogram(column({0, 1}), {{0, 1, 0.0}}, 1.0, 3);
    CHECK(h[0].total == 1);
    CHECK(h[0].violated == 1);
}
