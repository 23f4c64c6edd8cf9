#pragma once

#include "glif/baseline.hpp"
#include "glif/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace glif {

/// Outputs partitioned into alteration groups; every group has exactly one
/// original member that the others are compared against.
struct GroupedPredictions {
    OutputMatrix outputs;
    std::vector<std::int64_t> group_of;
    std::vector<bool> is_original;
};

/// Predicted class of one output row: argmax for K >= 2 (lowest index wins
/// ties), `value > threshold` for K = 1.
int predicted_class(const Eigen::Ref<const Eigen::RowVectorXd>& row, double threshold = 0.5);

std::vector<int> predicted_classes(const OutputMatrix& outputs, double threshold = 0.5);

/// Fraction of groups in which every member predicts the same class as the
/// group's original.
double prediction_consistency(const GroupedPredictions& g, double threshold = 0.5);

// Population standard deviation of one column over `subset`.
double output_std(const OutputMatrix& outputs, const std::vector<Index>& subset, Index column);

// mean(A) - mean(B) on one column.
double group_gap(const OutputMatrix& outputs, const std::vector<Index>& group_a,
                 const std::vector<Index>& group_b, Index column);

double accuracy(const OutputMatrix& outputs, const std::vector<int>& labels,
                double threshold = 0.5);

struct BalancedAccuracy {
    double value = 0.0;
    // Output classes that never occur in the labels.
    std::vector<int> excluded_classes;
};

/// Unweighted mean of per-class recall over the classes present in `labels`.
BalancedAccuracy balanced_accuracy(const OutputMatrix& outputs, const std::vector<int>& labels,
                                   double threshold = 0.5);

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    std::int64_t total = 0;
    std::int64_t violated = 0;
};

/// Pairs binned by fair distance into `num_bins` equal-width bins over
/// [0, max d] (right-open, last bin closed), counting pairs with
/// ||f_i - f_j|| > lipschitz * d.
std::vector<HistogramBin> violation_histogram(const OutputMatrix& f,
                                              const std::vector<PairDistance>& distances,
                                              double lipschitz, int num_bins);

struct EvaluationReport {
    std::optional<double> accuracy;
    std::optional<double> balanced_accuracy;
    std::vector<int> balanced_accuracy_excluded_classes;
    std::optional<double> prediction_consistency;
    std::optional<double> output_std;
    std::optional<double> group_gap;
    std::optional<std::vector<HistogramBin>> violation_histogram;
};

}  // namespace glif
