#include "glif/evalmetrics.hpp"

#include "glif/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace glif {

int predicted_class(const Eigen::Ref<const Eigen::RowVectorXd>& row, double threshold) {
    if (row.size() == 0) {
        fail(ErrorCode::DimensionMismatch, "cannot predict from an empty output row");
    }
    if (row.size() == 1) {
        return row[0] > threshold ? 1 : 0;
    }
    Index best = 0;
    for (Index c = 1; c < row.size(); ++c) {
        if (row[c] > row[best]) {
            best = c;
        }
    }
    return static_cast<int>(best);
}

std::vector<int> predicted_classes(const OutputMatrix& outputs, double threshold) {
    std::vector<int> out(static_cast<std::size_t>(outputs.rows()));
    for (Index i = 0; i < outputs.rows(); ++i) {
        out[static_cast<std::size_t>(i)] = predicted_class(outputs.row(i), threshold);
    }
    return out;
}

double prediction_consistency(const GroupedPredictions& g, double threshold) {
    const auto n = static_cast<std::size_t>(g.outputs.rows());
    if (g.group_of.size() != n || g.is_original.size() != n) {
        fail(ErrorCode::DimensionMismatch, "group assignment does not cover every output row");
    }
    const std::vector<int> cls = predicted_classes(g.outputs, threshold);

    std::map<std::int64_t, std::optional<std::size_t>> original;
    for (std::size_t r = 0; r < n; ++r) {
        auto& slot = original[g.group_of[r]];
        if (g.is_original[r]) {
            if (slot) {
                std::ostringstream msg;
                msg << "group " << g.group_of[r] << " has more than one original";
                fail(ErrorCode::InvalidParameter, msg.str());
            }
            slot = r;
        }
    }
    if (original.empty()) {
        fail(ErrorCode::EmptyGroup, "no groups to evaluate");
    }
    for (const auto& [group, orig] : original) {
        if (!orig) {
            std::ostringstream msg;
            msg << "group " << group << " has no original member";
            fail(ErrorCode::EmptyGroup, msg.str());
        }
    }
    std::map<std::int64_t, bool> consistent;
    for (const auto& [group, orig] : original) {
        consistent[group] = true;
    }
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t orig = *original[g.group_of[r]];
        if (cls[r] != cls[orig]) {
            consistent[g.group_of[r]] = false;
        }
    }
    std::size_t ok = 0;
    for (const auto& [group, flag] : consistent) {
        ok += flag ? 1 : 0;
    }
    return static_cast<double>(ok) / static_cast<double>(consistent.size());
}

namespace {

void check_subset(const OutputMatrix& outputs, const std::vector<Index>& subset, Index column,
                  const char* what) {
    if (subset.empty()) {
        std::ostringstream msg;
        msg << what << " is empty";
        fail(ErrorCode::EmptySubset, msg.str());
    }
    if (column < 0 || column >= outputs.cols()) {
        std::ostringstream msg;
        msg << "column " << column << " out of range for " << outputs.cols() << " columns";
        fail(ErrorCode::IndexOutOfRange, msg.str());
    }
    for (Index r : subset) {
        if (r < 0 || r >= outputs.rows()) {
            std::ostringstream msg;
            msg << what << " references row " << r << " of " << outputs.rows();
            fail(ErrorCode::IndexOutOfRange, msg.str());
        }
    }
}

double column_mean(const OutputMatrix& outputs, const std::vector<Index>& subset, Index column) {
    double acc = 0.0;
    for (Index r : subset) {
        acc += outputs(r, column);
    }
    return acc / static_cast<double>(subset.size());
}

void check_labels(const OutputMatrix& outputs, const std::vector<int>& labels) {
    if (labels.empty()) {
        fail(ErrorCode::NoLabels, "no labels supplied");
    }
    if (labels.size() != static_cast<std::size_t>(outputs.rows())) {
        std::ostringstream msg;
        msg << labels.size() << " labels for " << outputs.rows() << " output rows";
        fail(ErrorCode::DimensionMismatch, msg.str());
    }
    const int classes = outputs.cols() == 1 ? 2 : static_cast<int>(outputs.cols());
    for (std::size_t r = 0; r < labels.size(); ++r) {
        if (labels[r] < 0 || labels[r] >= classes) {
            std::ostringstream msg;
            msg << "label " << labels[r] << " on row " << r << " is not a class id in [0,"
                << classes << ")";
            fail(ErrorCode::InvalidParameter, msg.str());
        }
    }
}

}  // namespace

double output_std(const OutputMatrix& outputs, const std::vector<Index>& subset, Index column) {
    check_subset(outputs, subset, column, "subset");
    const double mean = column_mean(outputs, subset, column);
    double acc = 0.0;
    for (Index r : subset) {
        const double dev = outputs(r, column) - mean;
        acc += dev * dev;
    }
    return std::sqrt(acc / static_cast<double>(subset.size()));
}

double group_gap(const OutputMatrix& outputs, const std::vector<Index>& group_a,
                 const std::vector<Index>& group_b, Index column) {
    check_subset(outputs, group_a, column, "group A");
    check_subset(outputs, group_b, column, "group B");
    return column_mean(outputs, group_a, column) - column_mean(outputs, group_b, column);
}

double accuracy(const OutputMatrix& outputs, const std::vector<int>& labels, double threshold) {
    check_labels(outputs, labels);
    const std::vector<int> cls = predicted_classes(outputs, threshold);
    std::size_t hits = 0;
    for (std::size_t r = 0; r < labels.size(); ++r) {
        hits += cls[r] == labels[r] ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

BalancedAccuracy balanced_accuracy(const OutputMatrix& outputs, const std::vector<int>& labels,
                                   double threshold) {
    check_labels(outputs, labels);
    const std::vector<int> cls = predicted_classes(outputs, threshold);
    std::map<int, std::pair<std::size_t, std::size_t>> per_class;  // hits, support
    for (std::size_t r = 0; r < labels.size(); ++r) {
        auto& [hits, support] = per_class[labels[r]];
        ++support;
        hits += cls[r] == labels[r] ? 1 : 0;
    }
    BalancedAccuracy out;
    double acc = 0.0;
    for (const auto& [label, counts] : per_class) {
        acc += static_cast<double>(counts.first) / static_cast<double>(counts.second);
    }
    out.value = acc / static_cast<double>(per_class.size());
    const int classes = outputs.cols() == 1 ? 2 : static_cast<int>(outputs.cols());
    for (int c = 0; c < classes; ++c) {
        if (!per_class.count(c)) {
            out.excluded_classes.push_back(c);
        }
    }
    return out;
}

std::vector<HistogramBin> violation_histogram(const OutputMatrix& f,
                                              const std::vector<PairDistance>& distances,
                                              double lipschitz, int num_bins) {
    if (distances.empty()) {
        fail(ErrorCode::EmptyPairs, "violation histogram needs at least one pair");
    }
    if (!(lipschitz > 0.0)) {
        fail(ErrorCode::InvalidParameter, "Lipschitz constant must be positive");
    }
    if (num_bins < 1) {
        fail(ErrorCode::InvalidParameter, "num_bins must be at least 1");
    }
    double max_d = 0.0;
    for (const auto& p : distances) {
        if (p.i < 0 || p.j < 0 || p.i >= f.rows() || p.j >= f.rows()) {
            std::ostringstream msg;
            msg << "pair (" << p.i << "," << p.j << ") out of range for " << f.rows() << " rows";
            fail(ErrorCode::IndexOutOfRange, msg.str());
        }
        if (!(p.d >= 0.0) || !std::isfinite(p.d)) {
            std::ostringstream msg;
            msg << "pair (" << p.i << "," << p.j << ") has invalid distance " << p.d;
            fail(ErrorCode::InvalidParameter, msg.str());
        }
        max_d = std::max(max_d, p.d);
    }
    std::vector<HistogramBin> bins(static_cast<std::size_t>(num_bins));
    const double width = max_d / num_bins;
    for (int b = 0; b < num_bins; ++b) {
        bins[b].lo = width * b;
        bins[b].hi = (b + 1 == num_bins) ? max_d : width * (b + 1);
    }
    for (const auto& p : distances) {
        int b = 0;
        if (width > 0.0) {
            b = static_cast<int>(std::floor(p.d / width));
            b = std::clamp(b, 0, num_bins - 1);
            // Guard against rounding in p.d / width at bin edges.
            while (b > 0 && p.d < bins[b].lo) {
                --b;
            }
            while (b + 1 < num_bins && p.d >= bins[b + 1].lo) {
                ++b;
            }
        }
        auto& bin = bins[static_cast<std::size_t>(b)];
        ++bin.total;
        const double dist = (f.row(p.i) - f.row(p.j)).norm();
        if (dist > lipschitz * p.d) {
            ++bin.violated;
        }
    }
    return bins;
}

}  // namespace glif
