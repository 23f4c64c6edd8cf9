#pragma once

#include "glif/types.hpp"

#include <optional>

namespace glif {

enum class MetricKind { euclidean, mahalanobis, projection_complement };

/// Fair metric on the input space, d(x, x')^2 = (x - x')^T Sigma (x - x').
///
/// For `projection_complement` the rows of `basis` span the sensitive
/// subspace and the metric ignores variation inside it, i.e. Sigma = I - B^T B.
/// `validate_metric` fills `sigma` for that kind so both representations
/// evaluate identically afterwards.
struct FairMetricSpec {
    MetricKind kind = MetricKind::euclidean;
    Matrix sigma;  // d x d, mahalanobis (and canonicalized projection_complement)
    Matrix basis;  // m x d, projection_complement only

    // Input dimension the metric is defined on, or nullopt for euclidean.
    std::optional<Index> dimension() const;
};

inline constexpr double kSymmetryTolerance = 1e-9;
inline constexpr double kPsdTolerance = 1e-9;
inline constexpr double kOrthonormalTolerance = 1e-8;

/// Checks symmetry / PSD / basis orthonormality and canonicalizes.
/// Eigenvalues in [-1e-9, 0) are clamped to zero and Sigma is rebuilt from
/// the clamped eigendecomposition.
FairMetricSpec validate_metric(const FairMetricSpec& spec);

double fair_distance(const FairMetricSpec& metric,
                     const Eigen::Ref<const Vector>& x,
                     const Eigen::Ref<const Vector>& y);

// Squared distance for one pair of rows; no dimension checks.
double squared_fair_distance_rows(const FairMetricSpec& metric, const Matrix& X,
                                  Index i, Index j);

/// All pairwise fair distances, computed in blocks of `block_rows` rows.
/// Every entry is evaluated with the same summation order as fair_distance.
Matrix pairwise_fair_distances(const FairMetricSpec& metric, const Matrix& X,
                               Index block_rows = 1024);

}  // namespace glif
