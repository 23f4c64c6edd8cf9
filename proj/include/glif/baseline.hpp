#pragma once

#include "glif/types.hpp"

#include <utility>
#include <vector>

namespace glif {

/// ||f_i - f_j||_2 <= bound, with bound = L * d_X(x_i, x_j).
struct LipschitzConstraint {
    Index i = 0;
    Index j = 0;
    double bound = 0.0;
};

struct PairDistance {
    Index i = 0;
    Index j = 0;
    double d = 0.0;
};

/// Constraints for Lipschitz constant `lipschitz` over the given pairs.
/// Pairs with infinite distance are unconstrained and skipped; pairs are
/// normalized to i < j.
std::vector<LipschitzConstraint> make_constraints(const std::vector<PairDistance>& pairs,
                                                  double lipschitz);

/// Euclidean projection of (f_i, f_j) onto {||f_i - f_j|| <= bound}.
std::pair<Vector, Vector> project_pair(const Vector& fi, const Vector& fj, double bound);

struct ProjectionResult {
    OutputMatrix values;
    int sweeps = 0;
    double max_violation = 0.0;
};

inline constexpr double kDefaultProjectionTolerance = 1e-8;
inline constexpr int kDefaultProjectionSweeps = 10000;

/// Dykstra's alternating projections onto the intersection of the pairwise
/// constraint sets, sweeping constraints in lexicographic (i, j) order.
/// Throws NotConverged after `max_iter` sweeps.
ProjectionResult global_if_project(const OutputMatrix& yhat,
                                   const std::vector<LipschitzConstraint>& constraints,
                                   double tol = kDefaultProjectionTolerance,
                                   int max_iter = kDefaultProjectionSweeps);

struct Violation {
    Index i = 0;
    Index j = 0;
    double excess = 0.0;
};

std::vector<Violation> count_violations(const OutputMatrix& f,
                                        const std::vector<LipschitzConstraint>& constraints,
                                        double slack);

}  // namespace glif
