#include "glif/baseline.hpp"

#include "glif/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace glif {

std::vector<LipschitzConstraint> make_constraints(const std::vector<PairDistance>& pairs,
                                                  double lipschitz) {
    if (!(lipschitz >= 0.0)) {
        std::ostringstream msg;
        msg << "Lipschitz constant must be nonnegative, got " << lipschitz;
        fail(ErrorCode::InvalidParameter, msg.str());
    }
    std::vector<LipschitzConstraint> out;
    out.reserve(pairs.size());
    for (const PairDistance& p : pairs) {
        if (p.i == p.j) {
            std::ostringstream msg;
            msg << "distance pair (" << p.i << "," << p.j << ") is a self-pair";
            fail(ErrorCode::SelfLoop, msg.str());
        }
        if (!(p.d >= 0.0)) {
            std::ostringstream msg;
            msg << "pair (" << p.i << "," << p.j << ") has invalid distance " << p.d;
            fail(ErrorCode::InvalidParameter, msg.str());
        }
        if (std::isinf(p.d)) {
            continue;
        }
        const double bound = lipschitz * p.d;
        if (std::isinf(bound)) {
            continue;
        }
        out.push_back({std::min(p.i, p.j), std::max(p.i, p.j), bound});
    }
    return out;
}

std::pair<Vector, Vector> project_pair(const Vector& fi, const Vector& fj, double bound) {
    if (fi.size() != fj.size()) {
        fail(ErrorCode::DimensionMismatch, "project_pair: vectors differ in length");
    }
    if (!(bound >= 0.0)) {
        fail(ErrorCode::InvalidParameter, "project_pair: bound must be nonnegative");
    }
    const Vector diff = fi - fj;
    const double dist = diff.norm();
    if (dist <= bound) {
        return {fi, fj};
    }
    // Each endpoint moves (dist - bound)/2 toward the other.
    const Vector shift = (0.5 * (dist - bound) / dist) * diff;
    return {fi - shift, fj + shift};
}

namespace {

void check_indices(const std::vector<LipschitzConstraint>& constraints, Index n) {
    for (const auto& c : constraints) {
        if (c.i < 0 || c.j < 0 || c.i >= n || c.j >= n) {
            std::ostringstream msg;
            msg << "constraint (" << c.i << "," << c.j << ") out of range for n=" << n;
            fail(ErrorCode::IndexOutOfRange, msg.str());
        }
        if (c.i == c.j) {
            std::ostringstream msg;
            msg << "constraint (" << c.i << "," << c.j << ") is a self-pair";
            fail(ErrorCode::SelfLoop, msg.str());
        }
        if (!(c.bound >= 0.0)) {
            std::ostringstream msg;
            msg << "constraint (" << c.i << "," << c.j << ") has negative bound " << c.bound;
            fail(ErrorCode::InvalidParameter, msg.str());
        }
    }
}

double worst_violation(const OutputMatrix& f, const std::vector<LipschitzConstraint>& cs) {
    double worst = 0.0;
    for (const auto& c : cs) {
        const double dist = (f.row(c.i) - f.row(c.j)).norm();
        worst = std::max(worst, dist - c.bound);
    }
    return worst;
}

}  // namespace

ProjectionResult global_if_project(const OutputMatrix& yhat,
                                   const std::vector<LipschitzConstraint>& constraints,
                                   double tol, int max_iter) {
    check_indices(constraints, yhat.rows());
    if (!(tol > 0.0) || max_iter < 1) {
        fail(ErrorCode::InvalidParameter, "tolerance and max_iter must be positive");
    }
    std::vector<LipschitzConstraint> ordered = constraints;
    for (auto& c : ordered) {
        if (c.i > c.j) {
            std::swap(c.i, c.j);
        }
    }
    std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });

    const Index k = yhat.cols();
    ProjectionResult result;
    result.values = yhat;
    OutputMatrix& f = result.values;
    // Dykstra increment for each set. The projection moves f_i and f_j by
    // opposite amounts, so storing the f_i part is enough.
    Matrix corrections = Matrix::Zero(static_cast<Index>(ordered.size()), k);

    Vector yi(k);
    Vector yj(k);
    for (int sweep = 1; sweep <= max_iter; ++sweep) {
        double movement = 0.0;
        for (std::size_t idx = 0; idx < ordered.size(); ++idx) {
            const auto& c = ordered[idx];
            const Index row = static_cast<Index>(idx);
            yi = f.row(c.i).transpose() + corrections.row(row).transpose();
            yj = f.row(c.j).transpose() - corrections.row(row).transpose();
            const double dist = (yi - yj).norm();
            Vector new_i = yi;
            Vector new_j = yj;
            if (dist > c.bound) {
                const Vector shift = (0.5 * (dist - c.bound) / dist) * (yi - yj);
                new_i -= shift;
                new_j += shift;
            }
            corrections.row(row) = (yi - new_i).transpose();
            movement = std::max(movement, (new_i - f.row(c.i).transpose()).cwiseAbs().maxCoeff());
            movement = std::max(movement, (new_j - f.row(c.j).transpose()).cwiseAbs().maxCoeff());
            f.row(c.i) = new_i.transpose();
            f.row(c.j) = new_j.transpose();
        }
        result.sweeps = sweep;
        result.max_violation = worst_violation(f, ordered);
        if (result.max_violation <= tol && movement < tol) {
            return result;
        }
    }
    std::ostringstream msg;
    msg.precision(17);
    msg << "Dykstra projection did not converge in " << max_iter
        << " sweeps; worst violation " << result.max_violation;
    fail(ErrorCode::NotConverged, msg.str());
}

std::vector<Violation> count_violations(const OutputMatrix& f,
                                        const std::vector<LipschitzConstraint>& constraints,
                                        double slack) {
    check_indices(constraints, f.rows());
    std::vector<Violation> out;
    for (const auto& c : constraints) {
        const double dist = (f.row(c.i) - f.row(c.j)).norm();
        if (dist > c.bound + slack) {
            out.push_back({std::min(c.i, c.j), std::max(c.i, c.j), dist - c.bound});
        }
    }
    return out;
}

}  // namespace glif
