#include "glif/metric.hpp"

#include "glif/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace glif {

std::optional<Index> FairMetricSpec::dimension() const {
    switch (kind) {
        case MetricKind::euclidean:
            return std::nullopt;
        case MetricKind::mahalanobis:
            return sigma.rows();
        case MetricKind::projection_complement:
            return basis.cols();
    }
    return std::nullopt;
}

namespace {

void check_symmetric(const Matrix& sigma) {
    if (sigma.rows() != sigma.cols()) {
        std::ostringstream msg;
        msg << "sigma must be square, got " << sigma.rows() << "x" << sigma.cols();
        fail(ErrorCode::DimensionMismatch, msg.str());
    }
    for (Index i = 0; i < sigma.rows(); ++i) {
        for (Index j = i + 1; j < sigma.cols(); ++j) {
            const double gap = std::abs(sigma(i, j) - sigma(j, i));
            if (gap > kSymmetryTolerance) {
                std::ostringstream msg;
                msg << "sigma is not symmetric: |sigma(" << i << "," << j << ") - sigma(" << j
                    << "," << i << ")| = " << gap;
                fail(ErrorCode::NonSymmetric, msg.str());
            }
        }
    }
}

// Returns the PSD-checked matrix, rebuilt with clamped eigenvalues when any
// eigenvalue is slightly negative.
Matrix checked_psd(const Matrix& sigma) {
    if (sigma.rows() == 0) {
        return sigma;
    }
    const Eigen::MatrixXd sym = 0.5 * (sigma + sigma.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    const Eigen::VectorXd& values = eig.eigenvalues();
    const double smallest = values.minCoeff();
    if (smallest < -kPsdTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "sigma is not positive semi-definite: smallest eigenvalue " << smallest;
        fail(ErrorCode::NotPSD, msg.str());
    }
    if (smallest >= 0.0) {
        return sigma;
    }
    const Eigen::VectorXd clamped = values.cwiseMax(0.0);
    Eigen::MatrixXd rebuilt =
        eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose();
    rebuilt = 0.5 * (rebuilt + rebuilt.transpose()).eval();
    return Matrix(rebuilt);
}

void check_orthonormal(const Matrix& basis) {
    for (Index a = 0; a < basis.rows(); ++a) {
        for (Index b = a; b < basis.rows(); ++b) {
            const double dot = basis.row(a).dot(basis.row(b));
            const double expected = (a == b) ? 1.0 : 0.0;
            if (std::abs(dot - expected) > kOrthonormalTolerance) {
                std::ostringstream msg;
                msg.precision(17);
                if (a == b) {
                    msg << "basis row " << a << " has squared norm " << dot;
                } else {
                    msg << "basis rows " << a << " and " << b << " have inner product " << dot;
                }
                fail(ErrorCode::NonOrthonormalBasis, msg.str());
            }
        }
    }
}

}  // namespace

FairMetricSpec validate_metric(const FairMetricSpec& spec) {
    FairMetricSpec out = spec;
    switch (spec.kind) {
        case MetricKind::euclidean:
            out.sigma.resize(0, 0);
            out.basis.resize(0, 0);
            break;
        case MetricKind::mahalanobis:
            check_symmetric(spec.sigma);
            out.sigma = checked_psd(spec.sigma);
            out.basis.resize(0, 0);
            break;
        case MetricKind::projection_complement: {
            if (spec.basis.cols() == 0) {
                fail(ErrorCode::DimensionMismatch, "projection_complement basis has zero columns");
            }
            check_orthonormal(spec.basis);
            const Index d = spec.basis.cols();
            Matrix sigma = Matrix::Identity(d, d) - spec.basis.transpose() * spec.basis;
            sigma = 0.5 * (sigma + sigma.transpose()).eval();
            out.sigma = checked_psd(sigma);
            break;
        }
    }
    return out;
}

namespace {

template <class Diff>
double quadratic(const FairMetricSpec& metric, const Diff& diff, Index d) {
    if (metric.kind == MetricKind::euclidean) {
        double acc = 0.0;
        for (Index a = 0; a < d; ++a) {
            acc += diff[a] * diff[a];
        }
        return acc;
    }
    double acc = 0.0;
    for (Index a = 0; a < d; ++a) {
        if (diff[a] == 0.0) {
            continue;
        }
        double row = 0.0;
        for (Index b = 0; b < d; ++b) {
            row += metric.sigma(a, b) * diff[b];
        }
        acc += diff[a] * row;
    }
    // Rank-deficient or clamped Sigma can give -0 or -eps from rounding.
    return std::max(acc, 0.0);
}

void check_metric_dim(const FairMetricSpec& metric, Index d) {
    if (metric.kind != MetricKind::euclidean && metric.sigma.rows() == 0) {
        fail(ErrorCode::InvalidParameter, "metric has no sigma; call validate_metric first");
    }
    const auto dim = metric.dimension();
    if (dim && *dim != d) {
        std::ostringstream msg;
        msg << "metric dimension " << *dim << " does not match input dimension " << d;
        fail(ErrorCode::DimensionMismatch, msg.str());
    }
}

}  // namespace

double fair_distance(const FairMetricSpec& metric, const Eigen::Ref<const Vector>& x,
                     const Eigen::Ref<const Vector>& y) {
    if (x.size() != y.size()) {
        std::ostringstream msg;
        msg << "vectors have different lengths " << x.size() << " and " << y.size();
        fail(ErrorCode::DimensionMismatch, msg.str());
    }
    check_metric_dim(metric, x.size());
    const Vector diff = x - y;
    return std::sqrt(quadratic(metric, diff, diff.size()));
}

double squared_fair_distance_rows(const FairMetricSpec& metric, const Matrix& X, Index i,
                                  Index j) {
    const Index d = X.cols();
    thread_local Vector diff;
    diff.resize(d);
    for (Index a = 0; a < d; ++a) {
        diff[a] = X(i, a) - X(j, a);
    }
    return quadratic(metric, diff, d);
}

Matrix pairwise_fair_distances(const FairMetricSpec& metric, const Matrix& X, Index block_rows) {
    if (X.rows() < 1) {
        fail(ErrorCode::InvalidParameter, "pairwise distances need at least one row");
    }
    if (block_rows < 1) {
        fail(ErrorCode::InvalidParameter, "block_rows must be positive");
    }
    check_metric_dim(metric, X.cols());
    const Index n = X.rows();
    Matrix out = Matrix::Zero(n, n);
    for (Index start = 0; start < n; start += block_rows) {
        const Index stop = std::min(n, start + block_rows);
        for (Index i = start; i < stop; ++i) {
            for (Index j = i + 1; j < n; ++j) {
                const double dist = std::sqrt(squared_fair_distance_rows(metric, X, i, j));
                out(i, j) = dist;
                out(j, i) = dist;
            }
        }
    }
    return out;
}

}  // namespace glif
