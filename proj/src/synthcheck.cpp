#include "glif/synthcheck.hpp"

#include "glif/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>
#include <future>
#include <numbers>
#include <random>
#include <sstream>

namespace glif {

Matrix SyntheticSpec::dispersion_or_identity() const {
    if (dispersion.size() == 0) {
        return Matrix::Identity(dimension, dimension);
    }
    return dispersion;
}

void validate(const SyntheticSpec& spec) {
    if (spec.dimension < 1) {
        fail(ErrorCode::InvalidParameter, "dimension must be at least 1");
    }
    const double e = spec.sigma_exponent;
    if (!(e > 0.0)) {
        std::ostringstream msg;
        msg << "sigma exponent " << e << " must be > 0 so that sigma -> 0";
        fail(ErrorCode::InvalidParameter, msg.str());
    }
    if (!(2.0 * e < 1.0)) {
        std::ostringstream msg;
        msg << "n*sigma^2 -> inf requires 2*exponent < 1, got 2*" << e << " = " << 2.0 * e;
        fail(ErrorCode::InvalidParameter, msg.str());
    }
    const double d4 = static_cast<double>(spec.dimension) + 4.0;
    if (!(e * d4 < 1.0)) {
        std::ostringstream msg;
        msg << "n*sigma^(d+4)/log(1/sigma) -> inf requires exponent*(d+4) < 1, got " << e << "*"
            << d4 << " = " << e * d4;
        fail(ErrorCode::InvalidParameter, msg.str());
    }
    const Matrix sigma = spec.dispersion_or_identity();
    if (sigma.rows() != spec.dimension || sigma.cols() != spec.dimension) {
        fail(ErrorCode::DimensionMismatch, "dispersion must be d x d");
    }
    if (!sigma.isApprox(sigma.transpose(), 1e-12)) {
        fail(ErrorCode::NonSymmetric, "dispersion must be symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt{Eigen::MatrixXd(sigma)};
    if (llt.info() != Eigen::Success) {
        fail(ErrorCode::NotPSD, "dispersion must be positive definite");
    }
}

double bandwidth(const SyntheticSpec& spec, Index n) {
    return std::pow(static_cast<double>(n), -spec.sigma_exponent);
}

Matrix sample_inputs(const SyntheticSpec& spec, Index n, std::uint64_t seed) {
    if (n < 2) {
        fail(ErrorCode::InvalidParameter, "need at least 2 samples");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Matrix X(n, spec.dimension);
    for (Index i = 0; i < n; ++i) {
        for (Index k = 0; k < spec.dimension; ++k) {
            X(i, k) = unit(rng);
        }
    }
    return X;
}

Vector target_values(const SyntheticSpec& spec, const Matrix& X) {
    constexpr double pi = std::numbers::pi;
    Vector f(X.rows());
    for (Index i = 0; i < X.rows(); ++i) {
        switch (spec.target) {
            case TargetFunction::cosine_product: {
                double v = 1.0;
                for (Index k = 0; k < X.cols(); ++k) {
                    v *= std::cos(pi * X(i, k));
                }
                f[i] = v;
                break;
            }
            case TargetFunction::cosine_sum: {
                double v = 0.0;
                for (Index k = 0; k < X.cols(); ++k) {
                    v += std::cos(pi * X(i, k));
                }
                f[i] = v;
                break;
            }
            case TargetFunction::constant:
                f[i] = 1.0;
                break;
        }
    }
    return f;
}

namespace {

struct Kernel {
    Matrix dispersion;
    double prefactor = 0.0;
    double inv_two_sigma2 = 0.0;

    Kernel(Index d, double sigma, const Matrix& disp) : dispersion(disp) {
        if (!(sigma > 0.0)) {
            fail(ErrorCode::InvalidParameter, "bandwidth sigma must be positive");
        }
        if (dispersion.rows() != d || dispersion.cols() != d) {
            fail(ErrorCode::DimensionMismatch, "dispersion must be d x d");
        }
        const double det = Eigen::MatrixXd(dispersion).determinant();
        if (!(det > 0.0)) {
            fail(ErrorCode::NotPSD, "dispersion must have positive determinant");
        }
        prefactor = std::sqrt(det) /
                    (std::pow(2.0 * std::numbers::pi, 0.5 * static_cast<double>(d)) *
                     std::pow(sigma, static_cast<double>(d)));
        inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
    }

    double operator()(const Matrix& X, Index i, Index j) const {
        const Index d = X.cols();
        double q = 0.0;
        for (Index a = 0; a < d; ++a) {
            const double da = X(i, a) - X(j, a);
            double row = 0.0;
            for (Index b = 0; b < d; ++b) {
                row += dispersion(a, b) * (X(i, b) - X(j, b));
            }
            q += da * row;
        }
        return prefactor * std::exp(-q * inv_two_sigma2);
    }
};

void check_values(const Matrix& X, const Vector& f) {
    if (f.size() != X.rows()) {
        fail(ErrorCode::DimensionMismatch, "function values do not match the sample count");
    }
}

}  // namespace

SimilarityGraph kernel_graph(const Matrix& X, double sigma, const Matrix& dispersion) {
    const Kernel kernel(X.cols(), sigma, dispersion);
    const Index n = X.rows();
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const double w = kernel(X, i, j);
            if (w > 0.0) {
                edges.push_back({i, j, w});
            }
        }
    }
    return SimilarityGraph(n, std::move(edges));
}

double empirical_un_functional(const Matrix& X, const Vector& f, double sigma,
                               const Matrix& dispersion) {
    check_values(X, f);
    const Kernel kernel(X.cols(), sigma, dispersion);
    const Index n = X.rows();
    // f^T L_un f = sum_{i<j} W_ij (f_i - f_j)^2
    double form = 0.0;
    for (Index i = 0; i < n; ++i) {
        double row = 0.0;
        for (Index j = i + 1; j < n; ++j) {
            const double diff = f[i] - f[j];
            row += kernel(X, i, j) * diff * diff;
        }
        form += row;
    }
    const double nn = static_cast<double>(n);
    return 2.0 * form / (nn * nn * sigma * sigma);
}

double empirical_nrw_functional(const Matrix& X, const Vector& f, double sigma,
                                const Matrix& dispersion) {
    check_values(X, f);
    const Kernel kernel(X.cols(), sigma, dispersion);
    const Index n = X.rows();

    Vector deg = Vector::Zero(n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const double w = kernel(X, i, j);
            deg[i] += w;
            deg[j] += w;
        }
    }
    Vector inv_sqrt = Vector::Zero(n);
    for (Index i = 0; i < n; ++i) {
        if (deg[i] > 0.0) {
            inv_sqrt[i] = 1.0 / std::sqrt(deg[i]);
        }
    }
    // Second pass: normalized degrees and (W~ f)_i.
    Vector norm_deg = Vector::Zero(n);
    Vector smoothed = Vector::Zero(n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const double w = kernel(X, i, j) * inv_sqrt[i] * inv_sqrt[j];
            norm_deg[i] += w;
            norm_deg[j] += w;
            smoothed[i] += w * f[j];
            smoothed[j] += w * f[i];
        }
    }
    double form = 0.0;
    for (Index i = 0; i < n; ++i) {
        if (deg[i] > 0.0 && norm_deg[i] > 0.0) {
            form += f[i] * f[i] - f[i] * smoothed[i] / norm_deg[i];
        }
    }
    return form / (static_cast<double>(n) * sigma * sigma);
}

AnalyticLimits analytic_limit(const SyntheticSpec& spec) {
    if (spec.density != Density::uniform_cube) {
        fail(ErrorCode::UnsupportedSpec, "analytic limits are only available for uniform_cube");
    }
    const Matrix sigma = spec.dispersion_or_identity();
    if (sigma.rows() != spec.dimension || sigma.cols() != spec.dimension) {
        fail(ErrorCode::DimensionMismatch, "dispersion must be d x d");
    }
    Eigen::LLT<Eigen::MatrixXd> llt{Eigen::MatrixXd(sigma)};
    if (llt.info() != Eigen::Success) {
        fail(ErrorCode::UnsupportedSpec, "analytic limits need an invertible dispersion");
    }
    const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(spec.dimension, spec.dimension));
    constexpr double pi = std::numbers::pi;
    double value = 0.0;
    switch (spec.target) {
        case TargetFunction::constant:
            value = 0.0;
            break;
        case TargetFunction::cosine_product:
            // E[sin cos] = 0 kills cross terms; E[sin^2] = E[cos^2] = 1/2.
            value = pi * pi * inv.trace() / std::pow(2.0, static_cast<double>(spec.dimension));
            break;
        case TargetFunction::cosine_sum: {
            // E[sin^2(pi x)] = 1/2, E[sin(pi x)] = 2/pi.
            double off = inv.sum() - inv.trace();
            value = pi * pi * inv.trace() / 2.0 + 4.0 * off;
            break;
        }
    }
    // p == 1 on the unit cube, so both expectations coincide.
    return {value, value};
}

std::vector<ConvergenceRow> convergence_report(const SyntheticSpec& spec,
                                               const std::vector<Index>& n_grid,
                                               const std::vector<std::uint64_t>& seeds) {
    validate(spec);
    if (seeds.size() < 3) {
        fail(ErrorCode::InvalidParameter, "convergence report needs at least 3 seeds");
    }
    if (n_grid.empty()) {
        fail(ErrorCode::InvalidParameter, "n_grid is empty");
    }
    for (std::size_t k = 0; k < n_grid.size(); ++k) {
        if (n_grid[k] < 2 || (k > 0 && n_grid[k] <= n_grid[k - 1])) {
            fail(ErrorCode::InvalidParameter, "n_grid must be strictly increasing with n >= 2");
        }
    }
    const AnalyticLimits limits = analytic_limit(spec);
    const Matrix dispersion = spec.dispersion_or_identity();

    std::vector<ConvergenceRow> un_rows;
    std::vector<ConvergenceRow> nrw_rows;
    for (Index n : n_grid) {
        const double sigma = bandwidth(spec, n);
        std::vector<std::future<std::pair<double, double>>> jobs;
        jobs.reserve(seeds.size());
        for (std::uint64_t seed : seeds) {
            jobs.push_back(std::async(std::launch::async, [&spec, &dispersion, n, sigma, seed] {
                const Matrix X = sample_inputs(spec, n, seed);
                const Vector f = target_values(spec, X);
                return std::make_pair(empirical_un_functional(X, f, sigma, dispersion),
                                      empirical_nrw_functional(X, f, sigma, dispersion));
            }));
        }
        Vector un(static_cast<Index>(seeds.size()));
        Vector nrw(static_cast<Index>(seeds.size()));
        for (std::size_t s = 0; s < jobs.size(); ++s) {
            const auto [a, b] = jobs[s].get();
            un[static_cast<Index>(s)] = a;
            nrw[static_cast<Index>(s)] = b;
        }
        auto summarize = [&](LaplacianKind kind, const Vector& values, double analytic) {
            ConvergenceRow row;
            row.kind = kind;
            row.n = n;
            row.sigma = sigma;
            row.empirical_mean = values.mean();
            const double ss = (values.array() - row.empirical_mean).square().sum();
            row.empirical_std = std::sqrt(ss / static_cast<double>(values.size() - 1));
            row.analytic = analytic;
            const double err = std::abs(row.empirical_mean - analytic);
            row.relative_error = analytic != 0.0 ? err / std::abs(analytic) : err;
            return row;
        };
        un_rows.push_back(summarize(LaplacianKind::unnormalized, un, limits.unnormalized));
        nrw_rows.push_back(summarize(LaplacianKind::normalized_random_walk, nrw, limits.nrw));
    }
    un_rows.insert(un_rows.end(), nrw_rows.begin(), nrw_rows.end());
    return un_rows;
}

}  // namespace glif
