#pragma once

#include "glif/graph.hpp"
#include "glif/laplacian.hpp"
#include "glif/types.hpp"

#include <cstdint>
#include <vector>

namespace glif {

enum class Density { uniform_cube };
enum class TargetFunction { cosine_product, cosine_sum, constant };

/// Synthetic setting for checking the large-n limits of the scaled
/// Laplacian quadratic forms. Inputs are uniform on [0,1]^d; the target
/// functions have zero normal derivative on the cube boundary.
struct SyntheticSpec {
    Index dimension = 1;
    Density density = Density::uniform_cube;
    TargetFunction target = TargetFunction::cosine_product;
    // sigma(n) = n^{-sigma_exponent}
    double sigma_exponent = 1.0 / 6.0;
    // d x d dispersion; empty means identity.
    Matrix dispersion;

    Matrix dispersion_or_identity() const;
};

/// Throws InvalidParameter when the bandwidth rule violates n sigma^2 -> inf
/// or n sigma^{d+4} / log(1/sigma) -> inf, or when the dispersion is not
/// symmetric positive definite.
void validate(const SyntheticSpec& spec);

double bandwidth(const SyntheticSpec& spec, Index n);

Matrix sample_inputs(const SyntheticSpec& spec, Index n, std::uint64_t seed);

Vector target_values(const SyntheticSpec& spec, const Matrix& X);

/// Complete graph with normalized Gaussian weights
///   |Sigma|^{1/2} / ((2 pi)^{d/2} sigma^d) exp(-(x_i-x_j)^T Sigma (x_i-x_j) / (2 sigma^2)).
/// Pairs whose weight underflows to zero are omitted.
SimilarityGraph kernel_graph(const Matrix& X, double sigma, const Matrix& dispersion);

/// (2 / (n^2 sigma^2)) f^T L_un f, streamed over pairs without storing W.
double empirical_un_functional(const Matrix& X, const Vector& f, double sigma,
                               const Matrix& dispersion);

/// (1 / (n sigma^2)) f^T L_nrw f, streamed in two passes over pairs.
double empirical_nrw_functional(const Matrix& X, const Vector& f, double sigma,
                                const Matrix& dispersion);

struct AnalyticLimits {
    double unnormalized = 0.0;  // E[grad f^T Sigma^{-1} grad f p(x)]
    double nrw = 0.0;           // E[grad f^T Sigma^{-1} grad f]
};

AnalyticLimits analytic_limit(const SyntheticSpec& spec);

struct ConvergenceRow {
    LaplacianKind kind = LaplacianKind::unnormalized;
    Index n = 0;
    double sigma = 0.0;
    double empirical_mean = 0.0;
    double empirical_std = 0.0;  // sample std across seeds
    double analytic = 0.0;
    double relative_error = 0.0;  // |mean - analytic| / |analytic|, absolute if analytic == 0
};

/// For every n in `n_grid` and every seed, samples inputs and evaluates both
/// functionals. Seeds are evaluated concurrently; results do not depend on
/// scheduling. Rows are ordered by kind (unnormalized first), then n.
std::vector<ConvergenceRow> convergence_report(const SyntheticSpec& spec,
                                               const std::vector<Index>& n_grid,
                                               const std::vector<std::uint64_t>& seeds);

}  // namespace glif
