#pragma once

#include "glif/laplacian.hpp"
#include "glif/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace glif {

enum class SolveMode { closed_form, coordinate_descent };
enum class Discrepancy { squared, kl };

struct SmoothingConfig {
    double lambda = 0.0;
    LaplacianKind laplacian_kind = LaplacianKind::unnormalized;
    SolveMode mode = SolveMode::closed_form;
    int epochs = 10;
    Index batch_size = 256;
    std::uint64_t seed = 0;
    Discrepancy discrepancy = Discrepancy::squared;
    // Only consulted for the normalized random-walk Laplacian.
    bool nrw_lambda_scaling = true;
    double tolerance = 1e-9;
    // Largest n for which the dense closed form is attempted.
    Index dense_limit = 10000;
    // Retry with coordinate descent when the closed form is not PD.
    bool allow_fallback = true;
};

void validate(const SmoothingConfig& config);

/// Regularization strength actually used: lambda times the average degree
/// of the source graph for NRW with scaling enabled, lambda otherwise.
double effective_lambda(const SmoothingConfig& config, const LaplacianOperator& laplacian);

/// (I + lambda (L + L^T)/2)^{-1} yhat via one dense Cholesky factorization
/// shared by all columns. Throws NotPositiveDefinite with the failing pivot.
OutputMatrix smooth_closed_form(const OutputMatrix& yhat, const LaplacianOperator& laplacian,
                                double lambda);

struct CoordinateDescentOptions {
    int epochs = 10;
    Index batch_size = 256;
    std::uint64_t seed = 0;
    double tolerance = 1e-9;
    // false: visit coordinates 0..n-1 in order every epoch.
    bool shuffle = true;
};

struct CoordinateDescentResult {
    OutputMatrix values;
    int epochs_run = 0;
    double last_max_change = 0.0;
    bool converged = false;
};

/// Gauss-Seidel coordinate descent on the smoothing objective, starting
/// from yhat. Each epoch visits a seed-determined permutation of the
/// coordinates in batches; stops early once the largest coordinate change
/// in an epoch drops below `tolerance`.
CoordinateDescentResult smooth_coordinate_descent(const OutputMatrix& yhat,
                                                  const LaplacianOperator& laplacian,
                                                  double lambda,
                                                  const CoordinateDescentOptions& options);

// ||f - yhat||_F^2 + lambda tr(f^T L f)
double smoothing_objective(const OutputMatrix& yhat, const OutputMatrix& f,
                           const LaplacianOperator& laplacian, double lambda);

// max-norm of f - yhat + lambda sym(L) f
double stationarity_residual(const OutputMatrix& yhat, const OutputMatrix& f,
                             const LaplacianOperator& laplacian, double lambda);

/// One coordinate step for a new point attached to the fitted outputs by
/// `new_weights` (index into f_fixed, weight), unnormalized convention.
Vector inductive_update(const OutputMatrix& f_fixed,
                        const std::vector<std::pair<Index, double>>& new_weights,
                        const Vector& yhat_new, double lambda);

inline constexpr double kSimplexClamp = 1e-12;
inline constexpr double kSimplexRowTolerance = 1e-6;

// eta_j = log(p_j / p_K) after clamping to [1e-12, 1] and renormalizing.
Vector to_natural_params(const Vector& p);
// Softmax with an implicit zero K-th logit.
Vector from_natural_params(const Vector& eta);

Matrix to_natural_params(const OutputMatrix& probs);
OutputMatrix from_natural_params_rows(const Matrix& eta);

/// Minimizer over the simplex of
///   KL(P_y || P_{p_hat}) + (lambda/2) sum_j w_j KL(P_y || P_{q_j}),
/// computed as the weighted average of natural parameters.
Vector kl_coordinate_step(const Vector& p_hat,
                          const std::vector<std::pair<double, Vector>>& neighbors,
                          double lambda);

struct KlOptions {
    SolveMode mode = SolveMode::closed_form;
    double tolerance = 1e-9;
    std::uint64_t seed = 0;
    Index batch_size = 256;
    int max_epochs = 100000;
};

struct KlResult {
    OutputMatrix probabilities;
    Matrix natural_params;
    int epochs_run = 0;
    double residual = 0.0;
};

/// KL-divergence smoothing with the unnormalized Laplacian. The user-facing
/// lambda is the one multiplying (lambda/2) sum W_ij KL(y_i || y_j); in
/// natural-parameter space this is quadratic smoothing with lambda/2.
KlResult smooth_kl(const OutputMatrix& probs, const LaplacianOperator& laplacian, double lambda,
                   const KlOptions& options = {});

struct SmoothResult {
    OutputMatrix values;
    double lambda = 0.0;
    double effective_lambda = 0.0;
    double average_degree = 0.0;
    SolveMode mode_used = SolveMode::closed_form;
    int epochs_used = 0;
    double residual = 0.0;
    bool fell_back = false;
    std::vector<std::string> warnings;
};

/// Full pipeline for one configuration: lambda scaling, solver choice,
/// closed-form fallback to coordinate descent, and KL mode.
SmoothResult smooth(const OutputMatrix& yhat, const LaplacianOperator& laplacian,
                    const SmoothingConfig& config);

}  // namespace glif
