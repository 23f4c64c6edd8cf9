#include "glif/smoother.hpp"

#include "glif/error.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace glif {

void validate(const SmoothingConfig& config) {
    if (!(config.lambda >= 0.0) || !std::isfinite(config.lambda)) {
        std::ostringstream msg;
        msg << "lambda must be finite and nonnegative, got " << config.lambda;
        fail(ErrorCode::InvalidParameter, msg.str());
    }
    if (config.epochs < 1) {
        fail(ErrorCode::InvalidParameter, "epochs must be at least 1");
    }
    if (config.batch_size < 1) {
        fail(ErrorCode::InvalidParameter, "batch_size must be at least 1");
    }
    if (!(config.tolerance > 0.0)) {
        fail(ErrorCode::InvalidParameter, "tolerance must be positive");
    }
    if (config.dense_limit < 0) {
        fail(ErrorCode::InvalidParameter, "dense_limit must be nonnegative");
    }
    if (config.discrepancy == Discrepancy::kl &&
        config.laplacian_kind != LaplacianKind::unnormalized) {
        fail(ErrorCode::InvalidParameter, "kl discrepancy requires the unnormalized laplacian");
    }
}

double effective_lambda(const SmoothingConfig& config, const LaplacianOperator& laplacian) {
    if (laplacian.kind() == LaplacianKind::normalized_random_walk && config.nrw_lambda_scaling) {
        return config.lambda * laplacian.source_average_degree();
    }
    return config.lambda;
}

namespace {

void check_outputs(const OutputMatrix& yhat, const LaplacianOperator& laplacian) {
    if (yhat.rows() != laplacian.size()) {
        std::ostringstream msg;
        msg << "outputs have " << yhat.rows() << " rows but the graph has " << laplacian.size()
            << " nodes";
        fail(ErrorCode::DimensionMismatch, msg.str());
    }
    if (!yhat.allFinite()) {
        fail(ErrorCode::InvalidParameter, "outputs contain non-finite entries");
    }
}

void check_lambda(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        std::ostringstream msg;
        msg << "lambda must be finite and nonnegative, got " << lambda;
        fail(ErrorCode::InvalidParameter, msg.str());
    }
}

}  // namespace

OutputMatrix smooth_closed_form(const OutputMatrix& yhat, const LaplacianOperator& laplacian,
                                double lambda) {
    check_outputs(yhat, laplacian);
    check_lambda(lambda);
    if (lambda == 0.0) {
        return yhat;
    }
    const Index n = laplacian.size();
    Eigen::MatrixXd system = lambda * Eigen::MatrixXd(laplacian.symmetrized_dense());
    system.diagonal().array() += 1.0;

    Eigen::LLT<Eigen::MatrixXd> llt(system);
    if (llt.info() != Eigen::Success) {
        // Locate the offending pivot for the error message.
        Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
        const Eigen::VectorXd pivots = ldlt.vectorD();
        Eigen::VectorXi perm = Eigen::VectorXi::LinSpaced(n, 0, static_cast<int>(n) - 1);
        perm = ldlt.transpositionsP() * perm;
        Index worst = 0;
        for (Index k = 1; k < pivots.size(); ++k) {
            if (pivots[k] < pivots[worst]) {
                worst = k;
            }
        }
        std::ostringstream msg;
        msg.precision(17);
        msg << "I + lambda*sym(L) is not positive definite: pivot " << pivots[worst]
            << " at row " << perm[worst];
        fail(ErrorCode::NotPositiveDefinite, msg.str());
    }
    Eigen::MatrixXd rhs = yhat;
    return OutputMatrix(llt.solve(rhs));
}

CoordinateDescentResult smooth_coordinate_descent(const OutputMatrix& yhat,
                                                  const LaplacianOperator& laplacian,
                                                  double lambda,
                                                  const CoordinateDescentOptions& options) {
    check_outputs(yhat, laplacian);
    check_lambda(lambda);
    if (options.epochs < 1 || options.batch_size < 1) {
        fail(ErrorCode::InvalidParameter, "epochs and batch_size must be positive");
    }
    const Index n = laplacian.size();
    const Index k = yhat.cols();
    const Vector& diag = laplacian.diagonal();
    const Vector& scale = laplacian.row_scale();
    const SparseRowMatrix& adj = laplacian.adjacency();

    Vector denom(n);
    for (Index i = 0; i < n; ++i) {
        denom[i] = 1.0 + lambda * diag[i];
        if (!(denom[i] > 0.0)) {
            std::ostringstream msg;
            msg << "coordinate " << i << " has denominator 1 + lambda*L_ii = " << denom[i];
            fail(ErrorCode::ZeroDenominator, msg.str());
        }
    }

    CoordinateDescentResult result;
    result.values = yhat;
    OutputMatrix& f = result.values;

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::mt19937_64 rng(options.seed);
    Vector acc(k);
    const double half_lambda = 0.5 * lambda;

    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        if (options.shuffle) {
            std::shuffle(order.begin(), order.end(), rng);
        }
        double max_change = 0.0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(options.batch_size)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(options.batch_size));
            // Batches run in order; within a batch every update sees the
            // latest values.
            for (std::size_t pos = start; pos < stop; ++pos) {
                const Index i = order[pos];
                acc = yhat.row(i).transpose();
                for (SparseRowMatrix::InnerIterator it(adj, i); it; ++it) {
                    const Index j = it.col();
                    const double coef = half_lambda * (scale[i] + scale[j]) * it.value();
                    acc += coef * f.row(j).transpose();
                }
                for (Index c = 0; c < k; ++c) {
                    const double updated = acc[c] / denom[i];
                    max_change = std::max(max_change, std::abs(updated - f(i, c)));
                    f(i, c) = updated;
                }
            }
        }
        result.epochs_run = epoch + 1;
        result.last_max_change = max_change;
        if (max_change < options.tolerance) {
            result.converged = true;
            break;
        }
    }
    return result;
}

double smoothing_objective(const OutputMatrix& yhat, const OutputMatrix& f,
                           const LaplacianOperator& laplacian, double lambda) {
    if (f.rows() != yhat.rows() || f.cols() != yhat.cols()) {
        fail(ErrorCode::DimensionMismatch, "objective: f and yhat shapes differ");
    }
    return (f - yhat).squaredNorm() + lambda * laplacian.quadratic_form(f);
}

double stationarity_residual(const OutputMatrix& yhat, const OutputMatrix& f,
                             const LaplacianOperator& laplacian, double lambda) {
    if (f.rows() != yhat.rows() || f.cols() != yhat.cols()) {
        fail(ErrorCode::DimensionMismatch, "residual: f and yhat shapes differ");
    }
    if (f.size() == 0) {
        return 0.0;
    }
    const Matrix r = f - yhat + lambda * laplacian.apply_symmetrized(f);
    return r.cwiseAbs().maxCoeff();
}

Vector inductive_update(const OutputMatrix& f_fixed,
                        const std::vector<std::pair<Index, double>>& new_weights,
                        const Vector& yhat_new, double lambda) {
    check_lambda(lambda);
    if (yhat_new.size() != f_fixed.cols()) {
        std::ostringstream msg;
        msg << "new output has " << yhat_new.size() << " entries, fitted outputs have "
            << f_fixed.cols() << " columns";
        fail(ErrorCode::DimensionMismatch, msg.str());
    }
    double degree = 0.0;
    Vector acc = yhat_new;
    for (const auto& [j, w] : new_weights) {
        if (j < 0 || j >= f_fixed.rows()) {
            std::ostringstream msg;
            msg << "neighbor index " << j << " out of range for " << f_fixed.rows() << " points";
            fail(ErrorCode::IndexOutOfRange, msg.str());
        }
        if (!(w >= 0.0) || !std::isfinite(w)) {
            std::ostringstream msg;
            msg << "neighbor " << j << " has invalid weight " << w;
            fail(ErrorCode::InvalidParameter, msg.str());
        }
        degree += w;
        acc += lambda * w * f_fixed.row(j).transpose();
    }
    const double denom = 1.0 + lambda * degree;
    if (!(denom > 0.0)) {
        std::ostringstream msg;
        msg << "new point has denominator " << denom;
        fail(ErrorCode::ZeroDenominator, msg.str());
    }
    return acc / denom;
}

namespace {

void check_simplex_row(const Vector& p, Index row) {
    if (p.size() < 2) {
        std::ostringstream msg;
        msg << "row " << row << ": probability vectors need at least 2 classes";
        fail(ErrorCode::InvalidSimplexRow, msg.str());
    }
    const double total = p.sum();
    if (!std::isfinite(total) || std::abs(total - 1.0) > kSimplexRowTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "row " << row << " sums to " << total << ", not 1";
        fail(ErrorCode::InvalidSimplexRow, msg.str());
    }
    for (Index c = 0; c < p.size(); ++c) {
        if (p[c] < -kSimplexRowTolerance) {
            std::ostringstream msg;
            msg << "row " << row << " has negative probability " << p[c] << " in column " << c;
            fail(ErrorCode::InvalidSimplexRow, msg.str());
        }
    }
}

Vector natural_params_checked(const Vector& p, Index row) {
    check_simplex_row(p, row);
    Vector q = p.cwiseMax(kSimplexClamp).cwiseMin(1.0);
    q /= q.sum();
    const Index k = q.size();
    Vector eta(k - 1);
    const double log_last = std::log(q[k - 1]);
    for (Index c = 0; c + 1 < k; ++c) {
        eta[c] = std::log(q[c]) - log_last;
    }
    return eta;
}

}  // namespace

Vector to_natural_params(const Vector& p) {
    return natural_params_checked(p, 0);
}

Vector from_natural_params(const Vector& eta) {
    if (!eta.allFinite()) {
        fail(ErrorCode::InvalidParameter, "natural parameters must be finite");
    }
    const Index k = eta.size() + 1;
    const double top = std::max(0.0, eta.size() > 0 ? eta.maxCoeff() : 0.0);
    Vector p(k);
    for (Index c = 0; c + 1 < k; ++c) {
        p[c] = std::exp(eta[c] - top);
    }
    p[k - 1] = std::exp(-top);
    return p / p.sum();
}

Matrix to_natural_params(const OutputMatrix& probs) {
    Matrix eta(probs.rows(), std::max<Index>(probs.cols() - 1, 0));
    for (Index i = 0; i < probs.rows(); ++i) {
        eta.row(i) = natural_params_checked(probs.row(i).transpose(), i).transpose();
    }
    return eta;
}

OutputMatrix from_natural_params_rows(const Matrix& eta) {
    OutputMatrix probs(eta.rows(), eta.cols() + 1);
    for (Index i = 0; i < eta.rows(); ++i) {
        probs.row(i) = from_natural_params(eta.row(i).transpose()).transpose();
    }
    return probs;
}

Vector kl_coordinate_step(const Vector& p_hat,
                          const std::vector<std::pair<double, Vector>>& neighbors,
                          double lambda) {
    check_lambda(lambda);
    Vector acc = to_natural_params(p_hat);
    double total = 1.0;
    Index row = 1;
    for (const auto& [w, q] : neighbors) {
        if (q.size() != p_hat.size()) {
            fail(ErrorCode::DimensionMismatch, "neighbor distribution has a different class count");
        }
        const double coef = 0.5 * lambda * w;
        acc += coef * natural_params_checked(q, row++);
        total += coef;
    }
    return from_natural_params(acc / total);
}

KlResult smooth_kl(const OutputMatrix& probs, const LaplacianOperator& laplacian, double lambda,
                   const KlOptions& options) {
    if (laplacian.kind() != LaplacianKind::unnormalized) {
        fail(ErrorCode::InvalidParameter, "kl smoothing requires the unnormalized laplacian");
    }
    check_lambda(lambda);
    if (probs.rows() != laplacian.size()) {
        std::ostringstream msg;
        msg << "outputs have " << probs.rows() << " rows but the graph has " << laplacian.size()
            << " nodes";
        fail(ErrorCode::DimensionMismatch, msg.str());
    }
    const Matrix eta_hat = to_natural_params(probs);
    const double inner_lambda = 0.5 * lambda;

    KlResult result;
    if (options.mode == SolveMode::closed_form) {
        result.natural_params = smooth_closed_form(eta_hat, laplacian, inner_lambda);
        result.epochs_run = 0;
    } else {
        CoordinateDescentOptions cd;
        cd.epochs = options.max_epochs;
        cd.batch_size = options.batch_size;
        cd.seed = options.seed;
        cd.tolerance = options.tolerance;
        auto run = smooth_coordinate_descent(eta_hat, laplacian, inner_lambda, cd);
        result.natural_params = std::move(run.values);
        result.epochs_run = run.epochs_run;
    }
    result.residual = stationarity_residual(eta_hat, result.natural_params, laplacian, inner_lambda);
    if (lambda == 0.0) {
        // Identity: hand back the input rather than a clamp/softmax round trip.
        result.probabilities = probs;
    } else {
        result.probabilities = from_natural_params_rows(result.natural_params);
    }
    return result;
}

SmoothResult smooth(const OutputMatrix& yhat, const LaplacianOperator& laplacian,
                    const SmoothingConfig& config) {
    validate(config);
    if (laplacian.kind() != config.laplacian_kind) {
        fail(ErrorCode::InvalidParameter, "laplacian kind does not match the configuration");
    }
    check_outputs(yhat, laplacian);

    SmoothResult result;
    result.lambda = config.lambda;
    result.average_degree = laplacian.source_average_degree();
    result.effective_lambda = effective_lambda(config, laplacian);
    const double lambda = result.effective_lambda;

    if (config.discrepancy == Discrepancy::kl) {
        KlOptions kl;
        kl.mode = config.mode;
        kl.tolerance = config.tolerance;
        kl.seed = config.seed;
        kl.batch_size = config.batch_size;
        if (kl.mode == SolveMode::closed_form && laplacian.size() > config.dense_limit) {
            kl.mode = SolveMode::coordinate_descent;
            result.warnings.push_back("n exceeds dense_limit; using coordinate descent");
        }
        KlResult out = smooth_kl(yhat, laplacian, lambda, kl);
        result.values = std::move(out.probabilities);
        result.mode_used = kl.mode;
        result.epochs_used = out.epochs_run;
        result.residual = out.residual;
        return result;
    }

    bool use_cd = config.mode == SolveMode::coordinate_descent;
    if (!use_cd && laplacian.size() > config.dense_limit) {
        use_cd = true;
        result.warnings.push_back("n exceeds dense_limit; using coordinate descent");
    }
    if (!use_cd) {
        try {
            result.values = smooth_closed_form(yhat, laplacian, lambda);
            result.mode_used = SolveMode::closed_form;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NotPositiveDefinite || !config.allow_fallback) {
                throw;
            }
            use_cd = true;
            result.fell_back = true;
            result.warnings.push_back(std::string("NotPositiveDefinite: ") + e.what() +
                                      "; fell back to coordinate descent");
        }
    }
    if (use_cd) {
        CoordinateDescentOptions cd;
        cd.epochs = config.epochs;
        cd.batch_size = config.batch_size;
        cd.seed = config.seed;
        cd.tolerance = config.tolerance;
        auto run = smooth_coordinate_descent(yhat, laplacian, lambda, cd);
        result.values = std::move(run.values);
        result.mode_used = SolveMode::coordinate_descent;
        result.epochs_used = run.epochs_run;
    }
    result.residual = stationarity_residual(yhat, result.values, laplacian, lambda);
    return result;
}

}  // namespace glif
