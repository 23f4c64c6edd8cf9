#include "glif/laplacian.hpp"

#include "glif/error.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace glif {

SparseRowMatrix adjacency_matrix(const SimilarityGraph& g) {
    std::vector<Eigen::Triplet<double, Index>> triplets;
    triplets.reserve(2 * g.num_edges());
    for (const Edge& e : g.edges()) {
        triplets.emplace_back(e.i, e.j, e.w);
        triplets.emplace_back(e.j, e.i, e.w);
    }
    SparseRowMatrix a(g.num_nodes(), g.num_nodes());
    a.setFromTriplets(triplets.begin(), triplets.end());
    a.makeCompressed();
    return a;
}

namespace {

// Row sums accumulated in storage order.
Vector row_sums(const SparseRowMatrix& a) {
    Vector sums = Vector::Zero(a.rows());
    for (Index i = 0; i < a.outerSize(); ++i) {
        double acc = 0.0;
        for (SparseRowMatrix::InnerIterator it(a, i); it; ++it) {
            acc += it.value();
        }
        sums[i] = acc;
    }
    return sums;
}

}  // namespace

LaplacianOperator unnormalized_laplacian(const SimilarityGraph& g) {
    LaplacianOperator op;
    op.kind_ = LaplacianKind::unnormalized;
    op.n_ = g.num_nodes();
    op.adjacency_ = adjacency_matrix(g);
    op.diag_ = row_sums(op.adjacency_);
    op.scale_ = Vector::Ones(op.n_);
    op.source_average_degree_ = op.n_ > 0 ? op.diag_.mean() : 0.0;
    return op;
}

LaplacianOperator normalized_rw_laplacian(const SimilarityGraph& g) {
    LaplacianOperator op;
    op.kind_ = LaplacianKind::normalized_random_walk;
    op.n_ = g.num_nodes();
    SparseRowMatrix a = adjacency_matrix(g);
    const Vector deg = row_sums(a);
    op.source_average_degree_ = op.n_ > 0 ? deg.mean() : 0.0;

    Vector inv_sqrt = Vector::Zero(op.n_);
    for (Index i = 0; i < op.n_; ++i) {
        if (deg[i] > 0.0) {
            inv_sqrt[i] = 1.0 / std::sqrt(deg[i]);
        }
    }
    for (Index i = 0; i < a.outerSize(); ++i) {
        for (SparseRowMatrix::InnerIterator it(a, i); it; ++it) {
            it.valueRef() *= inv_sqrt[i] * inv_sqrt[it.col()];
        }
    }
    const Vector norm_deg = row_sums(a);

    op.diag_ = Vector::Zero(op.n_);
    op.scale_ = Vector::Zero(op.n_);
    for (Index i = 0; i < op.n_; ++i) {
        if (deg[i] > 0.0) {
            if (!(norm_deg[i] > 0.0)) {
                std::ostringstream msg;
                msg << "node " << i << " has degree " << deg[i]
                    << " but zero normalized degree";
                fail(ErrorCode::DegenerateDegree, msg.str());
            }
            op.diag_[i] = 1.0;
            op.scale_[i] = 1.0 / norm_deg[i];
        }
    }
    op.adjacency_ = std::move(a);
    return op;
}

LaplacianOperator make_laplacian(const SimilarityGraph& g, LaplacianKind kind) {
    return kind == LaplacianKind::unnormalized ? unnormalized_laplacian(g)
                                               : normalized_rw_laplacian(g);
}

void LaplacianOperator::check_rows(const Matrix& f) const {
    if (f.rows() != n_) {
        std::ostringstream msg;
        msg << "expected " << n_ << " rows, got " << f.rows();
        fail(ErrorCode::DimensionMismatch, msg.str());
    }
}

Matrix LaplacianOperator::apply(const Matrix& f) const {
    check_rows(f);
    Matrix af = adjacency_ * f;
    return diag_.asDiagonal() * f - scale_.asDiagonal() * af;
}

Matrix LaplacianOperator::apply_transpose(const Matrix& f) const {
    check_rows(f);
    const Matrix scaled = scale_.asDiagonal() * f;
    Matrix af = adjacency_ * scaled;
    return diag_.asDiagonal() * f - af;
}

Matrix LaplacianOperator::apply_symmetrized(const Matrix& f) const {
    if (kind_ == LaplacianKind::unnormalized) {
        return apply(f);
    }
    return 0.5 * (apply(f) + apply_transpose(f));
}

double LaplacianOperator::quadratic_form(const Matrix& f) const {
    check_rows(f);
    return f.cwiseProduct(apply(f)).sum();
}

SparseRowMatrix LaplacianOperator::to_sparse() const {
    std::vector<Eigen::Triplet<double, Index>> triplets;
    triplets.reserve(adjacency_.nonZeros() + n_);
    for (Index i = 0; i < n_; ++i) {
        if (diag_[i] != 0.0) {
            triplets.emplace_back(i, i, diag_[i]);
        }
        for (SparseRowMatrix::InnerIterator it(adjacency_, i); it; ++it) {
            triplets.emplace_back(i, it.col(), -scale_[i] * it.value());
        }
    }
    SparseRowMatrix l(n_, n_);
    l.setFromTriplets(triplets.begin(), triplets.end());
    l.makeCompressed();
    return l;
}

Matrix LaplacianOperator::to_dense() const {
    return Matrix(Eigen::MatrixXd(to_sparse()));
}

Matrix LaplacianOperator::symmetrized_dense() const {
    Matrix out = Matrix::Zero(n_, n_);
    for (Index i = 0; i < n_; ++i) {
        out(i, i) = diag_[i];
        for (SparseRowMatrix::InnerIterator it(adjacency_, i); it; ++it) {
            out(i, it.col()) = -0.5 * (scale_[i] + scale_[it.col()]) * it.value();
        }
    }
    return out;
}

}  // namespace glif
