#pragma once

#include "glif/graph.hpp"
#include "glif/types.hpp"

#include <Eigen/SparseCore>

namespace glif {

enum class LaplacianKind { unnormalized, normalized_random_walk };

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, Index>;

/// Graph Laplacian in the factored form L = diag(d) - diag(s) A, where A is a
/// symmetric sparse matrix with zero diagonal.
///
///   unnormalized:            d = degrees of W, s = 1, A = W
///   normalized random walk:  d = 1 (0 for isolated nodes), s = 1 / deg(W~),
///                            A = W~ = D^{-1/2} W D^{-1/2}
///
/// Since A is symmetric, (L + L^T)/2 has off-diagonal entries
/// -(s_i + s_j)/2 A_ij and never needs to be stored.
class LaplacianOperator {
public:
    LaplacianKind kind() const noexcept { return kind_; }
    Index size() const noexcept { return n_; }

    const Vector& diagonal() const noexcept { return diag_; }
    const Vector& row_scale() const noexcept { return scale_; }
    const SparseRowMatrix& adjacency() const noexcept { return adjacency_; }

    // Mean degree of the graph this operator was built from.
    double source_average_degree() const noexcept { return source_average_degree_; }

    Matrix apply(const Matrix& f) const;
    Matrix apply_transpose(const Matrix& f) const;

    // ((L + L^T)/2) f
    Matrix apply_symmetrized(const Matrix& f) const;

    // trace(f^T L f)
    double quadratic_form(const Matrix& f) const;

    // L materialized as a sparse row matrix (diagonal included).
    SparseRowMatrix to_sparse() const;
    Matrix to_dense() const;
    Matrix symmetrized_dense() const;

private:
    friend LaplacianOperator unnormalized_laplacian(const SimilarityGraph& g);
    friend LaplacianOperator normalized_rw_laplacian(const SimilarityGraph& g);

    void check_rows(const Matrix& f) const;

    LaplacianKind kind_ = LaplacianKind::unnormalized;
    Index n_ = 0;
    Vector diag_;
    Vector scale_;
    SparseRowMatrix adjacency_;
    double source_average_degree_ = 0.0;
};

LaplacianOperator unnormalized_laplacian(const SimilarityGraph& g);

/// I - D~^{-1} W~ with W~ = D^{-1/2} W D^{-1/2}. Rows and columns of
/// isolated nodes are identically zero.
LaplacianOperator normalized_rw_laplacian(const SimilarityGraph& g);

LaplacianOperator make_laplacian(const SimilarityGraph& g, LaplacianKind kind);

// Symmetric adjacency of g as a sparse row matrix.
SparseRowMatrix adjacency_matrix(const SimilarityGraph& g);

}  // namespace glif
