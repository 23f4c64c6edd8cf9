#include "glif/graph.hpp"

#include "glif/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace glif {

SimilarityGraph::SimilarityGraph(Index n, std::vector<Edge> edges)
    : n_(n), edges_(std::move(edges)) {
    if (n_ < 0) {
        fail(ErrorCode::InvalidParameter, "node count must be nonnegative");
    }
    for (const Edge& e : edges_) {
        if (e.i < 0 || e.j < 0 || e.i >= n_ || e.j >= n_) {
            std::ostringstream msg;
            msg << "edge (" << e.i << "," << e.j << ") out of range for n=" << n_;
            fail(ErrorCode::IndexOutOfRange, msg.str());
        }
        if (e.i == e.j) {
            std::ostringstream msg;
            msg << "self-loop on node " << e.i;
            fail(ErrorCode::SelfLoop, msg.str());
        }
        if (e.i > e.j) {
            std::ostringstream msg;
            msg << "edge (" << e.i << "," << e.j << ") must be stored with i < j";
            fail(ErrorCode::InvalidParameter, msg.str());
        }
        if (!(e.w > 0.0) || !std::isfinite(e.w)) {
            std::ostringstream msg;
            msg << "edge (" << e.i << "," << e.j << ") has non-positive or non-finite weight "
                << e.w;
            fail(ErrorCode::InvalidParameter, msg.str());
        }
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    for (std::size_t k = 1; k < edges_.size(); ++k) {
        if (edges_[k].i == edges_[k - 1].i && edges_[k].j == edges_[k - 1].j) {
            std::ostringstream msg;
            msg << "duplicate edge (" << edges_[k].i << "," << edges_[k].j << ")";
            fail(ErrorCode::InvalidParameter, msg.str());
        }
    }
}

SimilarityGraph build_similarity_graph(const Matrix& X, const FairMetricSpec& metric,
                                       double theta, double tau) {
    if (!(theta > 0.0) || !std::isfinite(theta)) {
        std::ostringstream msg;
        msg << "theta must be positive and finite, got " << theta;
        fail(ErrorCode::InvalidParameter, msg.str());
    }
    if (!(tau > 0.0)) {
        std::ostringstream msg;
        msg << "tau must be positive, got " << tau;
        fail(ErrorCode::InvalidParameter, msg.str());
    }
    const auto dim = metric.dimension();
    if (dim && *dim != X.cols()) {
        std::ostringstream msg;
        msg << "metric dimension " << *dim << " does not match embedding dimension " << X.cols();
        fail(ErrorCode::DimensionMismatch, msg.str());
    }
    if (metric.kind != MetricKind::euclidean && metric.sigma.rows() == 0) {
        fail(ErrorCode::InvalidParameter, "metric has no sigma; call validate_metric first");
    }

    const Index n = X.rows();
    std::vector<Edge> edges;
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const double d2 = squared_fair_distance_rows(metric, X, i, j);
            if (std::sqrt(d2) > tau) {
                continue;
            }
            const double w = std::exp(-theta * d2);
            if (w < kWeightFloor) {
                continue;
            }
            edges.push_back({i, j, w});
        }
    }
    return SimilarityGraph(n, std::move(edges));
}

SimilarityGraph graph_from_annotations(const std::vector<std::pair<Index, Index>>& pairs,
                                       Index n) {
    std::vector<Edge> edges;
    edges.reserve(pairs.size());
    for (const auto& [a, b] : pairs) {
        if (a < 0 || b < 0 || a >= n || b >= n) {
            std::ostringstream msg;
            msg << "annotated pair (" << a << "," << b << ") out of range for n=" << n;
            fail(ErrorCode::IndexOutOfRange, msg.str());
        }
        if (a == b) {
            std::ostringstream msg;
            msg << "annotated pair (" << a << "," << b << ") is a self-loop";
            fail(ErrorCode::SelfLoop, msg.str());
        }
        edges.push_back({std::min(a, b), std::max(a, b), 1.0});
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
        return x.i != y.i ? x.i < y.i : x.j < y.j;
    });
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](const Edge& x, const Edge& y) { return x.i == y.i && x.j == y.j; }),
                edges.end());
    return SimilarityGraph(n, std::move(edges));
}

Vector degrees(const SimilarityGraph& g) {
    Vector deg = Vector::Zero(g.num_nodes());
    for (const Edge& e : g.edges()) {
        deg[e.i] += e.w;
        deg[e.j] += e.w;
    }
    return deg;
}

double average_degree(const SimilarityGraph& g) {
    if (g.num_nodes() < 1) {
        fail(ErrorCode::InvalidParameter, "average degree of an empty graph");
    }
    return degrees(g).mean();
}

}  // namespace glif
