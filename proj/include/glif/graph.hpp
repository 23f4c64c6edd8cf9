#pragma once

#include "glif/metric.hpp"
#include "glif/types.hpp"

#include <limits>
#include <utility>
#include <vector>

namespace glif {

struct Edge {
    Index i = 0;
    Index j = 0;
    double w = 0.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected weighted graph over n individuals. Each unordered pair is
/// stored once with i < j, and the edge list is sorted by (i, j).
class SimilarityGraph {
public:
    SimilarityGraph() = default;

    /// Validates and sorts `edges`; throws on i >= j, out-of-range indices,
    /// duplicates or non-positive weights.
    SimilarityGraph(Index n, std::vector<Edge> edges);

    Index num_nodes() const noexcept { return n_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::size_t num_edges() const noexcept { return edges_.size(); }

private:
    Index n_ = 0;
    std::vector<Edge> edges_;
};

inline constexpr double kWeightFloor = 1e-15;
inline constexpr double kDefaultTheta = 1e-4;
inline constexpr double kInfiniteTau = std::numeric_limits<double>::infinity();

/// W_ij = exp(-theta d_ij^2) for d_ij <= tau, no edge otherwise.
/// Weights below kWeightFloor are treated as zero and dropped.
SimilarityGraph build_similarity_graph(const Matrix& X, const FairMetricSpec& metric,
                                       double theta, double tau);

/// Binary graph from annotator pairs, deduplicated as unordered pairs.
SimilarityGraph graph_from_annotations(const std::vector<std::pair<Index, Index>>& pairs,
                                       Index n);

Vector degrees(const SimilarityGraph& g);
double average_degree(const SimilarityGraph& g);

}  // namespace glif
