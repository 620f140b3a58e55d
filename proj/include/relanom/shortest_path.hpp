#pragma once

#include "relanom/baseline_vd.hpp"
#include "relanom/ecdf.hpp"
#include "relanom/similarity_graph.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace relanom {

struct NormalSetSelection {
    EmpiricalCdf ecdf;
    std::vector<Eigen::Index> normal_set;  // ascending
};

/// Observations whose vertex degree exceeds that of a (1 - q) share of the
/// training data: 1 - F(vd_l) < q. The node with the largest degree always
/// qualifies; tied degrees enter or leave together.
NormalSetSelection select_normal_set(const VertexDegrees& vd, double q);

/// Edge lengths -ln s_ij in compressed row form.
struct PathGraph {
    std::vector<Eigen::Index> offsets;  // size n + 1
    std::vector<Eigen::Index> targets;
    std::vector<double> weights;

    Eigen::Index size() const { return static_cast<Eigen::Index>(offsets.size()) - 1; }
};

/// weight(i, j) = -ln s_ij for every stored off-diagonal entry. Entries that
/// are exactly zero (kernel underflow) carry infinite length and are left out.
/// Throws std::invalid_argument for negative or NaN similarities.
PathGraph path_weights(const SimilarityGraph& graph);

/// Distances from a virtual source joined to every node of `sources` by a
/// zero-length edge (Dijkstra with a binary heap). Unreachable nodes get +inf.
std::vector<double> multi_source_shortest_paths(const PathGraph& graph, std::span<const Eigen::Index> sources);

struct ShortestPathModel {
    Dataset training;
    double gamma = 0.0;
    double q = 0.5;
    std::optional<int> k;
    DistanceMetric metric = DistanceMetric::euclidean;
    VertexDegrees vd;
    EmpiricalCdf ecdf;
    std::vector<Eigen::Index> normal_set;
    std::vector<double> ra_q;  // min-sum path length; 0 on the normal set
    std::size_t unreachable = 0;
};

/// Vertex degrees always come from the full kernel; paths run over the
/// complete graph, or over the max-symmetrised k-nearest-neighbour graph when
/// k is given. Unreachable nodes get ra_q = +inf and are counted.
ShortestPathModel fit_shortest_path(const Dataset& data, double gamma, double q, std::optional<int> k = {},
                                    DistanceMetric metric = DistanceMetric::euclidean);

/// min_j (-ln s(x, x_j) + ra_q[j]) over training nodes with finite ra_q.
/// Where the kernel underflows to zero the edge length d^2/gamma is used.
double score_new_shortest_path(const ShortestPathModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace relanom
