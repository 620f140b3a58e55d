#pragma once

#include "relanom/data_prep.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>

namespace relanom {

enum class DistanceMetric { euclidean, manhattan };

std::string to_string(DistanceMetric metric);
/// Accepts "euclidean"/"l2" and "manhattan"/"l1".
DistanceMetric parse_metric(std::string_view name);

/// Dense construction is refused above this many observations.
inline constexpr Eigen::Index kMaxDenseNodes = 20000;

double distance(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                DistanceMetric metric);

/// exp(-d^2 / gamma)
inline double rbf_kernel(double dist, double gamma) { return std::exp(-(dist * dist) / gamma); }

Eigen::MatrixXd pairwise_distances(const Dataset& data, DistanceMetric metric);

/// Kernel similarity graph over a set of observations. Stored either as a
/// dense n x n matrix or as a row-major sparse matrix in which absent entries
/// mean similarity zero. The diagonal is always stored.
class SimilarityGraph {
public:
    using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

    SimilarityGraph(Eigen::MatrixXd dense, double gamma, DistanceMetric metric);
    SimilarityGraph(SparseMatrix sparse, double gamma, DistanceMetric metric, bool symmetric);

    Eigen::Index size() const { return is_sparse_ ? sparse_.rows() : dense_.rows(); }
    bool is_sparse() const { return is_sparse_; }
    bool is_symmetric() const { return symmetric_; }
    double gamma() const { return gamma_; }
    DistanceMetric metric() const { return metric_; }

    const Eigen::MatrixXd& dense() const;
    const SparseMatrix& sparse() const;

    /// Stored value, or zero if the entry is absent.
    double coeff(Eigen::Index i, Eigen::Index j) const;
    std::size_t stored_entries() const;

    Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
    Eigen::VectorXd multiply_transpose(const Eigen::VectorXd& x) const;
    Eigen::VectorXd row_sums() const;

    /// Calls f(j, s_ij) for every stored entry in row i, in column order.
    template <class F>
    void for_each_in_row(Eigen::Index i, F&& f) const {
        if (is_sparse_) {
            for (SparseMatrix::InnerIterator it(sparse_, i); it; ++it) {
                f(it.col(), it.value());
            }
        } else {
            for (Eigen::Index j = 0; j < dense_.cols(); ++j) {
                f(j, dense_(i, j));
            }
        }
    }

    /// Similarity at or below which off-diagonal pairs were dropped by
    /// threshold_sparsify; NaN when no thresholding was applied.
    double drop_threshold() const { return drop_threshold_; }
    std::size_t dropped_pairs() const { return dropped_pairs_; }
    void set_drop_record(double threshold, std::size_t pairs) {
        drop_threshold_ = threshold;
        dropped_pairs_ = pairs;
    }

private:
    Eigen::MatrixXd dense_;
    SparseMatrix sparse_;
    bool is_sparse_ = false;
    bool symmetric_ = true;
    double gamma_ = 1.0;
    DistanceMetric metric_ = DistanceMetric::euclidean;
    double drop_threshold_ = std::numeric_limits<double>::quiet_NaN();
    std::size_t dropped_pairs_ = 0;
};

/// Dense kernel matrix s_ij = exp(-d(x_i, x_j)^2 / gamma).
SimilarityGraph rbf_similarity_matrix(const Dataset& data, double gamma, DistanceMetric metric);

/// Directed k-nearest-neighbour truncation of a dense graph. Row i keeps its
/// k most similar j != i plus the diagonal; ties go to the smaller index.
SimilarityGraph knn_truncate(const SimilarityGraph& graph, int k);

/// Same result as knn_truncate(rbf_similarity_matrix(...), k) without ever
/// materialising the dense matrix. Works above kMaxDenseNodes.
SimilarityGraph knn_similarity_graph(const Dataset& data, double gamma, DistanceMetric metric, int k);

/// Drops the floor(drop_fraction * n(n-1)/2) smallest off-diagonal pairs of a
/// dense symmetric graph. If that would disconnect the graph, fewer pairs
/// are dropped: the largest count that keeps it connected.
SimilarityGraph threshold_sparsify(const SimilarityGraph& graph, double drop_fraction);

/// Union of a directed graph with its transpose, keeping an edge when either
/// endpoint stores it.
SimilarityGraph symmetrize_max(const SimilarityGraph& graph);

/// True when the stored off-diagonal entries connect every node (edges are
/// treated as undirected).
bool is_connected(const SimilarityGraph& graph);

/// Coordinate dump: one "i,j,s_ij" line per stored entry, 0-based,
/// round-trip precision.
void write_coordinate_dump(std::ostream& out, const SimilarityGraph& graph);

}  // namespace relanom
