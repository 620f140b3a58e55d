#pragma once

#include "relanom/similarity_graph.hpp"

#include <Eigen/Dense>

#include <stdexcept>

namespace relanom {

/// Raised by iterative solvers that exhaust their iteration budget or hit a
/// non-finite intermediate. Carries the last residual reached.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

private:
    double residual_;
    int iterations_;
};

/// Weighted vertex degree of every node, diagonal included. Lower degree
/// means more anomalous under the frequency criterion.
struct VertexDegrees {
    Eigen::VectorXd vd;
    double gamma = 0.0;
};

VertexDegrees vertex_degrees(const SimilarityGraph& graph);

/// Row sums of the full kernel matrix computed one row at a time, so it also
/// works above kMaxDenseNodes. Matches vertex_degrees on the dense graph up
/// to summation order.
VertexDegrees kernel_vertex_degrees(const Dataset& data, double gamma, DistanceMetric metric);

/// Vertex degree of an unseen observation against the training data:
/// sum_j s(x, x_j).
double vertex_degree_of(const Dataset& training, const Eigen::Ref<const Eigen::VectorXd>& x, double gamma,
                        DistanceMetric metric);

/// P = diag(S 1)^-1 S, returned dense.
Eigen::MatrixXd transition_matrix(const SimilarityGraph& graph);

struct StationaryResult {
    Eigen::VectorXd p;
    int iterations = 0;
    double residual = 0.0;
};

/// Left Perron vector of a strictly positive row-stochastic matrix by power
/// iteration on P^T from the uniform vector, renormalised in L1. Stops when
/// ||P^T p - p||_1 <= tol. Matrices with zero entries (e.g. from kNN
/// truncation) may be reducible and are rejected with std::invalid_argument.
StationaryResult stationary_distribution(const Eigen::MatrixXd& P, double tol = 1e-10, int max_iter = 10000);

/// Linearisation of the truncated vertex degree around distance level v:
/// k e^{-v^2/g} (1 + 2v^2/g) - (2 v e^{-v^2/g} / g) * sum_{j in N_k(i)} d_ij.
/// The self-similarity term is not included.
Eigen::VectorXd vd_knn_approx(const Dataset& data, int k, double gamma, double v,
                              DistanceMetric metric = DistanceMetric::euclidean);

/// Exact vertex degree restricted to the k nearest neighbours (no diagonal),
/// the quantity vd_knn_approx linearises.
Eigen::VectorXd vd_knn_exact(const Dataset& data, int k, double gamma,
                             DistanceMetric metric = DistanceMetric::euclidean);

/// Median of all k-nearest-neighbour distances; the default expansion point.
double median_knn_distance(const Dataset& data, int k, DistanceMetric metric = DistanceMetric::euclidean);

}  // namespace relanom
