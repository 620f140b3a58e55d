#include "relanom/baseline_vd.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace relanom {

namespace {

// Sorted distances from row i to its k nearest other rows (ties by index).
std::vector<double> knn_distances(const Eigen::MatrixXd& columns, Eigen::Index i, int k, DistanceMetric metric) {
    const Eigen::Index n = columns.cols();
    std::vector<std::pair<double, Eigen::Index>> dist;
    dist.reserve(static_cast<std::size_t>(n - 1));
    for (Eigen::Index j = 0; j < n; ++j) {
        if (j != i) {
            dist.emplace_back(distance(columns.col(i), columns.col(j), metric), j);
        }
    }
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int m = 0; m < k; ++m) {
        out.push_back(dist[static_cast<std::size_t>(m)].first);
    }
    return out;
}

void check_knn_args(const Dataset& data, int k, double gamma) {
    if (k < 1 || k > data.rows() - 1) {
        throw std::invalid_argument("k must lie in [1, n-1]");
    }
    if (!(gamma > 0.0)) {
        throw std::invalid_argument("gamma must be positive");
    }
}

}  // namespace

VertexDegrees vertex_degrees(const SimilarityGraph& graph) {
    return {graph.row_sums(), graph.gamma()};
}

VertexDegrees kernel_vertex_degrees(const Dataset& data, double gamma, DistanceMetric metric) {
    if (!(gamma > 0.0)) {
        throw std::invalid_argument("gamma must be positive");
    }
    const Eigen::MatrixXd columns = data.values.transpose();
    const Eigen::Index n = columns.cols();
    Eigen::VectorXd vd(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            sum += i == j ? 1.0 : rbf_kernel(distance(columns.col(i), columns.col(j), metric), gamma);
        }
        vd(i) = sum;
    }
    return {vd, gamma};
}

double vertex_degree_of(const Dataset& training, const Eigen::Ref<const Eigen::VectorXd>& x, double gamma,
                        DistanceMetric metric) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < training.rows(); ++j) {
        sum += rbf_kernel(distance(training.values.row(j).transpose(), x, metric), gamma);
    }
    return sum;
}

Eigen::MatrixXd transition_matrix(const SimilarityGraph& graph) {
    const Eigen::VectorXd sums = graph.row_sums();
    if ((sums.array() <= 0.0).any()) {
        throw std::invalid_argument("transition matrix needs positive row sums");
    }
    Eigen::MatrixXd P = graph.is_sparse() ? Eigen::MatrixXd(graph.sparse()) : graph.dense();
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
        P.row(i) /= sums(i);
    }
    return P;
}

StationaryResult stationary_distribution(const Eigen::MatrixXd& P, double tol, int max_iter) {
    const Eigen::Index n = P.rows();
    if (n == 0 || P.cols() != n) {
        throw std::invalid_argument("transition matrix must be square and nonempty");
    }
    if ((P.array() <= 0.0).any()) {
        throw std::invalid_argument(
            "stationary distribution requires a strictly positive transition matrix; "
            "sparsified graphs may be reducible");
    }
    const Eigen::MatrixXd Pt = P.transpose();
    Eigen::VectorXd p = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    double residual = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd next = Pt * p;
        residual = (next - p).lpNorm<1>();
        if (!std::isfinite(residual)) {
            throw ConvergenceError("non-finite value in stationary iteration", residual, it);
        }
        if (residual <= tol) {
            return {p, it, residual};
        }
        p = next / next.lpNorm<1>();
    }
    throw ConvergenceError("stationary distribution did not converge, last residual " + std::to_string(residual),
                           residual, max_iter);
}

Eigen::VectorXd vd_knn_approx(const Dataset& data, int k, double gamma, double v, DistanceMetric metric) {
    check_knn_args(data, k, gamma);
    if (!(v > 0.0)) {
        throw std::invalid_argument("expansion point v must be positive");
    }
    const double e = std::exp(-v * v / gamma);
    const double intercept = static_cast<double>(k) * e * (1.0 + 2.0 * v * v / gamma);
    const double slope = 2.0 * v * e / gamma;
    const Eigen::MatrixXd columns = data.values.transpose();
    Eigen::VectorXd out(data.rows());
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        double total = 0.0;
        for (double d : knn_distances(columns, i, k, metric)) {
            total += d;
        }
        out(i) = intercept - slope * total;
    }
    return out;
}

Eigen::VectorXd vd_knn_exact(const Dataset& data, int k, double gamma, DistanceMetric metric) {
    check_knn_args(data, k, gamma);
    const Eigen::MatrixXd columns = data.values.transpose();
    Eigen::VectorXd out(data.rows());
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        double total = 0.0;
        for (double d : knn_distances(columns, i, k, metric)) {
            total += rbf_kernel(d, gamma);
        }
        out(i) = total;
    }
    return out;
}

double median_knn_distance(const Dataset& data, int k, DistanceMetric metric) {
    if (k < 1 || k > data.rows() - 1) {
        throw std::invalid_argument("k must lie in [1, n-1]");
    }
    const Eigen::MatrixXd columns = data.values.transpose();
    std::vector<double> all;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        const auto d = knn_distances(columns, i, k, metric);
        all.insert(all.end(), d.begin(), d.end());
    }
    const auto mid = all.begin() + static_cast<std::ptrdiff_t>(all.size() / 2);
    std::nth_element(all.begin(), mid, all.end());
    double median = *mid;
    if (all.size() % 2 == 0) {
        median = 0.5 * (median + *std::max_element(all.begin(), mid));
    }
    return median;
}

}  // namespace relanom
