#include "relanom/similarity_graph.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace relanom {

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), components_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent_[std::max(a, b)] = std::min(a, b);
            --components_;
        }
    }

    std::size_t components() const { return components_; }

private:
    std::vector<std::size_t> parent_;
    std::size_t components_;
};

void check_gamma(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("gamma must be a positive finite number");
    }
}

// Indices of the k largest entries of `row`, excluding `self`, ties broken
// by smaller index; returned in ascending column order.
std::vector<Eigen::Index> top_k_neighbours(const Eigen::VectorXd& row, Eigen::Index self, int k) {
    std::vector<Eigen::Index> candidates;
    candidates.reserve(static_cast<std::size_t>(row.size()));
    for (Eigen::Index j = 0; j < row.size(); ++j) {
        if (j != self) {
            candidates.push_back(j);
        }
    }
    const auto kk = static_cast<std::ptrdiff_t>(k);
    std::partial_sort(candidates.begin(), candidates.begin() + kk, candidates.end(),
                      [&](Eigen::Index a, Eigen::Index b) {
                          if (row(a) != row(b)) {
                              return row(a) > row(b);
                          }
                          return a < b;
                      });
    candidates.resize(static_cast<std::size_t>(k));
    std::sort(candidates.begin(), candidates.end());
    return candidates;
}

void check_k(int k, Eigen::Index n) {
    if (k < 1 || k > n - 1) {
        throw std::invalid_argument("k must lie in [1, n-1], got " + std::to_string(k));
    }
}

SimilarityGraph::SparseMatrix knn_rows(Eigen::Index n, int k, auto&& row_of) {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(k + 1));
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd row = row_of(i);
        triplets.emplace_back(i, i, row(i));
        for (Eigen::Index j : top_k_neighbours(row, i, k)) {
            triplets.emplace_back(i, j, row(j));
        }
    }
    SimilarityGraph::SparseMatrix s(n, n);
    s.setFromTriplets(triplets.begin(), triplets.end());
    return s;
}

}  // namespace

std::string to_string(DistanceMetric metric) {
    return metric == DistanceMetric::euclidean ? "euclidean" : "manhattan";
}

DistanceMetric parse_metric(std::string_view name) {
    if (name == "euclidean" || name == "l2") {
        return DistanceMetric::euclidean;
    }
    if (name == "manhattan" || name == "l1") {
        return DistanceMetric::manhattan;
    }
    throw std::invalid_argument("unknown distance metric '" + std::string(name) + "'");
}

double distance(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                DistanceMetric metric) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("distance between observations of different length");
    }
    if (metric == DistanceMetric::euclidean) {
        return std::sqrt((a - b).squaredNorm());
    }
    return (a - b).cwiseAbs().sum();
}

Eigen::MatrixXd pairwise_distances(const Dataset& data, DistanceMetric metric) {
    const Eigen::Index n = data.rows();
    if (n < 2) {
        throw std::invalid_argument("pairwise distances need at least 2 observations");
    }
    const Eigen::MatrixXd rows = data.values.transpose();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            d(i, j) = distance(rows.col(i), rows.col(j), metric);
            d(j, i) = d(i, j);
        }
    }
    return d;
}

SimilarityGraph::SimilarityGraph(Eigen::MatrixXd dense, double gamma, DistanceMetric metric)
    : dense_(std::move(dense)), is_sparse_(false), symmetric_(true), gamma_(gamma), metric_(metric) {
    if (dense_.rows() != dense_.cols()) {
        throw std::invalid_argument("similarity matrix must be square");
    }
}

SimilarityGraph::SimilarityGraph(SparseMatrix sparse, double gamma, DistanceMetric metric, bool symmetric)
    : sparse_(std::move(sparse)), is_sparse_(true), symmetric_(symmetric), gamma_(gamma), metric_(metric) {
    if (sparse_.rows() != sparse_.cols()) {
        throw std::invalid_argument("similarity matrix must be square");
    }
    sparse_.makeCompressed();
}

const Eigen::MatrixXd& SimilarityGraph::dense() const {
    if (is_sparse_) {
        throw std::logic_error("graph is stored sparse");
    }
    return dense_;
}

const SimilarityGraph::SparseMatrix& SimilarityGraph::sparse() const {
    if (!is_sparse_) {
        throw std::logic_error("graph is stored dense");
    }
    return sparse_;
}

double SimilarityGraph::coeff(Eigen::Index i, Eigen::Index j) const {
    return is_sparse_ ? sparse_.coeff(i, j) : dense_(i, j);
}

std::size_t SimilarityGraph::stored_entries() const {
    return is_sparse_ ? static_cast<std::size_t>(sparse_.nonZeros()) : static_cast<std::size_t>(dense_.size());
}

Eigen::VectorXd SimilarityGraph::multiply(const Eigen::VectorXd& x) const {
    if (is_sparse_) {
        return sparse_ * x;
    }
    return dense_ * x;
}

Eigen::VectorXd SimilarityGraph::multiply_transpose(const Eigen::VectorXd& x) const {
    if (is_sparse_) {
        return sparse_.transpose() * x;
    }
    return dense_.transpose() * x;
}

Eigen::VectorXd SimilarityGraph::row_sums() const {
    if (is_sparse_) {
        Eigen::VectorXd sums = Eigen::VectorXd::Zero(sparse_.rows());
        for (Eigen::Index i = 0; i < sparse_.outerSize(); ++i) {
            for (SparseMatrix::InnerIterator it(sparse_, i); it; ++it) {
                sums(i) += it.value();
            }
        }
        return sums;
    }
    return dense_.rowwise().sum();
}

SimilarityGraph rbf_similarity_matrix(const Dataset& data, double gamma, DistanceMetric metric) {
    check_gamma(gamma);
    if (data.rows() > kMaxDenseNodes) {
        throw std::invalid_argument("dense similarity matrix refused above " + std::to_string(kMaxDenseNodes) +
                                    " observations; use knn_similarity_graph");
    }
    Eigen::MatrixXd s = pairwise_distances(data, metric);
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        s(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < s.cols(); ++j) {
            s(i, j) = rbf_kernel(s(i, j), gamma);
            s(j, i) = s(i, j);
        }
    }
    return SimilarityGraph(std::move(s), gamma, metric);
}

SimilarityGraph knn_truncate(const SimilarityGraph& graph, int k) {
    const Eigen::MatrixXd& s = graph.dense();
    const Eigen::Index n = s.rows();
    check_k(k, n);
    auto sparse = knn_rows(n, k, [&](Eigen::Index i) -> Eigen::VectorXd { return s.row(i).transpose(); });
    return SimilarityGraph(std::move(sparse), graph.gamma(), graph.metric(), false);
}

SimilarityGraph knn_similarity_graph(const Dataset& data, double gamma, DistanceMetric metric, int k) {
    check_gamma(gamma);
    const Eigen::Index n = data.rows();
    check_k(k, n);
    const Eigen::MatrixXd rows = data.values.transpose();
    auto sparse = knn_rows(n, k, [&](Eigen::Index i) -> Eigen::VectorXd {
        Eigen::VectorXd row(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            row(j) = i == j ? 1.0 : rbf_kernel(distance(rows.col(i), rows.col(j), metric), gamma);
        }
        return row;
    });
    return SimilarityGraph(std::move(sparse), gamma, metric, false);
}

SimilarityGraph threshold_sparsify(const SimilarityGraph& graph, double drop_fraction) {
    if (!(drop_fraction >= 0.0 && drop_fraction < 1.0)) {
        throw std::invalid_argument("drop fraction must lie in [0, 1)");
    }
    const Eigen::MatrixXd& s = graph.dense();
    if (!graph.is_symmetric()) {
        throw std::invalid_argument("threshold sparsification needs a symmetric graph");
    }
    if (drop_fraction == 0.0) {
        return graph;
    }
    const Eigen::Index n = s.rows();

    struct Pair {
        double value;
        Eigen::Index i;
        Eigen::Index j;
    };
    std::vector<Pair> pairs;
    pairs.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            pairs.push_back({s(i, j), i, j});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.value != b.value) {
            return a.value < b.value;
        }
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });

    const auto requested =
        static_cast<std::size_t>(std::floor(drop_fraction * static_cast<double>(pairs.size())));

    // Add pairs from the largest down; the first position at which the graph
    // becomes connected bounds how many of the smallest pairs can go.
    std::size_t max_droppable = 0;
    if (n > 1) {
        DisjointSets sets(static_cast<std::size_t>(n));
        for (std::size_t pos = pairs.size(); pos-- > 0;) {
            if (pairs[pos].value > 0.0) {
                sets.unite(static_cast<std::size_t>(pairs[pos].i), static_cast<std::size_t>(pairs[pos].j));
            }
            if (sets.components() == 1) {
                max_droppable = pos;
                break;
            }
        }
    }
    const std::size_t drop = std::min(requested, max_droppable);

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n) + 2 * (pairs.size() - drop));
    for (Eigen::Index i = 0; i < n; ++i) {
        triplets.emplace_back(i, i, s(i, i));
    }
    for (std::size_t pos = drop; pos < pairs.size(); ++pos) {
        const Pair& p = pairs[pos];
        triplets.emplace_back(p.i, p.j, p.value);
        triplets.emplace_back(p.j, p.i, s(p.j, p.i));
    }
    SimilarityGraph::SparseMatrix sparse(n, n);
    sparse.setFromTriplets(triplets.begin(), triplets.end());
    SimilarityGraph out(std::move(sparse), graph.gamma(), graph.metric(), true);
    out.set_drop_record(drop > 0 ? pairs[drop - 1].value : std::numeric_limits<double>::quiet_NaN(), drop);
    return out;
}

SimilarityGraph symmetrize_max(const SimilarityGraph& graph) {
    if (!graph.is_sparse()) {
        return graph;
    }
    const auto& s = graph.sparse();
    SimilarityGraph::SparseMatrix transposed = s.transpose();
    SimilarityGraph::SparseMatrix merged = s.cwiseMax(transposed);
    SimilarityGraph out(std::move(merged), graph.gamma(), graph.metric(), true);
    out.set_drop_record(graph.drop_threshold(), graph.dropped_pairs());
    return out;
}

bool is_connected(const SimilarityGraph& graph) {
    const Eigen::Index n = graph.size();
    DisjointSets sets(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        graph.for_each_in_row(i, [&](Eigen::Index j, double v) {
            if (j != i && v > 0.0) {
                sets.unite(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            }
        });
    }
    return sets.components() <= 1;
}

void write_coordinate_dump(std::ostream& out, const SimilarityGraph& graph) {
    const auto old_precision = out.precision();
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (Eigen::Index i = 0; i < graph.size(); ++i) {
        graph.for_each_in_row(i, [&](Eigen::Index j, double v) { out << i << ',' << j << ',' << v << '\n'; });
    }
    out.precision(old_precision);
}

}  // namespace relanom
