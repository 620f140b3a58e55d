#include "relanom/shortest_path.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>

namespace relanom {

NormalSetSelection select_normal_set(const VertexDegrees& vd, double q) {
    if (!(q > 0.0 && q < 1.0)) {
        throw std::invalid_argument("q must lie in (0, 1)");
    }
    const std::span<const double> values(vd.vd.data(), static_cast<std::size_t>(vd.vd.size()));
    NormalSetSelection out{EmpiricalCdf(values), {}};
    const auto n = static_cast<double>(values.size());
    for (Eigen::Index l = 0; l < vd.vd.size(); ++l) {
        // 1 - F(vd_l) < q, kept in counts to avoid rounding at the boundary.
        const auto above = n - static_cast<double>(out.ecdf.count_at_most(vd.vd(l)));
        if (above < q * n) {
            out.normal_set.push_back(l);
        }
    }
    return out;
}

PathGraph path_weights(const SimilarityGraph& graph) {
    const Eigen::Index n = graph.size();
    PathGraph out;
    out.offsets.reserve(static_cast<std::size_t>(n) + 1);
    out.offsets.push_back(0);
    for (Eigen::Index i = 0; i < n; ++i) {
        graph.for_each_in_row(i, [&](Eigen::Index j, double s) {
            if (std::isnan(s) || s < 0.0 || s > 1.0) {
                throw std::invalid_argument("path weights need similarities in [0, 1]");
            }
            if (j == i || s == 0.0) {
                return;
            }
            out.targets.push_back(j);
            out.weights.push_back(-std::log(s));
        });
        out.offsets.push_back(static_cast<Eigen::Index>(out.targets.size()));
    }
    return out;
}

std::vector<double> multi_source_shortest_paths(const PathGraph& graph, std::span<const Eigen::Index> sources) {
    const Eigen::Index n = graph.size();
    std::vector<double> dist(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    using Entry = std::pair<double, Eigen::Index>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
    for (Eigen::Index s : sources) {
        if (s < 0 || s >= n) {
            throw std::out_of_range("source index out of range");
        }
        dist[static_cast<std::size_t>(s)] = 0.0;
        frontier.emplace(0.0, s);
    }
    std::vector<bool> settled(static_cast<std::size_t>(n), false);
    while (!frontier.empty()) {
        const auto [d, u] = frontier.top();
        frontier.pop();
        if (settled[static_cast<std::size_t>(u)]) {
            continue;
        }
        settled[static_cast<std::size_t>(u)] = true;
        const auto begin = static_cast<std::size_t>(graph.offsets[static_cast<std::size_t>(u)]);
        const auto end = static_cast<std::size_t>(graph.offsets[static_cast<std::size_t>(u) + 1]);
        for (std::size_t e = begin; e < end; ++e) {
            const Eigen::Index v = graph.targets[e];
            const double candidate = d + graph.weights[e];
            if (candidate < dist[static_cast<std::size_t>(v)]) {
                dist[static_cast<std::size_t>(v)] = candidate;
                frontier.emplace(candidate, v);
            }
        }
    }
    return dist;
}

ShortestPathModel fit_shortest_path(const Dataset& data, double gamma, double q, std::optional<int> k,
                                    DistanceMetric metric) {
    ShortestPathModel model;
    model.training = data;
    model.gamma = gamma;
    model.q = q;
    model.k = k;
    model.metric = metric;

    std::optional<SimilarityGraph> dense;
    if (data.rows() <= kMaxDenseNodes) {
        dense.emplace(rbf_similarity_matrix(data, gamma, metric));
        model.vd = vertex_degrees(*dense);
    } else {
        model.vd = kernel_vertex_degrees(data, gamma, metric);
    }
    NormalSetSelection selection = select_normal_set(model.vd, q);
    model.ecdf = std::move(selection.ecdf);
    model.normal_set = std::move(selection.normal_set);

    PathGraph paths;
    if (k) {
        const SimilarityGraph directed =
            dense ? knn_truncate(*dense, *k) : knn_similarity_graph(data, gamma, metric, *k);
        paths = path_weights(symmetrize_max(directed));
    } else {
        if (!dense) {
            throw std::invalid_argument("complete path graph refused above " + std::to_string(kMaxDenseNodes) +
                                        " observations; pass k");
        }
        paths = path_weights(*dense);
    }
    model.ra_q = multi_source_shortest_paths(paths, model.normal_set);
    for (double d : model.ra_q) {
        model.unreachable += std::isinf(d) ? 1 : 0;
    }
    return model;
}

double score_new_shortest_path(const ShortestPathModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < model.training.rows(); ++j) {
        const double ra = model.ra_q[static_cast<std::size_t>(j)];
        if (std::isinf(ra)) {
            continue;
        }
        const double d = distance(model.training.values.row(j).transpose(), x, model.metric);
        // Same edge length as path_weights, so training rows reproduce ra_q
        // exactly; falls back to d^2/gamma once the kernel underflows.
        const double s = rbf_kernel(d, model.gamma);
        const double w = s > 0.0 ? -std::log(s) : d * d / model.gamma;
        best = std::min(best, w + ra);
    }
    return best;
}

}  // namespace relanom
