#include "relanom/pipeline.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace relanom {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

VertexDegreeModel fit_vertex_degree(const Dataset& data, const ModelConfig& config) {
    VertexDegreeModel model;
    model.training = data;
    model.gamma = config.gamma;
    model.metric = config.metric;
    if (data.rows() <= kMaxDenseNodes) {
        const SimilarityGraph graph = rbf_similarity_matrix(data, config.gamma, config.metric);
        model.vd = vertex_degrees(graph);
        if (config.stationary) {
            model.stationary = stationary_distribution(transition_matrix(graph), 1e-10, config.max_iter).p;
        }
    } else {
        if (config.stationary) {
            throw std::invalid_argument("stationary distribution needs a dense graph");
        }
        model.vd = kernel_vertex_degrees(data, config.gamma, config.metric);
    }
    return model;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::string to_string(Method method) {
    switch (method) {
        case Method::vertex_degree:
            return "vertex_degree";
        case Method::popularity:
            return "popularity";
        case Method::shortest_path:
            return "shortest_path";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    if (name == "vertex_degree") {
        return Method::vertex_degree;
    }
    if (name == "popularity") {
        return Method::popularity;
    }
    if (name == "shortest_path") {
        return Method::shortest_path;
    }
    throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

const Dataset& FittedModel::training() const {
    return std::visit([](const auto& m) -> const Dataset& { return m.training; }, state);
}

FittedModel fit_model(const RawDataset& data, const ModelConfig& config) {
    FittedModel model;
    model.config = config;
    PreprocessOptions prep;
    prep.box_cox = config.box_cox;
    model.transform = fit_preprocessor(data, prep);
    const Dataset ds = apply_preprocessor(data, model.transform);

    switch (config.method) {
        case Method::vertex_degree:
            model.state = fit_vertex_degree(ds, config);
            break;
        case Method::popularity: {
            PopularityOptions options;
            options.metric = config.metric;
            options.sparsify = config.sparsify;
            options.start = config.start;
            options.rff_dim = config.rff_dim;
            options.seed = config.seed;
            options.tol = config.tol;
            options.max_iter = config.max_iter;
            model.state = fit_popularity(ds, config.gamma, options);
            break;
        }
        case Method::shortest_path:
            model.state = fit_shortest_path(ds, config.gamma, config.q, config.k, config.metric);
            break;
    }
    const auto scores = training_scores(model);
    model.scores = ScoreDistribution(scores);
    return model;
}

std::vector<double> training_scores(const FittedModel& model) {
    return std::visit(Overloaded{
                          [](const VertexDegreeModel& m) { return to_std(-m.vd.vd); },
                          [](const PopularityModel& m) { return to_std(relative_anomaly(m)); },
                          [](const ShortestPathModel& m) { return m.ra_q; },
                      },
                      model.state);
}

double score_model_space(const FittedModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
    return std::visit(Overloaded{
                          [&](const VertexDegreeModel& m) {
                              return -vertex_degree_of(m.training, x, m.gamma, m.metric);
                          },
                          [&](const PopularityModel& m) { return score_new(m, x); },
                          [&](const ShortestPathModel& m) { return score_new_shortest_path(m, x); },
                      },
                      model.state);
}

ScoredRows score_raw(const FittedModel& model, const RawDataset& data) {
    const Dataset ds = apply_preprocessor(data, model.transform);
    if (ds.cols() != model.training().cols()) {
        throw std::invalid_argument("observations do not match the model's feature count");
    }
    const bool baseline = model.config.method == Method::vertex_degree;
    ScoredRows rows;
    for (Eigen::Index i = 0; i < ds.rows(); ++i) {
        const double anomaly = score_model_space(model, ds.values.row(i).transpose());
        rows.anomaly.push_back(anomaly);
        rows.native.push_back(baseline ? -anomaly : anomaly);
        rows.dora.push_back(model.scores.dora(anomaly));
    }
    return rows;
}

ScoredRows score_training(const FittedModel& model) {
    ScoredRows rows;
    rows.anomaly = training_scores(model);
    const bool baseline = model.config.method == Method::vertex_degree;
    for (double a : rows.anomaly) {
        rows.native.push_back(baseline ? -a : a);
        rows.dora.push_back(model.scores.dora(a));
    }
    return rows;
}

void write_scores(std::ostream& out, const FittedModel& model, const ScoredRows& rows, bool training_rows,
                  const std::vector<bool>* labels, bool display_transform) {
    const auto old_precision = out.precision();
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    const Method method = model.config.method;
    switch (method) {
        case Method::vertex_degree:
            out << "row_index,vertex_degree,stationary_probability";
            break;
        case Method::popularity:
            out << "row_index,relative_anomaly,dora";
            break;
        case Method::shortest_path:
            out << "row_index,ra_q,dora,is_normal_set";
            break;
    }
    if (labels) {
        out << ",is_anomaly";
    }
    if (display_transform && method == Method::popularity) {
        out << ",display";
    }
    out << '\n';

    std::vector<bool> in_normal_set;
    if (const auto* sp = std::get_if<ShortestPathModel>(&model.state); sp && training_rows) {
        in_normal_set.assign(sp->ra_q.size(), false);
        for (Eigen::Index l : sp->normal_set) {
            in_normal_set[static_cast<std::size_t>(l)] = true;
        }
    }
    const auto* vd = std::get_if<VertexDegreeModel>(&model.state);

    for (std::size_t i = 0; i < rows.native.size(); ++i) {
        out << i << ',' << rows.native[i];
        switch (method) {
            case Method::vertex_degree:
                out << ',';
                if (training_rows && vd->stationary) {
                    out << (*vd->stationary)(static_cast<Eigen::Index>(i));
                }
                break;
            case Method::popularity:
                out << ',' << rows.dora[i];
                break;
            case Method::shortest_path:
                out << ',' << rows.dora[i] << ',';
                if (training_rows) {
                    out << (in_normal_set[i] ? 1 : 0);
                }
                break;
        }
        if (labels) {
            out << ',' << ((*labels)[i] ? 1 : 0);
        }
        if (display_transform && method == Method::popularity) {
            out << ',' << -std::log(-rows.native[i]);
        }
        out << '\n';
    }
    out.precision(old_precision);
}

std::vector<GridPoint> grid_scores(const FittedModel& model, const GridBounds& bounds, int resolution) {
    if (model.training().cols() != 2) {
        throw std::invalid_argument("grid scores need a two-dimensional model");
    }
    if (resolution < 2) {
        throw std::invalid_argument("grid resolution must be at least 2");
    }
    if (!(bounds.x_max > bounds.x_min) || !(bounds.y_max > bounds.y_min)) {
        throw std::invalid_argument("grid bounds must have positive extent");
    }
    std::vector<GridPoint> points;
    points.reserve(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution));
    const double steps = static_cast<double>(resolution - 1);
    Eigen::VectorXd x(2);
    for (int a = 0; a < resolution; ++a) {
        x(0) = bounds.x_min + (bounds.x_max - bounds.x_min) * static_cast<double>(a) / steps;
        for (int b = 0; b < resolution; ++b) {
            x(1) = bounds.y_min + (bounds.y_max - bounds.y_min) * static_cast<double>(b) / steps;
            points.push_back({x(0), x(1), score_model_space(model, x)});
        }
    }
    return points;
}

GridBounds default_grid_bounds(const FittedModel& model, double margin) {
    const Eigen::MatrixXd& v = model.training().values;
    if (v.cols() != 2) {
        throw std::invalid_argument("grid scores need a two-dimensional model");
    }
    const Eigen::Vector2d lo = v.colwise().minCoeff().transpose();
    const Eigen::Vector2d hi = v.colwise().maxCoeff().transpose();
    const Eigen::Vector2d pad = margin * (hi - lo);
    return {lo(0) - pad(0), hi(0) + pad(0), lo(1) - pad(1), hi(1) + pad(1)};
}

std::pair<double, double> precision_recall(const std::vector<bool>& predicted, const std::vector<bool>& truth) {
    if (predicted.size() != truth.size()) {
        throw std::invalid_argument("prediction and ground truth differ in length");
    }
    std::size_t tp = 0;
    std::size_t labeled = 0;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        tp += predicted[i] && truth[i] ? 1 : 0;
        labeled += predicted[i] ? 1 : 0;
        positives += truth[i] ? 1 : 0;
    }
    const double precision = labeled ? static_cast<double>(tp) / static_cast<double>(labeled) : 0.0;
    const double recall = positives ? static_cast<double>(tp) / static_cast<double>(positives) : 0.0;
    return {precision, recall};
}

std::vector<MethodComparison> compare_methods(const RawDataset& data, const std::vector<bool>& is_anomaly,
                                              const CompareConfig& config) {
    std::vector<MethodComparison> out;
    for (Method method : {Method::vertex_degree, Method::popularity, Method::shortest_path}) {
        ModelConfig mc = config.base;
        mc.method = method;
        mc.gamma = method == Method::vertex_degree ? config.baseline_gamma : config.gamma;
        mc.q = config.q;
        const FittedModel model = fit_model(data, mc);
        const auto scores = training_scores(model);
        const auto labels = label_top_fraction(scores, config.top_fraction);
        const auto [precision, recall] = precision_recall(labels, is_anomaly);
        MethodComparison row{method, precision, recall, 0, 0, 0};
        for (std::size_t i = 0; i < labels.size(); ++i) {
            row.true_positives += labels[i] && is_anomaly[i] ? 1 : 0;
            row.labeled += labels[i] ? 1 : 0;
            row.anomalies += is_anomaly[i] ? 1 : 0;
        }
        out.push_back(row);
    }
    return out;
}

}  // namespace relanom
