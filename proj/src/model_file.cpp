#include "relanom/model_file.hpp"

#include "relanom/csv_io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace relanom {

namespace {

using nlohmann::json;

json number(double v) {
    if (std::isnan(v)) {
        return nullptr;
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return v;
}

double number(const json& j) {
    if (j.is_null()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "inf") {
            return std::numeric_limits<double>::infinity();
        }
        if (s == "-inf") {
            return -std::numeric_limits<double>::infinity();
        }
        throw std::invalid_argument("unexpected string '" + s + "' where a number was expected");
    }
    return j.get<double>();
}

json vector_json(std::span<const double> v) {
    json arr = json::array();
    for (double x : v) {
        arr.push_back(number(x));
    }
    return arr;
}

json vector_json(const Eigen::VectorXd& v) { return vector_json(std::span<const double>(v.data(), v.size())); }

std::vector<double> std_vector(const json& arr) {
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& x : arr) {
        out.push_back(number(x));
    }
    return out;
}

Eigen::VectorXd eigen_vector(const json& arr) {
    const auto v = std_vector(arr);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string start_name(StartVector s) {
    switch (s) {
        case StartVector::uniform:
            return "uniform";
        case StartVector::random:
            return "random";
        case StartVector::rff:
            return "rff";
    }
    return "uniform";
}

StartVector parse_start(const std::string& s) {
    if (s == "uniform") {
        return StartVector::uniform;
    }
    if (s == "random") {
        return StartVector::random;
    }
    if (s == "rff") {
        return StartVector::rff;
    }
    throw std::invalid_argument("unknown start vector '" + s + "'");
}

json dataset_json(const Dataset& d) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        const Eigen::VectorXd r = d.values.row(i).transpose();
        rows.push_back(vector_json(r));
    }
    return {{"column_names", d.column_names}, {"rows", rows}};
}

Dataset dataset_from(const json& j) {
    Dataset d;
    d.column_names = j.at("column_names").get<std::vector<std::string>>();
    const auto& rows = j.at("rows");
    d.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d.column_names.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = std_vector(rows[i]);
        if (r.size() != d.column_names.size()) {
            throw std::invalid_argument("training row has the wrong number of features");
        }
        for (std::size_t c = 0; c < r.size(); ++c) {
            d.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = r[c];
        }
    }
    return d;
}

json config_json(const ModelConfig& c) {
    return {
        {"gamma", number(c.gamma)},
        {"q", number(c.q)},
        {"k", c.k ? json(*c.k) : json(nullptr)},
        {"sparsify", number(c.sparsify)},
        {"start", start_name(c.start)},
        {"rff_dim", c.rff_dim},
        {"seed", c.seed},
        {"tol", number(c.tol)},
        {"max_iter", c.max_iter},
        {"metric", to_string(c.metric)},
        {"box_cox", c.box_cox},
        {"stationary", c.stationary},
    };
}

ModelConfig config_from(const json& j, Method method) {
    ModelConfig c;
    c.method = method;
    c.gamma = number(j.at("gamma"));
    c.q = number(j.at("q"));
    if (!j.at("k").is_null()) {
        c.k = j.at("k").get<int>();
    }
    c.sparsify = number(j.at("sparsify"));
    c.start = parse_start(j.at("start").get<std::string>());
    c.rff_dim = j.at("rff_dim").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.tol = number(j.at("tol"));
    c.max_iter = j.at("max_iter").get<int>();
    c.metric = parse_metric(j.at("metric").get<std::string>());
    c.box_cox = j.at("box_cox").get<bool>();
    c.stationary = j.at("stationary").get<bool>();
    return c;
}

json transform_json(const FeatureTransform& t, bool box_cox) {
    json cols = json::array();
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
        const auto& c = t.columns[j];
        cols.push_back({{"name", t.column_names[j]},
                        {"delta", number(c.delta)},
                        {"lambda", number(c.lambda)},
                        {"mean", number(c.mean)},
                        {"sd", number(c.sd)},
                        {"boundary_warning", c.boundary_warning}});
    }
    // Records how (delta, lambda) were chosen so a fit can be reproduced.
    return {{"box_cox_search", box_cox ? "joint_delta_lambda" : "standardize_only"}, {"columns", cols}};
}

FeatureTransform transform_from(const json& j) {
    FeatureTransform t;
    for (const auto& c : j.at("columns")) {
        t.column_names.push_back(c.at("name").get<std::string>());
        t.columns.push_back({number(c.at("delta")), number(c.at("lambda")), number(c.at("mean")),
                             number(c.at("sd")), c.at("boundary_warning").get<bool>()});
    }
    return t;
}

json state_json(const FittedModel& model) {
    return std::visit(
        [](const auto& m) -> json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, VertexDegreeModel>) {
                return {{"vertex_degree", vector_json(m.vd.vd)},
                        {"stationary", m.stationary ? vector_json(*m.stationary) : json(nullptr)}};
            } else if constexpr (std::is_same_v<T, PopularityModel>) {
                return {{"s_vec", vector_json(m.s_vec)},
                        {"lambda1", number(m.lambda1)},
                        {"denom", number(m.denom)},
                        {"iterations_used", m.iterations_used},
                        {"residual", number(m.residual)},
                        {"drop_threshold", number(m.drop_threshold)}};
            } else {
                std::vector<std::int64_t> normal(m.normal_set.begin(), m.normal_set.end());
                return {{"vertex_degree", vector_json(m.vd.vd)},
                        {"normal_set", normal},
                        {"ra_q", vector_json(m.ra_q)},
                        {"ra_q_convention", "min-sum path length, 0 on the normal set"},
                        {"unreachable", m.unreachable}};
            }
        },
        model.state);
}

}  // namespace

void save_model(std::ostream& out, const FittedModel& model) {
    json root = {
        {"format_version", kModelFormatVersion},
        {"method", to_string(model.config.method)},
        {"config", config_json(model.config)},
        {"transform", transform_json(model.transform, model.config.box_cox)},
        {"training", dataset_json(model.training())},
        {"state", state_json(model)},
        {"score_distribution", vector_json(model.scores.sorted())},
    };
    out << root.dump(1) << '\n';
}

FittedModel load_model(std::istream& in) {
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        const int version = root.at("format_version").get<int>();
        if (version != kModelFormatVersion) {
            throw std::invalid_argument("unsupported model format version " + std::to_string(version));
        }
        FittedModel model;
        const Method method = parse_method(root.at("method").get<std::string>());
        model.config = config_from(root.at("config"), method);
        model.transform = transform_from(root.at("transform"));
        Dataset training = dataset_from(root.at("training"));
        const auto& st = root.at("state");
        switch (method) {
            case Method::vertex_degree: {
                VertexDegreeModel m;
                m.training = std::move(training);
                m.gamma = model.config.gamma;
                m.metric = model.config.metric;
                m.vd = {eigen_vector(st.at("vertex_degree")), model.config.gamma};
                if (!st.at("stationary").is_null()) {
                    m.stationary = eigen_vector(st.at("stationary"));
                }
                model.state = std::move(m);
                break;
            }
            case Method::popularity: {
                PopularityModel m;
                m.training = std::move(training);
                m.gamma = model.config.gamma;
                m.metric = model.config.metric;
                m.sparsify = model.config.sparsify;
                m.drop_threshold = number(st.at("drop_threshold"));
                m.s_vec = eigen_vector(st.at("s_vec"));
                m.lambda1 = number(st.at("lambda1"));
                m.denom = number(st.at("denom"));
                m.iterations_used = st.at("iterations_used").get<int>();
                m.residual = number(st.at("residual"));
                model.state = std::move(m);
                break;
            }
            case Method::shortest_path: {
                ShortestPathModel m;
                m.training = std::move(training);
                m.gamma = model.config.gamma;
                m.q = model.config.q;
                m.k = model.config.k;
                m.metric = model.config.metric;
                m.vd = {eigen_vector(st.at("vertex_degree")), model.config.gamma};
                m.ecdf = EmpiricalCdf(std::span<const double>(m.vd.vd.data(), static_cast<std::size_t>(m.vd.vd.size())));
                for (auto l : st.at("normal_set")) {
                    m.normal_set.push_back(l.get<Eigen::Index>());
                }
                m.ra_q = std_vector(st.at("ra_q"));
                m.unreachable = st.at("unreachable").get<std::size_t>();
                model.state = std::move(m);
                break;
            }
        }
        const auto sorted = std_vector(root.at("score_distribution"));
        model.scores = ScoreDistribution(sorted);
        if (static_cast<std::size_t>(model.training().rows()) != model.scores.size()) {
            throw std::invalid_argument("score distribution does not match the training data");
        }
        return model;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed model file: ") + e.what());
    }
}

void save_model_file(const std::filesystem::path& path, const FittedModel& model) {
    write_file_atomically(path, [&](std::ostream& out) { save_model(out, model); });
}

FittedModel load_model_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open model '" + path.string() + "'");
    }
    return load_model(in);
}

}  // namespace relanom
