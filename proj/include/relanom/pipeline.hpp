#pragma once

#include "relanom/baseline_vd.hpp"
#include "relanom/data_prep.hpp"
#include "relanom/popularity.hpp"
#include "relanom/scoring_explain.hpp"
#include "relanom/shortest_path.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace relanom {

enum class Method { vertex_degree, popularity, shortest_path };

std::string to_string(Method method);
Method parse_method(std::string_view name);

struct ModelConfig {
    Method method = Method::popularity;
    double gamma = 0.2;
    double q = 0.5;
    std::optional<int> k;
    double sparsify = 0.0;
    StartVector start = StartVector::uniform;
    int rff_dim = 256;
    std::uint64_t seed = 0;
    double tol = 1e-8;
    int max_iter = 10000;
    DistanceMetric metric = DistanceMetric::euclidean;
    bool box_cox = true;      // false: standardize only
    bool stationary = false;  // vertex_degree: also solve for the random-walk stationary vector
};

struct VertexDegreeModel {
    Dataset training;
    double gamma = 0.5;
    DistanceMetric metric = DistanceMetric::euclidean;
    VertexDegrees vd;
    std::optional<Eigen::VectorXd> stationary;
};

/// Everything needed to score new raw observations: the fitted transform,
/// the method-specific state and the training score distribution for DORA.
struct FittedModel {
    ModelConfig config;
    FeatureTransform transform;
    std::variant<VertexDegreeModel, PopularityModel, ShortestPathModel> state;
    ScoreDistribution scores;

    const Dataset& training() const;
};

FittedModel fit_model(const RawDataset& data, const ModelConfig& config);

/// Anomaly score of every training row, oriented so that larger means more
/// anomalous: -vd, RA = -s, or RA_q.
std::vector<double> training_scores(const FittedModel& model);

/// Score of one observation already in model space.
double score_model_space(const FittedModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Per-row method-native score for raw observations (vertex degree for the
/// baseline, RA for popularity, RA_q for shortest path) with its DORA.
struct ScoredRows {
    std::vector<double> native;
    std::vector<double> anomaly;  // larger = more anomalous
    std::vector<double> dora;
};

ScoredRows score_raw(const FittedModel& model, const RawDataset& data);
ScoredRows score_training(const FittedModel& model);

/// Writes the method's score CSV. Baseline: row_index,vertex_degree,
/// stationary_probability. Popularity: row_index,relative_anomaly,dora.
/// Shortest path: row_index,ra_q,dora,is_normal_set. Optional columns:
/// is_anomaly when `labels` is given, display (= -ln(-RA)) for popularity
/// when `display_transform` is set.
void write_scores(std::ostream& out, const FittedModel& model, const ScoredRows& rows, bool training_rows,
                  const std::vector<bool>* labels, bool display_transform);

struct GridBounds {
    double x_min = 0.0;
    double x_max = 1.0;
    double y_min = 0.0;
    double y_max = 1.0;
};

struct GridPoint {
    double x;
    double y;
    double score;
};

/// Regular resolution x resolution grid in model space, x-major order.
/// Rejects models whose data is not two-dimensional.
std::vector<GridPoint> grid_scores(const FittedModel& model, const GridBounds& bounds, int resolution);

/// Training data bounding box grown by `margin` of its extent on each side.
GridBounds default_grid_bounds(const FittedModel& model, double margin = 0.1);

struct MethodComparison {
    Method method;
    double precision = 0.0;
    double recall = 0.0;
    std::size_t true_positives = 0;
    std::size_t labeled = 0;
    std::size_t anomalies = 0;
};

struct CompareConfig {
    double baseline_gamma = 0.5;
    double gamma = 0.2;
    double q = 0.5;
    double top_fraction = 0.2;
    ModelConfig base;  // remaining settings shared by all three fits
};

/// Fits all three methods on `data`, labels the top fraction of each and
/// measures it against ground truth.
std::vector<MethodComparison> compare_methods(const RawDataset& data, const std::vector<bool>& is_anomaly,
                                              const CompareConfig& config);

std::pair<double, double> precision_recall(const std::vector<bool>& predicted, const std::vector<bool>& truth);

}  // namespace relanom
