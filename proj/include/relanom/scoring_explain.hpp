#pragma once

#include "relanom/data_prep.hpp"
#include "relanom/ecdf.hpp"
#include "relanom/similarity_graph.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace relanom {

/// Training anomaly scores (larger = more anomalous), kept sorted.
class ScoreDistribution {
public:
    ScoreDistribution() = default;
    explicit ScoreDistribution(std::span<const double> training_scores);

    std::size_t size() const { return cdf_.size(); }
    const std::vector<double>& sorted() const { return cdf_.sorted(); }

    /// Degree of anomaly r / (n + 1) with r = #{training scores <= score};
    /// a score below every training score maps to 1 / (2 (n + 1)).
    double dora(double score) const;

private:
    EmpiricalCdf cdf_;
};

inline double dora(const ScoreDistribution& dist, double score) { return dist.dora(score); }

/// Marks exactly ceil(fraction * n) of the largest scores. Ties at the cut go
/// to the smaller index.
std::vector<bool> label_top_fraction(std::span<const double> scores, double fraction);

struct Explanation {
    Eigen::VectorXd anomalous;
    Eigen::Index closest_index = -1;
    Eigen::VectorXd closest_normal;
    Eigen::VectorXd diff;  // anomalous - closest_normal
    std::vector<std::string> feature_names;
    std::vector<Eigen::Index> ranked_features;  // by |diff| descending, ties by index
    double p = 0.0;
};

/// Finds the training observation with DORA below p that is closest to
/// `anomalous` (ties by smaller index) and ranks features by how far the
/// anomalous observation deviates from it. L1 distance favours explanations
/// with a few large univariate changes.
/// Throws std::invalid_argument when no training observation has DORA < p.
Explanation explain_deviations(const Eigen::Ref<const Eigen::VectorXd>& anomalous, const Dataset& training,
                               std::span<const double> dora_scores, double p,
                               DistanceMetric metric = DistanceMetric::manhattan);

/// Table with header feature,anomalous_value,closest_normal_value,difference,
/// rows in ranked order. `aligned` pads columns for reading in a terminal;
/// otherwise plain CSV.
void write_explanation(std::ostream& out, const Explanation& explanation, bool aligned);

}  // namespace relanom
