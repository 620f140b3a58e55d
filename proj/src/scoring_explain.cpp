#include "relanom/scoring_explain.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace relanom {

ScoreDistribution::ScoreDistribution(std::span<const double> training_scores) : cdf_(training_scores) {
    if (training_scores.empty()) {
        throw std::invalid_argument("score distribution needs at least one training score");
    }
}

double ScoreDistribution::dora(double score) const {
    const auto n1 = static_cast<double>(cdf_.size() + 1);
    const auto r = cdf_.count_at_most(score);
    if (r == 0) {
        return 1.0 / (2.0 * n1);
    }
    return static_cast<double>(r) / n1;
}

std::vector<bool> label_top_fraction(std::span<const double> scores, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw std::invalid_argument("fraction must lie in (0, 1)");
    }
    if (scores.empty()) {
        throw std::invalid_argument("no scores to label");
    }
    const auto n = scores.size();
    // The relative slack keeps decimal fractions such as 0.13 * 1000 from
    // rounding up past the integer they represent.
    const double target = fraction * static_cast<double>(n) * (1.0 - 1e-12);
    const auto count = std::min(n, static_cast<std::size_t>(std::ceil(target)));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::vector<bool> labels(n, false);
    for (std::size_t m = 0; m < count; ++m) {
        labels[order[m]] = true;
    }
    return labels;
}

Explanation explain_deviations(const Eigen::Ref<const Eigen::VectorXd>& anomalous, const Dataset& training,
                               std::span<const double> dora_scores, double p, DistanceMetric metric) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("normality threshold p must lie in (0, 1)");
    }
    if (dora_scores.size() != static_cast<std::size_t>(training.rows())) {
        throw std::invalid_argument("one DORA value per training observation is required");
    }
    if (anomalous.size() != training.cols()) {
        throw std::invalid_argument("observation length does not match the training data");
    }
    Eigen::Index best = -1;
    double best_distance = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < training.rows(); ++i) {
        if (!(dora_scores[static_cast<std::size_t>(i)] < p)) {
            continue;
        }
        const double d = distance(training.values.row(i).transpose(), anomalous, metric);
        if (d < best_distance) {
            best_distance = d;
            best = i;
        }
    }
    if (best < 0) {
        std::ostringstream msg;
        msg << "no training observation has DORA below p = " << p << "; choose a larger p";
        throw std::invalid_argument(msg.str());
    }

    Explanation out;
    out.anomalous = anomalous;
    out.closest_index = best;
    out.closest_normal = training.values.row(best).transpose();
    out.diff = out.anomalous - out.closest_normal;
    out.feature_names = training.column_names;
    out.p = p;
    out.ranked_features.resize(static_cast<std::size_t>(training.cols()));
    std::iota(out.ranked_features.begin(), out.ranked_features.end(), Eigen::Index{0});
    std::stable_sort(out.ranked_features.begin(), out.ranked_features.end(), [&](Eigen::Index a, Eigen::Index b) {
        return std::abs(out.diff(a)) > std::abs(out.diff(b));
    });
    return out;
}

void write_explanation(std::ostream& out, const Explanation& explanation, bool aligned) {
    const auto old_precision = out.precision();
    auto name_of = [&](Eigen::Index j) {
        return static_cast<std::size_t>(j) < explanation.feature_names.size()
                   ? explanation.feature_names[static_cast<std::size_t>(j)]
                   : "x" + std::to_string(j + 1);
    };
    if (aligned) {
        std::size_t width = 7;
        for (Eigen::Index j : explanation.ranked_features) {
            width = std::max(width, name_of(j).size());
        }
        out << std::left << std::setw(static_cast<int>(width)) << "feature" << std::right << std::setw(18)
            << "anomalous_value" << std::setw(22) << "closest_normal_value" << std::setw(14) << "difference"
            << '\n';
        out << std::setprecision(6);
        for (Eigen::Index j : explanation.ranked_features) {
            out << std::left << std::setw(static_cast<int>(width)) << name_of(j) << std::right << std::setw(18)
                << explanation.anomalous(j) << std::setw(22) << explanation.closest_normal(j) << std::setw(14)
                << explanation.diff(j) << '\n';
        }
    } else {
        out << "feature,anomalous_value,closest_normal_value,difference\n";
        out << std::setprecision(std::numeric_limits<double>::max_digits10);
        for (Eigen::Index j : explanation.ranked_features) {
            out << name_of(j) << ',' << explanation.anomalous(j) << ',' << explanation.closest_normal(j) << ','
                << explanation.diff(j) << '\n';
        }
    }
    out.precision(old_precision);
}

}  // namespace relanom
