#include "relanom/synth.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace relanom {

std::string to_string(ClusterLabel label) { return label == ClusterLabel::normal ? "normal" : "anomalous"; }

ClusterLabel parse_cluster_label(const std::string& text) {
    if (text == "normal") {
        return ClusterLabel::normal;
    }
    if (text == "anomalous") {
        return ClusterLabel::anomalous;
    }
    throw std::invalid_argument("unknown label '" + text + "'");
}

SyntheticData generate_mixture(std::span<const ClusterSpec> specs, int n, std::uint64_t seed) {
    if (specs.empty()) {
        throw std::invalid_argument("mixture needs at least one cluster");
    }
    if (n < 2) {
        throw std::invalid_argument("mixture needs n >= 2");
    }
    const std::size_t d = specs.front().mean.size();
    double weight_sum = 0.0;
    for (const auto& spec : specs) {
        if (spec.mean.size() != d || d == 0) {
            throw std::invalid_argument("cluster means must share a nonzero dimension");
        }
        if (!(spec.weight > 0.0 && spec.weight <= 1.0) || !(spec.sd >= 0.0)) {
            throw std::invalid_argument("cluster weight must lie in (0, 1] and sd must be nonnegative");
        }
        weight_sum += spec.weight;
    }
    if (std::abs(weight_sum - 1.0) > 1e-9) {
        throw std::invalid_argument("cluster weights must sum to 1");
    }

    std::vector<long> counts;
    long total = 0;
    for (const auto& spec : specs) {
        counts.push_back(std::lround(spec.weight * static_cast<double>(n)));
        total += counts.back();
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> standard(0.0, 1.0);
    SyntheticData out;
    out.data.values.resize(total, static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) {
        out.data.column_names.push_back("x" + std::to_string(j + 1));
    }
    Eigen::Index row = 0;
    for (std::size_t c = 0; c < specs.size(); ++c) {
        for (long m = 0; m < counts[c]; ++m, ++row) {
            for (std::size_t j = 0; j < d; ++j) {
                const double z = standard(rng);
                out.data.values(row, static_cast<Eigen::Index>(j)) = specs[c].mean[j] + specs[c].sd * z;
            }
            out.labels.push_back(specs[c].label);
            out.cluster.push_back(c);
        }
    }
    return out;
}

std::vector<ClusterSpec> scraping_analogue() {
    return {
        {"users", 0.8, {0.0, 0.0}, 0.3, ClusterLabel::normal},
        {"scrapers", 0.2, {6.0, 0.0}, 1.5, ClusterLabel::anomalous},
    };
}

std::vector<ClusterSpec> wifi_analogue() {
    return {
        {"idle", 0.72, {0.0, 0.0}, 0.0, ClusterLabel::normal},
        {"low_usage", 0.08, {2.0, 0.0}, 0.25, ClusterLabel::normal},
        {"medium_low", 0.035, {3.5, -2.0}, 0.65, ClusterLabel::normal},
        {"medium_high", 0.035, {3.5, 2.0}, 0.65, ClusterLabel::normal},
        {"heavy_usage", 0.13, {20.0, 1.5}, 1.6, ClusterLabel::anomalous},
    };
}

}  // namespace relanom
