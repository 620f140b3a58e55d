#pragma once

#include "relanom/data_prep.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace relanom {

enum class ClusterLabel { normal, anomalous };

std::string to_string(ClusterLabel label);
ClusterLabel parse_cluster_label(const std::string& text);

/// Isotropic Gaussian component of a synthetic mixture; sd == 0 gives a
/// point mass.
struct ClusterSpec {
    std::string name;
    double weight = 1.0;
    std::vector<double> mean;
    double sd = 1.0;
    ClusterLabel label = ClusterLabel::normal;
};

struct SyntheticData {
    RawDataset data;
    std::vector<ClusterLabel> labels;
    std::vector<std::size_t> cluster;  // index into the cluster list
};

/// Draws round(weight * n) points from each cluster, clusters in list order.
/// Deterministic for a given seed.
SyntheticData generate_mixture(std::span<const ClusterSpec> specs, int n, std::uint64_t seed);

/// Dense normal cluster next to a diffuse, frequent cluster of anomalies:
/// 80% N((0,0), 0.3^2 I) normal, 20% N((6,0), 1.5^2 I) anomalous.
std::vector<ClusterSpec> scraping_analogue();

/// 72% of observations at a single idle point, a sparse low-usage fringe,
/// two small medium-usage clusters (normal) and a far heavy-usage cluster
/// (anomalous) that is more frequent than either medium cluster.
std::vector<ClusterSpec> wifi_analogue();

}  // namespace relanom
