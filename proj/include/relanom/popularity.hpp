#pragma once

#include "relanom/baseline_vd.hpp"
#include "relanom/similarity_graph.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <optional>

namespace relanom {

struct PowerIterationResult {
    Eigen::VectorXd vector;  // unit L2 norm, all-positive orientation
    double eigenvalue = 0.0;
    int iterations = 0;
    double residual = 0.0;   // ||S s - (s^T S s) s||_2 at the returned s
};

/// Leading eigenpair of a symmetric nonnegative matrix with positive
/// diagonal by the power method s <- S s / ||S s||_2. The start vector (its
/// absolute value is taken) defaults to the uniform vector. Stops once the
/// eigen-residual is at most tol.
///
/// When the leading eigenvalue is repeated (e.g. S = I) any vector meeting
/// the residual criterion is returned, so the ordering of entries is not
/// unique; the uniform start then comes back unchanged.
///
/// Throws ConvergenceError after max_iter iterations or on NaN/Inf.
PowerIterationResult power_iteration(const SimilarityGraph& S, const std::optional<Eigen::VectorXd>& start = {},
                                     double tol = 1e-8, int max_iter = 10000);
PowerIterationResult power_iteration(const Eigen::MatrixXd& S, const std::optional<Eigen::VectorXd>& start = {},
                                     double tol = 1e-8, int max_iter = 10000);

enum class StartVector { uniform, random, rff };

struct PopularityOptions {
    DistanceMetric metric = DistanceMetric::euclidean;
    double sparsify = 0.0;  // fraction of smallest off-diagonal pairs to drop
    StartVector start = StartVector::uniform;
    int rff_dim = 256;
    std::uint64_t seed = 0;
    double tol = 1e-8;
    int max_iter = 10000;
};

struct PopularityModel {
    Dataset training;
    double gamma = 0.0;
    DistanceMetric metric = DistanceMetric::euclidean;
    double sparsify = 0.0;
    // Similarities at or below this were dropped from the fitted graph; NaN
    // for a dense fit.
    double drop_threshold = std::numeric_limits<double>::quiet_NaN();
    Eigen::VectorXd s_vec;
    double lambda1 = 0.0;
    double denom = 0.0;  // s^T S s on the fitted graph
    int iterations_used = 0;
    double residual = 0.0;
    // Graph used for the fit. Not persisted; empty after loading a model file.
    std::shared_ptr<const SimilarityGraph> graph;
};

PopularityModel fit_popularity(const Dataset& data, double gamma, const PopularityOptions& options = {});

/// RA_i = -s_i. All negative; closer to zero is more anomalous.
Eigen::VectorXd relative_anomaly(const PopularityModel& model);

/// D x n random Fourier feature matrix z(x) = sqrt(2/D) cos(W x + b) with
/// W_ij ~ N(0, 2/gamma) and b_i ~ U[0, 2pi), so that E[z(x)^T z(y)] equals
/// exp(-||x - y||^2 / gamma).
Eigen::MatrixXd random_fourier_features(const Dataset& data, int D, double gamma, std::uint64_t seed);

/// |Phi^T lev(Phi Phi^T)| normalised to unit length, where lev is the
/// leading eigenvector of the D x D system found by power iteration.
Eigen::VectorXd rff_warm_start(const Dataset& data, int D, double gamma, std::uint64_t seed);

/// Seeded random unit vector with entries in (0, 1] before normalisation.
Eigen::VectorXd random_positive_start(Eigen::Index n, std::uint64_t seed);

/// Nystrom extension: -(sum_j s(x, x_j) s_j) / denom for an observation
/// already mapped into model space. For a thresholded model, similarities at
/// or below the recorded drop threshold count as zero.
double score_new(const PopularityModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace relanom
