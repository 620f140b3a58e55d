#include "relanom/baseline_vd.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

using namespace relanom;

namespace {

SimilarityGraph two_node_graph() {
    Eigen::MatrixXd S(2, 2);
    S << 1.0, 0.5, 0.5, 1.0;
    return SimilarityGraph(S, 1.0, DistanceMetric::euclidean);
}

// Stationary vector by repeated squaring of P until all rows agree.
Eigen::VectorXd matrix_power_oracle(Eigen::MatrixXd P) {
    for (int it = 0; it < 200; ++it) {
        double spread = 0.0;
        for (Eigen::Index i = 1; i < P.rows(); ++i) {
            spread = std::max(spread, (P.row(i) - P.row(0)).cwiseAbs().maxCoeff());
        }
        if (spread <= 1e-12) {
            break;
        }
        P = P * P;
    }
    return P.row(0).transpose();
}

std::vector<Eigen::Index> ascending_order(const Eigen::VectorXd& v) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(v.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return v(a) < v(b); });
    return idx;
}

}  // namespace

TEST_CASE("vertex degrees: small cases") {
    const VertexDegrees two = vertex_degrees(two_node_graph());
    CHECK(two.vd(0) == doctest::Approx(1.5));
    CHECK(two.vd(1) == doctest::Approx(1.5));

    const Dataset line = testing::points_on_line({0.0, 1.0, 10.0});
    const SimilarityGraph g = rbf_similarity_matrix(line, 1.0, DistanceMetric::euclidean);
    const VertexDegrees vd = vertex_degrees(g);
    const Eigen::MatrixXd& S = g.dense();
    for (Eigen::Index i = 0; i < 3; ++i) {
        CHECK(vd.vd(i) == doctest::Approx(S(i, 0) + S(i, 1) + S(i, 2)));
    }
    CHECK(vd.vd(2) < vd.vd(0));
    CHECK(vd.vd(2) < vd.vd(1));

    const Dataset same = testing::points_on_line({2.0, 2.0, 2.0, 2.0});
    const VertexDegrees flat = vertex_degrees(rbf_similarity_matrix(same, 0.3, DistanceMetric::euclidean));
    for (Eigen::Index i = 0; i < 4; ++i) {
        CHECK(flat.vd(i) == 4.0);
    }
}

TEST_CASE("kernel_vertex_degrees and vertex_degree_of agree with the dense graph") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 20; ++t) {
        const Dataset ds = testing::random_dataset(rng, 25, 3);
        const auto metric = t % 2 ? DistanceMetric::manhattan : DistanceMetric::euclidean;
        const VertexDegrees dense = vertex_degrees(rbf_similarity_matrix(ds, 0.8, metric));
        const VertexDegrees streamed = kernel_vertex_degrees(ds, 0.8, metric);
        CHECK((dense.vd - streamed.vd).cwiseAbs().maxCoeff() < 1e-12);
        for (Eigen::Index i = 0; i < ds.rows(); ++i) {
            CHECK(vertex_degree_of(ds, ds.values.row(i).transpose(), 0.8, metric) ==
                  doctest::Approx(dense.vd(i)).epsilon(1e-12));
        }
    }
}

TEST_CASE("ranking by vertex degree ignores the diagonal") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 100; ++t) {
        const Dataset ds = testing::random_dataset(rng, 15, 2);
        const VertexDegrees vd = vertex_degrees(rbf_similarity_matrix(ds, 0.5, DistanceMetric::euclidean));
        const Eigen::VectorXd without = vd.vd.array() - 1.0;
        CHECK(ascending_order(vd.vd) == ascending_order(without));
    }
}

TEST_CASE("transition matrix") {
    const Eigen::MatrixXd P = transition_matrix(two_node_graph());
    CHECK(P(0, 0) == doctest::Approx(2.0 / 3.0));
    CHECK(P(0, 1) == doctest::Approx(1.0 / 3.0));
    CHECK(P(1, 0) == doctest::Approx(1.0 / 3.0));
    CHECK(P(1, 1) == doctest::Approx(2.0 / 3.0));

    const Dataset spread = testing::points_on_line({0.0, 1.0, 2.0, 3.0});
    const Eigen::MatrixXd Pi = transition_matrix(rbf_similarity_matrix(spread, 1e-3, DistanceMetric::euclidean));
    CHECK((Pi - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);

    std::mt19937_64 rng(14);
    for (int t = 0; t < 100; ++t) {
        const Dataset ds = testing::random_dataset(rng, 10, 2);
        const Eigen::MatrixXd Q = transition_matrix(rbf_similarity_matrix(ds, 0.5, DistanceMetric::euclidean));
        CHECK((Q.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("stationary distribution of a symmetric graph is proportional to the degrees") {
    const StationaryResult two = stationary_distribution(transition_matrix(two_node_graph()));
    CHECK(two.p(0) == doctest::Approx(0.5));
    CHECK(two.p(1) == doctest::Approx(0.5));

    std::mt19937_64 rng(15);
    for (int t = 0; t < 50; ++t) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 40);
        const SimilarityGraph g(testing::random_positive_symmetric(rng, n), 1.0, DistanceMetric::euclidean);
        const Eigen::VectorXd vd = vertex_degrees(g).vd;
        const StationaryResult r = stationary_distribution(transition_matrix(g));
        CHECK(r.p.minCoeff() > 0.0);
        CHECK(r.p.sum() == doctest::Approx(1.0));
        CHECK((r.p - vd / vd.sum()).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("stationary distribution matches the matrix-power oracle") {
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int t = 0; t < 20; ++t) {
        // Asymmetric positive stochastic matrix.
        Eigen::MatrixXd P(5, 5);
        for (Eigen::Index i = 0; i < 5; ++i) {
            for (Eigen::Index j = 0; j < 5; ++j) {
                P(i, j) = u(rng);
            }
            P.row(i) /= P.row(i).sum();
        }
        const Eigen::VectorXd oracle = matrix_power_oracle(P);
        const StationaryResult r = stationary_distribution(P);
        CHECK((r.p - oracle).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("stationary distribution rejects reducible input") {
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(3, 3);
    CHECK_THROWS_AS(stationary_distribution(P), std::invalid_argument);
}

TEST_CASE("stationarity identity") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 50; ++t) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 49);
        const SimilarityGraph g(testing::random_positive_symmetric(rng, n), 1.0, DistanceMetric::euclidean);
        const Eigen::VectorXd d = g.row_sums();
        const Eigen::MatrixXd P = transition_matrix(g);
        CHECK((P.transpose() * d - d).lpNorm<1>() / d.lpNorm<1>() <= 1e-12);
    }
}

TEST_CASE("vd_knn_approx closed forms") {
    const Dataset pair = testing::points_on_line({0.0, 1.0});
    const Eigen::VectorXd one = vd_knn_approx(pair, 1, 1.0, 1.0);
    CHECK(one(0) == doctest::Approx(std::exp(-1.0)));
    CHECK(one(0) == doctest::Approx(0.36788).epsilon(1e-4));

    const Dataset triple = testing::points_on_line({0.0, -1.0, 1.0});
    const Eigen::VectorXd two = vd_knn_approx(triple, 2, 1.0, 1.0);
    CHECK(two(0) == doctest::Approx(2.0 * std::exp(-1.0)));
    CHECK(two(0) == doctest::Approx(0.73576).epsilon(1e-4));

    // Tangency: equal to the exact truncated degree when all distances are v.
    const Eigen::VectorXd exact = vd_knn_exact(triple, 2, 1.0);
    CHECK(two(0) == doctest::Approx(exact(0)));

    CHECK_THROWS_AS(vd_knn_approx(pair, 0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(vd_knn_approx(pair, 1, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(vd_knn_approx(pair, 1, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("vd_knn_approx error is second order in the distance offset") {
    // Away from the kernel's inflection point, where the quadratic term vanishes.
    const double v = 0.5;
    const double gamma = 1.0;
    double previous = 0.0;
    for (double eps : {0.1, 0.05, 0.025, 0.0125}) {
        const Dataset pair = testing::points_on_line({0.0, v + eps});
        const double err = std::abs(vd_knn_approx(pair, 1, gamma, v)(0) - vd_knn_exact(pair, 1, gamma)(0));
        if (previous > 0.0) {
            const double ratio = previous / err;
            CHECK(ratio > 3.5);
            CHECK(ratio < 4.5);
        }
        previous = err;
    }
}

TEST_CASE("median knn distance") {
    const Dataset line = testing::points_on_line({0.0, 1.0, 3.0, 7.0});
    // Nearest-neighbour distances 1, 1, 2, 4.
    CHECK(median_knn_distance(line, 1) == doctest::Approx(1.5));
}
