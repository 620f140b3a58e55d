#include "relanom/data_prep.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

using namespace relanom;

namespace {

// Independent profile likelihood: written from the definition, no shared code.
double reference_log_likelihood(const std::vector<double>& x, double delta, double lambda) {
    const double n = static_cast<double>(x.size());
    std::vector<double> y;
    double jac = 0.0;
    for (double v : x) {
        const double s = v + delta;
        jac += std::log(s);
        y.push_back(lambda == 0.0 ? std::log(s) : (std::pow(s, lambda) - 1.0) / lambda);
    }
    double mean = 0.0;
    for (double v : y) {
        mean += v;
    }
    mean /= n;
    double var = 0.0;
    for (double v : y) {
        var += (v - mean) * (v - mean);
    }
    var /= n;
    return -0.5 * n * std::log(var) + (lambda - 1.0) * jac;
}

// Brute-force maximiser over a fine lambda grid and a small delta grid.
struct GridBest {
    double delta;
    double lambda;
    double ll;
};

GridBest grid_oracle(const std::vector<double>& x, const std::vector<double>& deltas) {
    GridBest best{0.0, 0.0, -std::numeric_limits<double>::infinity()};
    for (double delta : deltas) {
        for (int i = -400; i <= 400; ++i) {
            const double lambda = i / 200.0;
            const double ll = reference_log_likelihood(x, delta, lambda);
            if (ll > best.ll) {
                best = {delta, lambda, ll};
            }
        }
    }
    return best;
}

std::vector<double> lognormal(std::uint64_t seed, int n) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> x;
    for (int i = 0; i < n; ++i) {
        x.push_back(std::exp(z(rng)));
    }
    return x;
}

RawDataset raw_from(const std::vector<std::vector<double>>& cols) {
    RawDataset raw;
    raw.values.resize(static_cast<Eigen::Index>(cols.front().size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        for (std::size_t i = 0; i < cols[j].size(); ++i) {
            raw.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cols[j][i];
        }
        raw.column_names.push_back("c" + std::to_string(j));
    }
    return raw;
}

}  // namespace

TEST_CASE("apply_box_cox closed forms") {
    CHECK(apply_box_cox(3.0, 0.0, 1.0) == doctest::Approx(2.0));
    CHECK(apply_box_cox(std::numbers::e, 0.0, 0.0) == doctest::Approx(1.0));
    CHECK(apply_box_cox(4.0, 0.0, 0.5) == doctest::Approx(2.0));
    CHECK_THROWS_AS(apply_box_cox(-1.0, 0.5, 1.0), DomainError);
    CHECK_THROWS_AS(apply_box_cox(-1.0, 1.0, 1.0), DomainError);
}

TEST_CASE("apply_box_cox is strictly increasing") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    std::uniform_real_distribution<double> lam(-2.0, 2.0);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> x(20);
        for (double& v : x) {
            v = u(rng);
        }
        std::sort(x.begin(), x.end());
        x.erase(std::unique(x.begin(), x.end()), x.end());
        const double lambda = lam(rng);
        for (std::size_t i = 1; i < x.size(); ++i) {
            CHECK(apply_box_cox(x[i], 0.5, lambda) > apply_box_cox(x[i - 1], 0.5, lambda));
        }
    }
}

TEST_CASE("apply_box_cox is continuous at lambda = 0") {
    for (double x : {0.01, 0.5, 1.0, 7.0, 300.0}) {
        CHECK(std::abs(apply_box_cox(x, 0.0, 1e-6) - std::log(x)) < 1e-4);
        CHECK(std::abs(apply_box_cox(x, 0.0, -1e-6) - std::log(x)) < 1e-4);
    }
}

TEST_CASE("box_cox_log_likelihood matches the definition") {
    const auto x = lognormal(3, 200);
    for (double delta : {0.0, 0.3, 2.0}) {
        for (double lambda : {-1.5, -0.2, 0.0, 0.4, 1.0, 1.9}) {
            CHECK(box_cox_log_likelihood(x, delta, lambda) ==
                  doctest::Approx(reference_log_likelihood(x, delta, lambda)).epsilon(1e-10));
        }
    }
    const std::vector<double> constant{2.0, 2.0, 2.0};
    CHECK(box_cox_log_likelihood(constant, 0.0, 1.0) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("fit_box_cox recovers the log transform on lognormal data") {
    const auto x = lognormal(2024, 2000);
    const BoxCoxFit fit = fit_box_cox(x);
    CHECK(fit.lambda >= -0.2);
    CHECK(fit.lambda <= 0.2);
    const GridBest oracle = grid_oracle(x, {0.0});
    CHECK(std::abs(oracle.lambda) <= 0.2);
    // The joint search can only do at least as well as the delta = 0 slice.
    CHECK(fit.log_likelihood >= oracle.ll - 1e-6 * std::abs(oracle.ll));
}

TEST_CASE("fit_box_cox keeps shifted Gaussian data nearly linear") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z(10.0, 1.0);
    std::vector<double> x;
    for (int i = 0; i < 2000; ++i) {
        x.push_back(z(rng));
    }
    const BoxCoxFit fit = fit_box_cox(x);
    CHECK(fit.lambda >= 0.8);
    CHECK(fit.lambda <= 1.2);
}

TEST_CASE("fit_box_cox agrees with a grid-search oracle over its own shift set") {
    std::mt19937_64 rng(8);
    std::gamma_distribution<double> g(2.0, 1.5);
    for (int t = 0; t < 5; ++t) {
        std::vector<double> x;
        for (int i = 0; i < 300; ++i) {
            x.push_back(g(rng) + 0.1);
        }
        const BoxCoxFit fit = fit_box_cox(x);
        const GridBest oracle = grid_oracle(x, {fit.delta});
        CHECK(fit.log_likelihood >= oracle.ll - 1e-6 * std::abs(oracle.ll));
        CHECK(std::abs(fit.lambda - oracle.lambda) <= 0.01);
        CHECK(fit.log_likelihood == doctest::Approx(reference_log_likelihood(x, fit.delta, fit.lambda)));
    }
}

TEST_CASE("fit_box_cox beats the identity transform") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> x;
        for (int i = 0; i < 40; ++i) {
            x.push_back(u(rng) * (t % 3 == 0 ? std::exp(u(rng)) : 1.0));
        }
        const BoxCoxFit fit = fit_box_cox(x);
        const double min = *std::min_element(x.begin(), x.end());
        const double delta = min > 0.0 ? 0.0 : -min + 1.0;
        CHECK(fit.log_likelihood >= box_cox_log_likelihood(x, delta, 1.0) - 1e-9);
    }
}

TEST_CASE("fit_box_cox rejects degenerate columns") {
    const std::vector<double> constant{4.0, 4.0, 4.0};
    CHECK_THROWS_AS(fit_box_cox(constant), FitError);
    const std::vector<double> two_values{1.0, 2.0, 1.0, 2.0};
    CHECK_THROWS_AS(fit_box_cox(two_values), FitError);
}

TEST_CASE("fit_preprocessor with fixed parameters") {
    const RawDataset raw = raw_from({{1.0, 2.0, 3.0}});
    PreprocessOptions opts;
    opts.fixed_box_cox = BoxCoxFit{0.0, 1.0, 0.0, false};
    const FeatureTransform t = fit_preprocessor(raw, opts);
    REQUIRE(t.columns.size() == 1);
    CHECK(t.columns[0].mean == doctest::Approx(1.0));
    CHECK(t.columns[0].sd == doctest::Approx(1.0));
}

TEST_CASE("fit_preprocessor standardizes the training data") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 100; ++t) {
        const Dataset base = testing::random_dataset(rng, 30, 3, 2.0);
        RawDataset raw{base.values, base.column_names};
        raw.values.col(1) = raw.values.col(1).array().exp().matrix();
        PreprocessOptions opts;
        opts.box_cox = t % 2 == 0;
        const FeatureTransform tf = fit_preprocessor(raw, opts);
        const Dataset ds = apply_preprocessor(raw, tf);
        for (Eigen::Index j = 0; j < ds.cols(); ++j) {
            const Eigen::VectorXd c = ds.values.col(j);
            const double mean = c.mean();
            const double sd = std::sqrt((c.array() - mean).square().sum() / static_cast<double>(c.size() - 1));
            CHECK(std::abs(mean) < 1e-10);
            CHECK(std::abs(sd - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("fit_preprocessor fits a lognormal column near lambda = 0") {
    std::mt19937_64 rng(44);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> a;
    std::vector<double> b;
    for (int i = 0; i < 1000; ++i) {
        a.push_back(std::exp(z(rng)));
        b.push_back(z(rng));
    }
    const FeatureTransform t = fit_preprocessor(raw_from({a, b}));
    CHECK(t.columns[0].lambda >= -0.2);
    CHECK(t.columns[0].lambda <= 0.2);
}

TEST_CASE("fit_preprocessor names the failing column") {
    const RawDataset raw = raw_from({{1.0, 2.0, 3.0, 4.0}, {5.0, 5.0, 5.0, 5.0}});
    try {
        (void)fit_preprocessor(raw);
        FAIL("expected FitError");
    } catch (const FitError& e) {
        CHECK(std::string(e.what()).find("c1") != std::string::npos);
    }
}

TEST_CASE("apply_preprocessor identity parameters and domain errors") {
    FeatureTransform t;
    t.column_names = {"a"};
    t.columns = {ColumnTransform{0.0, 1.0, 0.0, 1.0, false}};
    const RawDataset raw = raw_from({{2.0, 5.5, 10.0}});
    const Dataset ds = apply_preprocessor(raw, t);
    CHECK(ds.values(0, 0) == doctest::Approx(1.0));
    CHECK(ds.values(1, 0) == doctest::Approx(4.5));
    CHECK(ds.values(2, 0) == doctest::Approx(9.0));

    t.columns[0].delta = 1.0;
    const RawDataset bad = raw_from({{2.0, -3.0}});
    try {
        (void)apply_preprocessor(bad, t);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 1") != std::string::npos);
        CHECK(msg.find("a") != std::string::npos);
    }
    const std::vector<double> row{-5.0};
    CHECK_THROWS_AS(apply_preprocessor(std::span<const double>(row), t), DomainError);
}

TEST_CASE("apply_preprocessor round trip on training data") {
    std::mt19937_64 rng(2);
    const Dataset base = testing::random_dataset(rng, 50, 2);
    RawDataset raw{base.values.array().exp().matrix(), base.column_names};
    const FeatureTransform t = fit_preprocessor(raw);
    const Dataset ds = apply_preprocessor(raw, t);
    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
        const Eigen::VectorXd row = raw.values.row(i).transpose();
        const Eigen::VectorXd single = apply_preprocessor(std::span<const double>(row.data(), 2), t);
        CHECK(single(0) == ds.values(i, 0));
        CHECK(single(1) == ds.values(i, 1));
    }
}

TEST_CASE("RawDataset validation") {
    RawDataset raw = raw_from({{1.0, 2.0}});
    CHECK_NOTHROW(raw.validate());
    raw.values(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(raw.validate(), std::invalid_argument);
    RawDataset one = raw_from({{1.0}});
    CHECK_THROWS_AS(one.validate(), std::invalid_argument);
}
