#include "relanom/popularity.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace relanom {

namespace {

template <class MatVec>
PowerIterationResult iterate(MatVec&& multiply, Eigen::Index n, const std::optional<Eigen::VectorXd>& start,
                             double tol, int max_iter) {
    Eigen::VectorXd s;
    if (start) {
        if (start->size() != n) {
            throw std::invalid_argument("start vector length does not match the matrix");
        }
        s = start->cwiseAbs();
    } else {
        s = Eigen::VectorXd::Ones(n);
    }
    const double start_norm = s.norm();
    if (!(start_norm > 0.0) || !std::isfinite(start_norm)) {
        throw std::invalid_argument("start vector must be nonzero and finite");
    }
    s /= start_norm;

    double residual = std::numeric_limits<double>::infinity();
    for (int it = 0; it <= max_iter; ++it) {
        const Eigen::VectorXd y = multiply(s);
        const double lambda = s.dot(y);
        residual = (y - lambda * s).norm();
        if (!std::isfinite(residual) || !std::isfinite(lambda)) {
            throw ConvergenceError("non-finite value in power iteration", residual, it);
        }
        if (residual <= tol) {
            if (s.sum() < 0.0) {
                s = -s;
            }
            return {s, lambda, it, residual};
        }
        if (it == max_iter) {
            break;
        }
        const double norm = y.norm();
        if (!(norm > 0.0)) {
            throw ConvergenceError("power iteration collapsed to the zero vector", residual, it);
        }
        s = y / norm;
    }
    throw ConvergenceError("power iteration did not converge, last residual " + std::to_string(residual), residual,
                           max_iter);
}

}  // namespace

PowerIterationResult power_iteration(const SimilarityGraph& S, const std::optional<Eigen::VectorXd>& start,
                                     double tol, int max_iter) {
    if (!S.is_symmetric()) {
        throw std::invalid_argument("power iteration needs a symmetric similarity matrix");
    }
    for (Eigen::Index i = 0; i < S.size(); ++i) {
        if (!(S.coeff(i, i) > 0.0)) {
            throw std::invalid_argument("power iteration needs a positive diagonal");
        }
    }
    return iterate([&](const Eigen::VectorXd& v) { return S.multiply(v); }, S.size(), start, tol, max_iter);
}

PowerIterationResult power_iteration(const Eigen::MatrixXd& S, const std::optional<Eigen::VectorXd>& start,
                                     double tol, int max_iter) {
    if (S.rows() != S.cols() || S.rows() == 0) {
        throw std::invalid_argument("power iteration needs a nonempty square matrix");
    }
    if (!(S.diagonal().array() > 0.0).all()) {
        throw std::invalid_argument("power iteration needs a positive diagonal");
    }
    if (S != S.transpose()) {
        throw std::invalid_argument("power iteration needs a symmetric matrix");
    }
    return iterate([&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return S * v; }, S.rows(), start, tol,
                   max_iter);
}

PopularityModel fit_popularity(const Dataset& data, double gamma, const PopularityOptions& options) {
    auto graph = std::make_shared<SimilarityGraph>(rbf_similarity_matrix(data, gamma, options.metric));
    if (options.sparsify > 0.0) {
        graph = std::make_shared<SimilarityGraph>(threshold_sparsify(*graph, options.sparsify));
    }

    std::optional<Eigen::VectorXd> start;
    switch (options.start) {
        case StartVector::uniform:
            break;
        case StartVector::random:
            start = random_positive_start(data.rows(), options.seed);
            break;
        case StartVector::rff:
            start = rff_warm_start(data, options.rff_dim, gamma, options.seed);
            break;
    }

    const PowerIterationResult eig = power_iteration(*graph, start, options.tol, options.max_iter);

    PopularityModel model;
    model.training = data;
    model.gamma = gamma;
    model.metric = options.metric;
    model.sparsify = options.sparsify;
    model.drop_threshold = graph->drop_threshold();
    model.s_vec = eig.vector;
    model.lambda1 = eig.eigenvalue;
    model.denom = eig.vector.dot(graph->multiply(eig.vector));
    model.iterations_used = eig.iterations;
    model.residual = eig.residual;
    model.graph = std::move(graph);
    return model;
}

Eigen::VectorXd relative_anomaly(const PopularityModel& model) { return -model.s_vec; }

Eigen::MatrixXd random_fourier_features(const Dataset& data, int D, double gamma, std::uint64_t seed) {
    if (D < 1) {
        throw std::invalid_argument("number of Fourier features must be positive");
    }
    if (!(gamma > 0.0)) {
        throw std::invalid_argument("gamma must be positive");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> frequency(0.0, std::sqrt(2.0 / gamma));
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

    Eigen::MatrixXd W(D, data.cols());
    for (Eigen::Index r = 0; r < W.rows(); ++r) {
        for (Eigen::Index c = 0; c < W.cols(); ++c) {
            W(r, c) = frequency(rng);
        }
    }
    Eigen::VectorXd b(D);
    for (Eigen::Index r = 0; r < D; ++r) {
        b(r) = phase(rng);
    }
    Eigen::MatrixXd projection = W * data.values.transpose();
    projection.colwise() += b;
    return std::sqrt(2.0 / static_cast<double>(D)) * projection.array().cos().matrix();
}

Eigen::VectorXd rff_warm_start(const Dataset& data, int D, double gamma, std::uint64_t seed) {
    const Eigen::MatrixXd phi = random_fourier_features(data, D, gamma, seed);
    const Eigen::MatrixXd small = phi * phi.transpose();

    // Leading eigenvector of the D x D system, seeded with the projection of
    // the uniform vector. The result is only a starting point, so a loose
    // relative tolerance and an unconverged final iterate are acceptable.
    Eigen::VectorXd v = phi.rowwise().sum();
    if (!(v.norm() > 0.0)) {
        v = Eigen::VectorXd::Ones(D);
    }
    v.normalize();
    for (int it = 0; it < 1000; ++it) {
        const Eigen::VectorXd y = small * v;
        const double lambda = v.dot(y);
        const double norm = y.norm();
        if (!(norm > 0.0)) {
            break;
        }
        const bool done = (y - lambda * v).norm() <= 1e-8 * std::abs(lambda);
        v = y / norm;
        if (done) {
            break;
        }
    }
    Eigen::VectorXd s0 = (phi.transpose() * v).cwiseAbs();
    const double norm = s0.norm();
    if (!(norm > 0.0)) {
        return Eigen::VectorXd::Constant(data.rows(), 1.0 / std::sqrt(static_cast<double>(data.rows())));
    }
    return s0 / norm;
}

Eigen::VectorXd random_positive_start(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        s(i) = 1.0 - unit(rng);  // (0, 1]
    }
    return s / s.norm();
}

double score_new(const PopularityModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
    const bool thresholded = !std::isnan(model.drop_threshold);
    double total = 0.0;
    for (Eigen::Index j = 0; j < model.training.rows(); ++j) {
        const double s =
            rbf_kernel(distance(model.training.values.row(j).transpose(), x, model.metric), model.gamma);
        if (thresholded && !(s > model.drop_threshold)) {
            continue;
        }
        total += s * model.s_vec(j);
    }
    return -total / model.denom;
}

}  // namespace relanom
