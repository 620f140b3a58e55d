#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace relanom {

/// Observations as loaded from disk, before any transform. Rows are
/// observations, columns are features.
struct RawDataset {
    Eigen::MatrixXd values;
    std::vector<std::string> column_names;

    /// Throws std::invalid_argument unless n >= 2, d >= 1, the names match
    /// the column count and every entry is finite.
    void validate() const;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

/// Observations in model space (Box-Cox transformed and standardized).
/// Everything downstream of preprocessing consumes this type.
struct Dataset {
    Eigen::MatrixXd values;
    std::vector<std::string> column_names;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }

    /// Convenience constructor with generated names x1..xd.
    static Dataset from_rows(const std::vector<std::vector<double>>& rows);
};

/// Raised when a value falls outside the domain of a fitted transform.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when a transform cannot be fitted (e.g. a constant column).
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BoxCoxFit {
    double delta = 0.0;
    double lambda = 1.0;
    double log_likelihood = 0.0;
    // The optimum sits on the edge of the search box (shift lower bound or
    // |lambda| = 2); the likelihood may be unbounded there.
    bool at_boundary = false;
};

struct ColumnTransform {
    double delta = 0.0;
    double lambda = 1.0;
    double mean = 0.0;
    double sd = 1.0;
    bool boundary_warning = false;
};

struct FeatureTransform {
    std::vector<std::string> column_names;
    std::vector<ColumnTransform> columns;
};

/// ((x + delta)^lambda - 1) / lambda, or ln(x + delta) when lambda == 0.
/// Throws DomainError when x + delta <= 0.
double apply_box_cox(double x, double delta, double lambda);

/// Profile Gaussian log-likelihood of the transformed column, including the
/// Jacobian term (lambda - 1) * sum(ln(x + delta)). Returns -inf when the
/// transformed column has zero variance.
double box_cox_log_likelihood(std::span<const double> column, double delta, double lambda);

/// Joint maximum-likelihood estimate of (delta, lambda). A coarse grid over
/// lambda in [-2, 2] (step 0.05) and a set of quantile-based shifts is
/// followed by golden-section refinement of lambda.
/// Throws FitError for columns with fewer than three distinct values.
BoxCoxFit fit_box_cox(std::span<const double> column);

struct PreprocessOptions {
    // false: lambda = 1 with a positivity-preserving shift, i.e. plain
    // standardization.
    bool box_cox = true;
    // When set, every column uses these Box-Cox parameters instead of the
    // likelihood fit; only mean and sd are estimated.
    std::optional<BoxCoxFit> fixed_box_cox;
};

FeatureTransform fit_preprocessor(const RawDataset& data, const PreprocessOptions& options = {});

Dataset apply_preprocessor(const RawDataset& data, const FeatureTransform& transform);

/// Maps a single raw observation into model space.
Eigen::VectorXd apply_preprocessor(std::span<const double> row, const FeatureTransform& transform);

}  // namespace relanom
