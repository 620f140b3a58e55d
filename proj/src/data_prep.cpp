#include "relanom/data_prep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace relanom {

namespace {

constexpr double kLambdaMin = -2.0;
constexpr double kLambdaMax = 2.0;
constexpr int kLambdaSteps = 40;  // grid step 0.05 on each side of zero
constexpr double kShiftFloor = 1e-6;

std::string column_label(const std::vector<std::string>& names, Eigen::Index j) {
    if (static_cast<std::size_t>(j) < names.size()) {
        return "'" + names[static_cast<std::size_t>(j)] + "'";
    }
    return std::to_string(j);
}

double golden_section_max(double lo, double hi, auto&& f) {
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 80 && (b - a) > 1e-10; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    return fc >= fd ? c : d;
}

}  // namespace

void RawDataset::validate() const {
    if (values.rows() < 2) {
        throw std::invalid_argument("dataset needs at least 2 observations");
    }
    if (values.cols() < 1) {
        throw std::invalid_argument("dataset needs at least 1 feature");
    }
    if (column_names.size() != static_cast<std::size_t>(values.cols())) {
        throw std::invalid_argument("column name count does not match feature count");
    }
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            if (!std::isfinite(values(i, j))) {
                std::ostringstream msg;
                msg << "non-finite value at row " << i << ", column " << column_label(column_names, j);
                throw std::invalid_argument(msg.str());
            }
        }
    }
}

Dataset Dataset::from_rows(const std::vector<std::vector<double>>& rows) {
    Dataset out;
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto d = n == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.front().size());
    out.values.resize(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != d) {
            throw std::invalid_argument("ragged rows");
        }
        for (Eigen::Index j = 0; j < d; ++j) {
            out.values(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    }
    for (Eigen::Index j = 0; j < d; ++j) {
        out.column_names.push_back("x" + std::to_string(j + 1));
    }
    return out;
}

double apply_box_cox(double x, double delta, double lambda) {
    const double shifted = x + delta;
    if (!(shifted > 0.0)) {
        std::ostringstream msg;
        msg << "Box-Cox argument x + delta = " << shifted << " is not positive";
        throw DomainError(msg.str());
    }
    const double log_value = std::log(shifted);
    if (lambda == 0.0) {
        return log_value;
    }
    return std::expm1(lambda * log_value) / lambda;
}

double box_cox_log_likelihood(std::span<const double> column, double delta, double lambda) {
    const auto n = static_cast<double>(column.size());
    double log_sum = 0.0;
    double mean = 0.0;
    std::vector<double> transformed(column.size());
    for (std::size_t i = 0; i < column.size(); ++i) {
        log_sum += std::log(column[i] + delta);
        transformed[i] = apply_box_cox(column[i], delta, lambda);
        mean += transformed[i];
    }
    mean /= n;
    double ss = 0.0;
    for (double y : transformed) {
        ss += (y - mean) * (y - mean);
    }
    const double variance = ss / n;
    if (!(variance > 0.0) || !std::isfinite(variance)) {
        return -std::numeric_limits<double>::infinity();
    }
    return -0.5 * n * std::log(variance) + (lambda - 1.0) * log_sum;
}

BoxCoxFit fit_box_cox(std::span<const double> column) {
    std::vector<double> sorted(column.begin(), column.end());
    std::sort(sorted.begin(), sorted.end());
    for (double v : sorted) {
        if (!std::isfinite(v)) {
            throw FitError("column contains non-finite values");
        }
    }
    std::size_t distinct = 1;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        distinct += sorted[i] != sorted[i - 1] ? 1 : 0;
    }
    if (distinct == 1) {
        throw FitError("constant column cannot be transformed");
    }
    if (distinct < 3) {
        throw FitError("Box-Cox fit needs at least 3 distinct values");
    }

    const double min_value = sorted.front();
    const double range = sorted.back() - min_value;
    const double floor_gap = kShiftFloor * range;
    const double lower_delta = -min_value + floor_gap;

    // Candidate shifts place the column minimum at a data-scaled distance
    // above zero; delta = 0 is included when the raw data is positive.
    std::vector<double> shifts{lower_delta};
    if (min_value > 0.0) {
        shifts.push_back(0.0);
    }
    for (double p : {0.01, 0.05, 0.10, 0.25, 0.50}) {
        const auto idx = static_cast<std::size_t>(p * static_cast<double>(sorted.size() - 1));
        const double gap = sorted[idx] - min_value;
        if (gap > floor_gap) {
            shifts.push_back(-min_value + gap);
        }
    }
    std::sort(shifts.begin(), shifts.end());
    shifts.erase(std::unique(shifts.begin(), shifts.end()), shifts.end());

    BoxCoxFit best;
    best.log_likelihood = -std::numeric_limits<double>::infinity();
    bool found = false;
    for (double delta : shifts) {
        for (int step = -kLambdaSteps; step <= kLambdaSteps; ++step) {
            const double lambda = static_cast<double>(step) / 20.0;
            const double ll = box_cox_log_likelihood(column, delta, lambda);
            if (ll > best.log_likelihood) {
                best = {delta, lambda, ll, false};
                found = true;
            }
        }
    }
    if (!found) {
        throw FitError("Box-Cox likelihood is degenerate over the whole search space");
    }

    const double lo = std::max(kLambdaMin, best.lambda - 0.05);
    const double hi = std::min(kLambdaMax, best.lambda + 0.05);
    const double delta = best.delta;
    const double refined = golden_section_max(
        lo, hi, [&](double lambda) { return box_cox_log_likelihood(column, delta, lambda); });
    const double refined_ll = box_cox_log_likelihood(column, delta, refined);
    if (refined_ll > best.log_likelihood) {
        best.lambda = refined;
        best.log_likelihood = refined_ll;
    }
    best.at_boundary = best.delta == lower_delta ||
                       best.lambda <= kLambdaMin + 1e-9 || best.lambda >= kLambdaMax - 1e-9;
    return best;
}

FeatureTransform fit_preprocessor(const RawDataset& data, const PreprocessOptions& options) {
    data.validate();
    FeatureTransform transform;
    transform.column_names = data.column_names;
    const auto n = data.rows();
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
        const Eigen::VectorXd column = data.values.col(j);
        const std::span<const double> view(column.data(), static_cast<std::size_t>(n));
        ColumnTransform ct;
        try {
            BoxCoxFit fit;
            if (options.fixed_box_cox) {
                fit = *options.fixed_box_cox;
            } else if (options.box_cox) {
                fit = fit_box_cox(view);
            } else {
                const double lo = column.minCoeff();
                const double range = column.maxCoeff() - lo;
                fit.lambda = 1.0;
                fit.delta = lo > 0.0 ? 0.0 : -lo + std::max(range, 1.0);
            }
            ct.delta = fit.delta;
            ct.lambda = fit.lambda;
            ct.boundary_warning = fit.at_boundary;

            Eigen::VectorXd y(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                y(i) = apply_box_cox(column(i), ct.delta, ct.lambda);
            }
            ct.mean = y.mean();
            ct.sd = std::sqrt((y.array() - ct.mean).square().sum() / static_cast<double>(n - 1));
            if (!(ct.sd > 0.0)) {
                throw FitError("constant column cannot be standardized");
            }
        } catch (const std::exception& e) {
            throw FitError("column " + column_label(data.column_names, j) + ": " + e.what());
        }
        transform.columns.push_back(ct);
    }
    return transform;
}

Dataset apply_preprocessor(const RawDataset& data, const FeatureTransform& transform) {
    if (static_cast<std::size_t>(data.cols()) != transform.columns.size()) {
        throw std::invalid_argument("column count does not match the fitted transform");
    }
    Dataset out;
    out.column_names = transform.column_names;
    out.values.resize(data.rows(), data.cols());
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
        const auto& ct = transform.columns[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < data.rows(); ++i) {
            try {
                out.values(i, j) = (apply_box_cox(data.values(i, j), ct.delta, ct.lambda) - ct.mean) / ct.sd;
            } catch (const DomainError& e) {
                std::ostringstream msg;
                msg << "row " << i << ", column " << column_label(transform.column_names, j) << ": "
                    << e.what();
                throw DomainError(msg.str());
            }
        }
    }
    return out;
}

Eigen::VectorXd apply_preprocessor(std::span<const double> row, const FeatureTransform& transform) {
    if (row.size() != transform.columns.size()) {
        throw std::invalid_argument("observation length does not match the fitted transform");
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(row.size()));
    for (std::size_t j = 0; j < row.size(); ++j) {
        const auto& ct = transform.columns[j];
        try {
            out(static_cast<Eigen::Index>(j)) = (apply_box_cox(row[j], ct.delta, ct.lambda) - ct.mean) / ct.sd;
        } catch (const DomainError& e) {
            throw DomainError("column " + column_label(transform.column_names, static_cast<Eigen::Index>(j)) +
                              ": " + e.what());
        }
    }
    return out;
}

}  // namespace relanom
