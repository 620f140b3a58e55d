#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace relanom {

/// Right-continuous empirical CDF: F(t) = #{x_i <= t} / n.
class EmpiricalCdf {
public:
    EmpiricalCdf() = default;
    explicit EmpiricalCdf(std::span<const double> sample) : sorted_(sample.begin(), sample.end()) {
        std::sort(sorted_.begin(), sorted_.end());
    }

    std::size_t size() const { return sorted_.size(); }
    const std::vector<double>& sorted() const { return sorted_; }

    std::size_t count_at_most(double t) const {
        return static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), t) - sorted_.begin());
    }

    double operator()(double t) const {
        return static_cast<double>(count_at_most(t)) / static_cast<double>(sorted_.size());
    }

private:
    std::vector<double> sorted_;
};

}  // namespace relanom
