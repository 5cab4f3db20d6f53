#pragma once

#include <cstddef>
#include <span>

namespace ctqw {

/// Neumaier compensated summation.
class CompensatedSum {
public:
    void add(double x) noexcept;
    double value() const noexcept { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rss = 0.0;
    double r_squared = 0.0;
    std::size_t count = 0;
};

/// Ordinary least squares y = slope * x + intercept, two-pass (centered).
LineFit fit_line(std::span<const double> x, std::span<const double> y);

} // namespace ctqw
