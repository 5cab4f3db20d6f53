#pragma once

#include <vector>

namespace ctqw {

/// Highest order accepted by bessel_j.
inline constexpr int kMaxBesselOrder = 64;

struct BesselEvalConfig {
    /// Power series below this argument.
    double series_cutoff = 12.0;
    /// Hankel asymptotic expansion permitted above this argument.
    double asymptotic_cutoff = 50.0;
    double target_abs_error = 1e-14;

    /// Throws ValidationError if the cutoffs are out of order or the target is below 1e-14.
    void validate() const;
};

/**
 * Bessel function of the first kind J_order(x) for 0 <= order <= 64, x >= 0.
 *
 * Dispatches between a long-double power series (x <= series_cutoff), Miller
 * backward recurrence normalized by J0 + 2*sum J_2k = 1, and the Hankel
 * expansion (x >= asymptotic_cutoff, only when its smallest term certifies
 * target_abs_error). Errors are absolute.
 */
double bessel_j(int order, double x, const BesselEvalConfig& config = {});

/// Leading-order form sqrt(2/(pi x)) cos(x - pi/4). Throws DomainError below config.asymptotic_cutoff.
double bessel_j0_asymptotic(double x, const BesselEvalConfig& config = {});

/// J_0(x) ... J_max_order(x) in one Miller sweep. No order cap.
std::vector<double> bessel_j_sequence(int max_order, double x);

} // namespace ctqw
