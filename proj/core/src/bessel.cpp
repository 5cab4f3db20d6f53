#include "ctqw/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "ctqw/errors.hpp"

namespace ctqw {

namespace {

void check_argument(int order, double x)
{
    if (std::isnan(x)) throw DomainError("bessel_j: NaN argument");
    if (x < 0.0) throw DomainError(fmt::format("bessel_j: negative argument {}", x));
    if (!std::isfinite(x)) throw DomainError("bessel_j: infinite argument");
    if (order < 0 || order > kMaxBesselOrder) {
        throw DomainError(fmt::format("bessel_j: order {} outside [0, {}]", order, kMaxBesselOrder));
    }
}

// sum_k (-x^2/4)^k / (k! (k+m)!) * (x/2)^m, in extended precision to absorb
// the cancellation near the upper end of the series range.
double series(int order, double x)
{
    const long double half = 0.5L * static_cast<long double>(x);
    long double term = 1.0L;
    for (int i = 1; i <= order; ++i) term *= half / static_cast<long double>(i);
    const long double step = -half * half;
    long double sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= step / (static_cast<long double>(k) * static_cast<long double>(k + order));
        sum += term;
        if (k > half && std::fabs(term) <= 1e-21L * std::fabs(sum)) break;
    }
    return static_cast<double>(sum);
}

int miller_start(int max_order, double x)
{
    const double base = std::max(static_cast<double>(max_order), x) + 15.0 * (std::cbrt(x) + 1.0) + 16.0;
    int start = static_cast<int>(std::ceil(base));
    return start + (start & 1);
}

// Backward recurrence J_{k-1} = (2k/x) J_k - J_{k+1} from a negligible seed,
// normalized with J_0 + 2 sum_{k>=1} J_{2k} = 1.
std::vector<double> miller(int max_order, double x)
{
    constexpr double kRescaleAbove = 1e250;
    constexpr double kRescaleBy = 1e-250;

    const int start = miller_start(max_order, x);
    std::vector<double> out(static_cast<std::size_t>(max_order) + 1, 0.0);
    double next = 0.0;     // J_{k+1}
    double current = 1e-300; // J_k
    double norm = 0.0;
    for (int k = start; k >= 1; --k) {
        const double previous = (2.0 * k / x) * current - next; // J_{k-1}
        next = current;
        current = previous;
        const int order = k - 1;
        if (order > 0 && order % 2 == 0) norm += 2.0 * current;
        if (order <= max_order) out[static_cast<std::size_t>(order)] = current;
        if (std::fabs(current) > kRescaleAbove) {
            current *= kRescaleBy;
            next *= kRescaleBy;
            norm *= kRescaleBy;
            for (int m = order; m <= max_order; ++m) out[static_cast<std::size_t>(m)] *= kRescaleBy;
        }
    }
    norm += current; // J_0
    for (auto& v : out) v /= norm;
    return out;
}

struct HankelResult {
    double value;
    double error_bound;
};

// J_m(x) = sqrt(2/(pi x)) [P cos chi - Q sin chi], chi = x - (m/2 + 1/4) pi.
HankelResult hankel(int order, double x)
{
    const double mu = 4.0 * order * order;
    double p = 1.0;
    double q = 0.0;
    double term = 1.0;
    double last = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = term * (mu - odd * odd) / (k * 8.0 * x);
        if (std::fabs(next) >= std::fabs(term) && k > 1) break; // series turned divergent
        term = next;
        last = std::fabs(term);
        switch (k % 4) {
        case 1: q += term; break;
        case 2: p -= term; break;
        case 3: q -= term; break;
        case 0: p += term; break;
        }
        if (last < 1e-17) break;
    }
    // phase (2m+1) pi/4 reduced mod 2 pi
    const int octant = (2 * order + 1) % 8;
    const double phase = octant * std::numbers::pi / 4.0;
    const double cx = std::cos(x);
    const double sx = std::sin(x);
    const double cp = std::cos(phase);
    const double sp = std::sin(phase);
    const double cos_chi = cx * cp + sx * sp;
    const double sin_chi = sx * cp - cx * sp;
    const double envelope = std::sqrt(2.0 / (std::numbers::pi * x));
    return {envelope * (p * cos_chi - q * sin_chi), envelope * last};
}

} // namespace

void BesselEvalConfig::validate() const
{
    if (!(series_cutoff > 0.0) || !(asymptotic_cutoff > 0.0)) throw ValidationError("Bessel cutoffs must be positive");
    if (series_cutoff > asymptotic_cutoff) throw ValidationError("series_cutoff must not exceed asymptotic_cutoff");
    if (!(target_abs_error >= 1e-14)) throw ValidationError("target_abs_error must be >= 1e-14");
}

double bessel_j(int order, double x, const BesselEvalConfig& config)
{
    check_argument(order, x);
    if (x == 0.0) return order == 0 ? 1.0 : 0.0;

    double value;
    if (x <= config.series_cutoff) {
        value = series(order, x);
    } else if (x >= config.asymptotic_cutoff) {
        const auto h = hankel(order, x);
        value = h.error_bound <= config.target_abs_error ? h.value : miller(order, x)[static_cast<std::size_t>(order)];
    } else {
        value = miller(order, x)[static_cast<std::size_t>(order)];
    }
    return std::clamp(value, -1.0, 1.0);
}

double bessel_j0_asymptotic(double x, const BesselEvalConfig& config)
{
    if (std::isnan(x)) throw DomainError("bessel_j0_asymptotic: NaN argument");
    if (x < config.asymptotic_cutoff) {
        throw DomainError(fmt::format("bessel_j0_asymptotic: x = {} is below the asymptotic cutoff {}", x,
                                      config.asymptotic_cutoff));
    }
    // cos(x - pi/4) = (cos x + sin x) / sqrt 2
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (std::cos(x) + std::sin(x)) / std::numbers::sqrt2;
}

std::vector<double> bessel_j_sequence(int max_order, double x)
{
    if (std::isnan(x) || x < 0.0 || !std::isfinite(x)) throw DomainError("bessel_j_sequence: invalid argument");
    if (max_order < 0) throw DomainError("bessel_j_sequence: negative order");
    if (x == 0.0) {
        std::vector<double> out(static_cast<std::size_t>(max_order) + 1, 0.0);
        out[0] = 1.0;
        return out;
    }
    return miller(max_order, x);
}

} // namespace ctqw
