#pragma once

// Reference implementations kept deliberately independent of the library code paths.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

/// Direct power series for J_m(x) in long double; reliable for x below ~25.
inline double bessel_series(int m, double x)
{
    const long double h = static_cast<long double>(x) / 2.0L;
    long double term = 1.0L;
    for (int i = 1; i <= m; ++i) term *= h / i;
    long double sum = term;
    for (int k = 1; k < 400; ++k) {
        term *= -h * h / (static_cast<long double>(k) * (k + m));
        sum += term;
        if (std::fabs(term) < 1e-30L) break;
    }
    return static_cast<double>(sum);
}

/// Bisection on the series oracle.
template <class F>
double bisect(F f, double lo, double hi)
{
    double flo = f(lo);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Return probability on a ring of n sites from its Fourier modes; energies 2 - 2 cos(2 pi k / n).
inline double ring_p0(int n, double t, double gamma = 1.0)
{
    std::complex<long double> amp = 0.0L;
    for (int k = 0; k < n; ++k) {
        const long double e = gamma * (2.0L - 2.0L * std::cos(2.0L * std::numbers::pi_v<long double> * k / n));
        amp += std::polar(1.0L, -e * t);
    }
    amp /= static_cast<long double>(n);
    return static_cast<double>(std::norm(amp));
}

/// Double cosine sum over a spectrum.
inline double double_cosine_sum(const std::vector<double>& e, const std::vector<double>& q, double t)
{
    long double s = 0.0L;
    for (std::size_t m = 0; m < e.size(); ++m)
        for (std::size_t n = 0; n < e.size(); ++n) s += static_cast<long double>(q[m]) * q[n] * std::cos((e[m] - e[n]) * t);
    return static_cast<double>(s);
}

} // namespace oracle
