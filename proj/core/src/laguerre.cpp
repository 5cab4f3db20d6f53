#include "ctqw/laguerre.hpp"

#include <cmath>

#include <fmt/format.h>

#include "ctqw/errors.hpp"

namespace ctqw {

GaussLaguerreRule gauss_laguerre(int n)
{
    if (n < 1) throw ValidationError("Gauss-Laguerre rule needs n >= 1");
    constexpr int kMaxNewton = 100;
    // The recurrence carries ~1e-13 relative noise near large-n roots, so Newton
    // stops once the step is below 1e-12 and takes one polishing step.
    constexpr double kRelTol = 1e-12;

    GaussLaguerreRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));

    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        // Starting guesses of Stroud and Secrest.
        if (i == 0) {
            z = 3.0 / (1.0 + 2.4 * n);
        } else if (i == 1) {
            z += 15.0 / (1.0 + 2.5 * n);
        } else {
            const double ai = i - 1;
            z += (1.0 + 2.55 * ai) / (1.9 * ai) * (z - rule.nodes[static_cast<std::size_t>(i - 2)]);
        }

        double derivative = 0.0;
        double previous = 0.0;
        int iteration = 0;
        bool polishing = false;
        for (; iteration < kMaxNewton; ++iteration) {
            double p1 = 1.0;
            double p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0 - z) * p2 - (j - 1.0) * p3) / j;
            }
            // p1 = L_n(z), p2 = L_{n-1}(z)
            derivative = (n * p1 - n * p2) / z;
            previous = p2;
            const double z_old = z;
            z = z_old - p1 / derivative;
            if (polishing) break;
            polishing = std::abs(z - z_old) <= kRelTol * std::abs(z);
        }
        if (iteration == kMaxNewton || !std::isfinite(z)) {
            throw NumericalError(fmt::format("Gauss-Laguerre root {} of {} did not converge", i, n));
        }
        if (i > 0 && !(z > rule.nodes[static_cast<std::size_t>(i - 1)])) {
            throw NumericalError(fmt::format("Gauss-Laguerre root {} of {} collapsed onto its predecessor", i, n));
        }
        rule.nodes[static_cast<std::size_t>(i)] = z;
        rule.weights[static_cast<std::size_t>(i)] = -1.0 / (derivative * n * previous);
    }
    return rule;
}

} // namespace ctqw
