#include "ctqw/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "ctqw/errors.hpp"

namespace ctqw {

SpectralForm::SpectralForm(std::vector<double> energies, std::vector<double> weights)
    : energies_(std::move(energies))
    , weights_(std::move(weights))
{
    if (energies_.empty() || energies_.size() != weights_.size()) {
        throw ValidationError("spectral form needs equally many energies and weights");
    }
    if (!std::is_sorted(energies_.begin(), energies_.end())) throw ValidationError("energies must be ascending");
    double total = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0)) throw ValidationError("spectral weights must be non-negative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-10) throw ValidationError(fmt::format("spectral weights sum to {}, not 1", total));
}

double SpectralForm::return_probability(double t) const
{
    double re = 0.0;
    double im = 0.0;
    for (std::size_t n = 0; n < energies_.size(); ++n) {
        const double phase = energies_[n] * t;
        re += weights_[n] * std::cos(phase);
        im += weights_[n] * std::sin(phase);
    }
    // Phases carry round-off of order eps * E_max * t, so an amplitude below that is an exact zero.
    const double noise = 8.0 * std::numeric_limits<double>::epsilon() *
                         (static_cast<double>(energies_.size()) +
                          std::max(std::abs(energies_.front()), std::abs(energies_.back())) * t);
    const double p = re * re + im * im;
    if (p <= noise * noise) return 0.0;
    return std::min(p, 1.0);
}

double SpectralForm::inverse_participation() const
{
    return std::inner_product(weights_.begin(), weights_.end(), weights_.begin(), 0.0);
}

void tridiagonal_ql(std::vector<double>& d, std::vector<double> off, std::vector<double>& z, int max_iterations)
{
    const std::size_t n = d.size();
    if (z.size() != n || (n > 0 && off.size() + 1 != n)) throw ValidationError("tridiagonal_ql: size mismatch");
    if (n <= 1) return;

    // e[i] couples i and i+1; e[n-1] is scratch.
    std::vector<double> e(n, 0.0);
    std::copy(off.begin(), off.end(), e.begin());
    constexpr double eps = std::numeric_limits<double>::epsilon();

    for (std::size_t l = 0; l < n; ++l) {
        int iterations = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m == l) break;
            if (iterations++ == max_iterations) {
                throw NumericalError(fmt::format(
                    "implicit QL did not converge for eigenvalue {} of {} after {} iterations (|e| = {:.3e}, d = {:.6g})",
                    l, n, max_iterations, std::abs(e[l]), d[l]));
            }
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0;
            double c = 1.0;
            double p = 0.0;
            bool deflated = false;
            for (std::size_t ii = m; ii-- > l;) {
                const double f = s * e[ii];
                const double b = c * e[ii];
                r = std::hypot(f, g);
                e[ii + 1] = r;
                if (r == 0.0) {
                    d[ii + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[ii + 1] - p;
                r = (d[ii] - g) * s + 2.0 * c * b;
                p = s * r;
                d[ii + 1] = g + p;
                g = c * r - b;
                const double zf = z[ii + 1];
                z[ii + 1] = s * z[ii] + c * zf;
                z[ii] = c * z[ii] - s * zf;
            }
            if (deflated) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        } while (m != l);
    }
}

SpectralForm spectral_decompose(const Hamiltonian& h, const EigenOptions& options)
{
    const std::size_t n = h.dimension();
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Eigen::MatrixXd matrix = Eigen::Map<const RowMajor>(h.entries().data(), static_cast<Eigen::Index>(n),
                                                              static_cast<Eigen::Index>(n));

    std::vector<double> diagonal(n);
    std::vector<double> off(n > 0 ? n - 1 : 0);
    if (n == 1) {
        diagonal[0] = matrix(0, 0);
    } else {
        // Householder reflections act on rows/columns >= 1, so Q e_0 = e_0 and
        // the origin overlap of an eigenvector of H is that of T.
        Eigen::Tridiagonalization<Eigen::MatrixXd> tri(matrix);
        const Eigen::VectorXd dg = tri.diagonal();
        const Eigen::VectorXd sub = tri.subDiagonal();
        for (std::size_t i = 0; i < n; ++i) diagonal[i] = dg(static_cast<Eigen::Index>(i));
        for (std::size_t i = 0; i + 1 < n; ++i) off[i] = sub(static_cast<Eigen::Index>(i));
    }

    std::vector<double> first_row(n, 0.0);
    first_row[0] = 1.0;
    tridiagonal_ql(diagonal, std::move(off), first_row, options.max_iterations_per_eigenvalue);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return diagonal[a] < diagonal[b]; });

    std::vector<double> energies(n);
    std::vector<double> weights(n);
    for (std::size_t i = 0; i < n; ++i) {
        energies[i] = diagonal[order[i]];
        weights[i] = first_row[order[i]] * first_row[order[i]];
    }

    const double tolerance = options.degeneracy_tolerance * std::max(1.0, h.norm_inf());
    for (std::size_t begin = 0; begin < n;) {
        std::size_t end = begin + 1;
        while (end < n && energies[end] - energies[begin] <= tolerance) ++end;
        if (end - begin > 1) {
            const auto count = static_cast<double>(end - begin);
            const double mean = std::accumulate(energies.begin() + begin, energies.begin() + end, 0.0) / count;
            const double share = std::accumulate(weights.begin() + begin, weights.begin() + end, 0.0) / count;
            std::fill(energies.begin() + begin, energies.begin() + end, mean);
            std::fill(weights.begin() + begin, weights.begin() + end, share);
        }
        begin = end;
    }
    return SpectralForm(std::move(energies), std::move(weights));
}

} // namespace ctqw
