#pragma once

#include <cstddef>
#include <vector>

#include "ctqw/graph.hpp"

namespace ctqw {

/**
 * Eigenvalues E_n of a Hamiltonian and the overlaps Q_n = |<0|q_n>|^2 of its
 * eigenvectors with the origin.
 *
 * Energies are ascending and weights sum to one. Within a degenerate cluster
 * the weight is split equally; the return probability only depends on the
 * cluster total.
 */
class SpectralForm {
public:
    SpectralForm(std::vector<double> energies, std::vector<double> weights);

    const std::vector<double>& energies() const noexcept { return energies_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return energies_.size(); }

    /// |sum_n Q_n exp(-i E_n t)|^2, clamped to [0, 1].
    double return_probability(double t) const;

    /// sum_n Q_n^2, the infinite-time average of p0 when energies are distinct.
    double inverse_participation() const;

private:
    std::vector<double> energies_;
    std::vector<double> weights_;
};

struct EigenOptions {
    int max_iterations_per_eigenvalue = 60;
    /// Relative width used to merge numerically degenerate eigenvalues.
    double degeneracy_tolerance = 1e-9;
};

/// Throws NumericalError if the QL iteration fails to converge.
SpectralForm spectral_decompose(const Hamiltonian& h, const EigenOptions& options = {});

/**
 * Symmetric tridiagonal eigenproblem by implicit QL with Wilkinson-type shifts.
 *
 * `diagonal` is overwritten by the (unsorted) eigenvalues. `first_row` holds
 * the first row of the accumulated rotation matrix on entry (usually e_0) and
 * the first components of the eigenvectors on exit.
 */
void tridiagonal_ql(std::vector<double>& diagonal, std::vector<double> off_diagonal,
                    std::vector<double>& first_row, int max_iterations = 60);

} // namespace ctqw
