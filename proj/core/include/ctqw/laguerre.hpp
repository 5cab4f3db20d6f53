#pragma once

#include <vector>

namespace ctqw {

/// Nodes and weights of n-point Gauss-Laguerre quadrature for int_0^inf e^{-x} f(x) dx.
struct GaussLaguerreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Newton iteration on L_n with asymptotic starting guesses. Throws NumericalError on failure.
GaussLaguerreRule gauss_laguerre(int n);

} // namespace ctqw
