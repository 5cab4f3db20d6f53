#pragma once

#include <complex>
#include <iosfwd>
#include <variant>

#include <nlohmann/json.hpp>

#include "ctqw/spectral.hpp"

namespace ctqw {

enum class Parity { Odd, Even };

/**
 * Closed-form return probability on the cycle C_N, N = 2n+1 (odd) or N = 2n (even).
 *
 * Odd:  p0 = 1/N^2 + 4/N^2 sum_{k=1..n} sum_{j=0..n} cos(2 g t xi_kj),
 *       xi_kj = cos(2 k pi/N) - cos(2 j pi/N).
 * Even: p0 = 1/(2n^2) + cos(4 g t)/(2n^2) + 1/n^2 sum_{k=1..n-1} sum_{j=0..n} cos(2 g t zeta_kj),
 *       zeta_kj = cos(k pi/n) - cos(j pi/n).
 *
 * Both follow from the circulant spectrum E_k = 2g(1 - cos(2 pi k/N)) with
 * uniform weights 1/N, and agree with spectral_decompose of Cycle(N) to 1e-10.
 */
struct CyclicClosedForm {
    int n = 1;
    Parity parity = Parity::Odd;
    double gamma = 1.0;

    static CyclicClosedForm for_cycle(int vertex_count, double gamma = 1.0);
    int vertex_count() const noexcept { return parity == Parity::Odd ? 2 * n + 1 : 2 * n; }
    void validate() const;
};

double cyclic_p0(const CyclicClosedForm& form, double t);

/// <k|exp(-iHt)|j> on the infinite line: i^{k-j} e^{-2it} J_{k-j}(2t). Requires |k-j| <= 64.
std::complex<double> line_amplitude(long k, long j, double t);

enum class Modulation { Constant, CosineSquared };
enum class DecayLaw { Power, Exponential };

/**
 * Asymptotic decay model for graphs whose exact propagator is not modelled.
 *
 * Power:       min(1, scale * m(t) * t^-alpha), m = 1 or cos^2(2t - pi/4).
 * Exponential: min(1, scale * exp(-rate t)).
 * Only meant for recurrence classification, not as exact dynamics.
 */
struct EnvelopeModel {
    double alpha = 1.0;
    Modulation modulation = Modulation::Constant;
    double scale = 1.0;
    DecayLaw decay = DecayLaw::Power;
    double rate = 1.0;

    void validate() const;
};

double envelope_p0(const EnvelopeModel& model, double t);

struct LineBessel {};

struct LatticeBessel {
    int d = 1;
};

using ReturnModel = std::variant<SpectralForm, CyclicClosedForm, LineBessel, LatticeBessel, EnvelopeModel>;

/// Return probability p0(t) = |<0|exp(-iHt)|0>|^2 for any model, in [0, 1].
double p0(const ReturnModel& model, double t);

/// Short machine-readable description of a model (kind plus parameters).
nlohmann::json describe(const ReturnModel& model);

/// CSV "t,p0" on a uniform grid of `points` samples over [0, t_max], 17 significant digits.
void write_p0_trace(std::ostream& out, const ReturnModel& model, double t_max, std::size_t points);

} // namespace ctqw
