#include "ctqw/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "ctqw/bessel.hpp"
#include "ctqw/errors.hpp"

namespace ctqw {

CyclicClosedForm CyclicClosedForm::for_cycle(int vertex_count, double gamma)
{
    if (vertex_count < 3) throw ValidationError(fmt::format("cyclic closed form needs N >= 3, got {}", vertex_count));
    CyclicClosedForm form{vertex_count / 2, vertex_count % 2 == 1 ? Parity::Odd : Parity::Even, gamma};
    form.validate();
    return form;
}

void CyclicClosedForm::validate() const
{
    if (!(gamma > 0.0)) throw ValidationError("cyclic closed form needs gamma > 0");
    if (parity == Parity::Odd && n < 1) throw ValidationError("odd cyclic form needs N = 2n+1 >= 3");
    if (parity == Parity::Even && n < 2) throw ValidationError("even cyclic form needs N = 2n >= 4");
}

double cyclic_p0(const CyclicClosedForm& form, double t)
{
    const int n = form.n;
    const double scale = 2.0 * form.gamma * t;
    double value;
    if (form.parity == Parity::Odd) {
        const double size = 2.0 * n + 1.0;
        std::vector<double> c(static_cast<std::size_t>(n) + 1);
        for (int k = 0; k <= n; ++k) c[static_cast<std::size_t>(k)] = std::cos(2.0 * k * std::numbers::pi / size);
        double sum = 0.0;
        for (int k = 1; k <= n; ++k)
            for (int j = 0; j <= n; ++j)
                sum += std::cos(scale * (c[static_cast<std::size_t>(k)] - c[static_cast<std::size_t>(j)]));
        value = (1.0 + 4.0 * sum) / (size * size);
    } else {
        const double nn = static_cast<double>(n) * n;
        std::vector<double> c(static_cast<std::size_t>(n) + 1);
        for (int k = 0; k <= n; ++k) c[static_cast<std::size_t>(k)] = std::cos(k * std::numbers::pi / n);
        double sum = 0.0;
        for (int k = 1; k <= n - 1; ++k)
            for (int j = 0; j <= n; ++j)
                sum += std::cos(scale * (c[static_cast<std::size_t>(k)] - c[static_cast<std::size_t>(j)]));
        value = (1.0 + std::cos(4.0 * form.gamma * t)) / (2.0 * nn) + sum / nn;
    }
    return std::clamp(value, 0.0, 1.0);
}

std::complex<double> line_amplitude(long k, long j, double t)
{
    const long m = k - j;
    const long order = std::labs(m);
    if (order > kMaxBesselOrder) {
        throw DomainError(fmt::format("line_amplitude: |k - j| = {} exceeds {}", order, kMaxBesselOrder));
    }
    if (!(t >= 0.0)) throw DomainError("line_amplitude: t must be non-negative");
    double bessel = bessel_j(static_cast<int>(order), 2.0 * t);
    if (m < 0 && (order % 2 == 1)) bessel = -bessel; // J_{-m} = (-1)^m J_m
    static constexpr std::complex<double> kPowersOfI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const auto i_power = kPowersOfI[((m % 4) + 4) % 4];
    return i_power * std::polar(1.0, -2.0 * t) * bessel;
}

void EnvelopeModel::validate() const
{
    if (!(scale > 0.0)) throw ValidationError("envelope scale must be positive");
    if (decay == DecayLaw::Power && !(alpha > 0.0)) throw ValidationError("envelope alpha must be positive");
    if (decay == DecayLaw::Exponential && !(rate > 0.0)) throw ValidationError("envelope rate must be positive");
}

double envelope_p0(const EnvelopeModel& model, double t)
{
    if (t <= 0.0) return 1.0;
    double value;
    if (model.decay == DecayLaw::Exponential) {
        value = model.scale * std::exp(-model.rate * t);
    } else {
        double m = 1.0;
        if (model.modulation == Modulation::CosineSquared) {
            const double c = std::cos(2.0 * t - std::numbers::pi / 4.0);
            m = c * c;
        }
        value = model.scale * m * std::pow(t, -model.alpha);
    }
    return std::min(1.0, value);
}

double p0(const ReturnModel& model, double t)
{
    struct Visitor {
        double t;
        double operator()(const SpectralForm& form) const { return form.return_probability(t); }
        double operator()(const CyclicClosedForm& form) const { return cyclic_p0(form, t); }
        double operator()(const LineBessel&) const
        {
            const double j0 = bessel_j(0, 2.0 * t);
            return j0 * j0;
        }
        double operator()(const LatticeBessel& lattice) const
        {
            const double j0 = bessel_j(0, 2.0 * t);
            double line = j0 * j0;
            double result = 1.0;
            for (int i = 0; i < lattice.d; ++i) result *= line;
            return result;
        }
        double operator()(const EnvelopeModel& envelope) const { return envelope_p0(envelope, t); }
    };
    return std::visit(Visitor{t}, model);
}

nlohmann::json describe(const ReturnModel& model)
{
    struct Visitor {
        nlohmann::json operator()(const SpectralForm& form) const
        {
            return {{"kind", "spectral"}, {"dimension", form.size()}};
        }
        nlohmann::json operator()(const CyclicClosedForm& form) const
        {
            return {{"kind", form.parity == Parity::Odd ? "cyclic-odd" : "cyclic-even"},
                    {"n", form.n},
                    {"vertices", form.vertex_count()},
                    {"gamma", form.gamma}};
        }
        nlohmann::json operator()(const LineBessel&) const { return {{"kind", "line"}}; }
        nlohmann::json operator()(const LatticeBessel& lattice) const { return {{"kind", "lattice"}, {"d", lattice.d}}; }
        nlohmann::json operator()(const EnvelopeModel& envelope) const
        {
            nlohmann::json j{{"kind", "envelope"}, {"scale", envelope.scale}};
            if (envelope.decay == DecayLaw::Exponential) {
                j["decay"] = "exponential";
                j["rate"] = envelope.rate;
            } else {
                j["decay"] = "power";
                j["alpha"] = envelope.alpha;
                j["modulation"] = envelope.modulation == Modulation::Constant ? "constant" : "cosine-squared";
            }
            return j;
        }
    };
    return std::visit(Visitor{}, model);
}

void write_p0_trace(std::ostream& out, const ReturnModel& model, double t_max, std::size_t points)
{
    if (points < 2) throw ValidationError("p0 trace needs at least 2 points");
    if (!(t_max > 0.0)) throw ValidationError("p0 trace needs t_max > 0");
    out << "t,p0\n";
    for (std::size_t i = 0; i < points; ++i) {
        const double t = t_max * static_cast<double>(i) / static_cast<double>(points - 1);
        fmt::print(out, "{:.17g},{:.17g}\n", t, p0(model, t));
    }
}

} // namespace ctqw
