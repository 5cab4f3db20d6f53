#include "ctqw/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "ctqw/errors.hpp"

namespace ctqw {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite_positive(double value, const char* what)
{
    if (!(value > 0.0) || !std::isfinite(value)) throw ValidationError(fmt::format("{} must be positive, got {}", what, value));
}

} // namespace

void validate(const ScheduleLaw& law)
{
    std::visit(Overloaded{
                   [](const PoissonLaw& p) { require_finite_positive(p.lambda, "lambda"); },
                   [](const PeriodicLaw& p) {
                       require_finite_positive(p.period, "period");
                       require_finite_positive(p.first, "first measurement time");
                   },
                   [](const JitteredLaw& j) {
                       require_finite_positive(j.period, "period");
                       require_finite_positive(j.first, "first measurement time");
                       require_finite_positive(j.delta, "jitter half-width");
                       if (!(j.delta < j.period / 2.0)) {
                           throw ValidationError(fmt::format("jitter half-width {} must be below period/2 = {}", j.delta,
                                                             j.period / 2.0));
                       }
                       if (!(j.delta < j.first)) {
                           throw ValidationError(
                               fmt::format("jitter half-width {} must be below the first time {}", j.delta, j.first));
                       }
                   },
               },
               law);
}

bool is_random(const ScheduleLaw& law) noexcept
{
    return !std::holds_alternative<PeriodicLaw>(law);
}

nlohmann::json to_json(const ScheduleLaw& law)
{
    return std::visit(Overloaded{
                          [](const PoissonLaw& p) -> nlohmann::json { return {{"kind", "poisson"}, {"lambda", p.lambda}}; },
                          [](const PeriodicLaw& p) -> nlohmann::json {
                              return {{"kind", "periodic"}, {"period", p.period}, {"first", p.first}};
                          },
                          [](const JitteredLaw& j) -> nlohmann::json {
                              return {{"kind", "jittered"},
                                      {"period", j.period},
                                      {"first", j.first},
                                      {"delta", j.delta},
                                      {"jitter", "uniform"}};
                          },
                      },
                      law);
}

ScheduleLaw schedule_law_from_json(const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("kind")) throw ValidationError("schedule law must be an object with a kind");
    const auto kind = j.at("kind").get<std::string>();
    ScheduleLaw law;
    if (kind == "poisson") {
        law = PoissonLaw{j.at("lambda").get<double>()};
    } else if (kind == "periodic") {
        law = PeriodicLaw{j.at("period").get<double>(), j.at("first").get<double>()};
    } else if (kind == "jittered") {
        if (j.value("jitter", std::string("uniform")) != "uniform") throw ValidationError("only uniform jitter is supported");
        law = JitteredLaw{j.at("period").get<double>(), j.at("first").get<double>(), j.at("delta").get<double>()};
    } else {
        throw ValidationError(fmt::format("unknown schedule law '{}'", kind));
    }
    validate(law);
    return law;
}

void generate_into(const ScheduleLaw& law, SplitMix64& rng, std::span<double> out)
{
    std::visit(Overloaded{
                   [&](const PoissonLaw& p) {
                       double t = 0.0;
                       for (auto& slot : out) {
                           t += -std::log(rng.uniform_open()) / p.lambda;
                           slot = t;
                       }
                   },
                   [&](const PeriodicLaw& p) {
                       for (std::size_t i = 0; i < out.size(); ++i) out[i] = p.first + static_cast<double>(i) * p.period;
                   },
                   [&](const JitteredLaw& j) {
                       for (std::size_t i = 0; i < out.size(); ++i) {
                           const double offset = j.delta * (2.0 * rng.uniform_open() - 1.0);
                           out[i] = j.first + static_cast<double>(i) * j.period + offset;
                       }
                   },
               },
               law);
}

MeasurementSchedule generate(const ScheduleLaw& law, std::size_t count, std::uint64_t seed)
{
    validate(law);
    if (count == 0) throw ValidationError("schedule count must be at least 1");
    MeasurementSchedule schedule{std::vector<double>(count), law, std::nullopt};
    SplitMix64 rng(seed);
    generate_into(law, rng, schedule.times);
    if (is_random(law)) schedule.seed = seed;
    return schedule;
}

void write_schedule_csv(std::ostream& out, const MeasurementSchedule& schedule)
{
    out << "index,t\n";
    for (std::size_t i = 0; i < schedule.times.size(); ++i) fmt::print(out, "{},{:.17g}\n", i + 1, schedule.times[i]);
}

nlohmann::json to_json(const MeasurementSchedule& schedule)
{
    nlohmann::json j;
    j["law"] = to_json(schedule.law);
    j["seed"] = schedule.seed ? nlohmann::json(*schedule.seed) : nlohmann::json(nullptr);
    j["rng_id"] = kRngId;
    j["times"] = schedule.times;
    return j;
}

double erlang_cdf(int k, double lambda, double t)
{
    if (t <= 0.0) return 0.0;
    return boost::math::gamma_p(static_cast<double>(k), lambda * t);
}

ErlangReport erlang_check(double lambda, int k, std::size_t samples, std::uint64_t seed)
{
    require_finite_positive(lambda, "lambda");
    if (k < 1) throw ValidationError("erlang_check needs k >= 1");
    if (samples < 1000) throw ValidationError("erlang_check needs at least 1000 samples");

    const PoissonLaw law{lambda};
    std::vector<double> arrival(samples);
    std::vector<double> buffer(static_cast<std::size_t>(k));
    for (std::size_t s = 0; s < samples; ++s) {
        SplitMix64 rng(derive_seed(seed, s));
        generate_into(law, rng, buffer);
        arrival[s] = buffer.back();
    }

    ErlangReport report;
    report.lambda = lambda;
    report.k = k;
    report.samples = samples;

    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const double ratio = arrival[s] / k;
        const double delta = ratio - mean;
        mean += delta / static_cast<double>(s + 1);
        m2 += delta * (ratio - mean);
    }
    report.mean_ratio = mean;
    report.ratio_std_error = std::sqrt(m2 / static_cast<double>(samples - 1)) / std::sqrt(static_cast<double>(samples));

    std::sort(arrival.begin(), arrival.end());
    const auto n = static_cast<double>(samples);
    double distance = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double cdf = erlang_cdf(k, lambda, arrival[i]);
        distance = std::max({distance, (static_cast<double>(i) + 1.0) / n - cdf, cdf - static_cast<double>(i) / n});
    }
    report.ks_statistic = distance;
    report.ks_critical_1pct = 1.63 / std::sqrt(n);
    return report;
}

} // namespace ctqw
