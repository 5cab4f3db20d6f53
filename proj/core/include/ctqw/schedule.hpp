#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctqw/rng.hpp"

namespace ctqw {

/// Measurement instants of a rate-lambda Poisson process (i.i.d. Exponential gaps).
struct PoissonLaw {
    double lambda = 1.0;
};

/// t_i = first + (i-1) * period.
struct PeriodicLaw {
    double period = 1.0;
    double first = 1.0;
};

enum class JitterDistribution { Uniform };

/// Periodic grid with i.i.d. Uniform(-delta, delta) timing error per measurement.
struct JitteredLaw {
    double period = 1.0;
    double first = 1.0;
    double delta = 0.1;
    JitterDistribution distribution = JitterDistribution::Uniform;
};

using ScheduleLaw = std::variant<PoissonLaw, PeriodicLaw, JitteredLaw>;

/// Throws ValidationError unless lambda, period > 0, first > 0 and 0 < delta < min(period/2, first).
void validate(const ScheduleLaw& law);
bool is_random(const ScheduleLaw& law) noexcept;

nlohmann::json to_json(const ScheduleLaw& law);
ScheduleLaw schedule_law_from_json(const nlohmann::json& j);

struct MeasurementSchedule {
    std::vector<double> times;
    ScheduleLaw law;
    /// Absent for deterministic laws.
    std::optional<std::uint64_t> seed;
};

/// Deterministic for fixed (law, count, seed). A shorter schedule is a prefix of a longer one.
MeasurementSchedule generate(const ScheduleLaw& law, std::size_t count, std::uint64_t seed);

/// Allocation-free variant used by the estimators; draws from `rng` as needed.
void generate_into(const ScheduleLaw& law, SplitMix64& rng, std::span<double> out);

/// CSV "index,t" with 1-based index.
void write_schedule_csv(std::ostream& out, const MeasurementSchedule& schedule);
nlohmann::json to_json(const MeasurementSchedule& schedule);

struct ErlangReport {
    double lambda = 0.0;
    int k = 0;
    std::size_t samples = 0;
    /// Kolmogorov-Smirnov distance between empirical t_k and the Erlang(k, lambda) CDF.
    double ks_statistic = 0.0;
    /// 1.63 / sqrt(samples).
    double ks_critical_1pct = 0.0;
    double mean_ratio = 0.0;            ///< mean of t_k / k
    double ratio_std_error = 0.0;       ///< sample std of t_k / k over sqrt(samples)
};

ErlangReport erlang_check(double lambda, int k, std::size_t samples, std::uint64_t seed);

/// Erlang(k, lambda) CDF, the regularized lower incomplete gamma P(k, lambda t).
double erlang_cdf(int k, double lambda, double t);

} // namespace ctqw
