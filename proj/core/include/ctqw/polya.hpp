#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctqw/propagator.hpp"
#include "ctqw/schedule.hpp"

namespace ctqw {

/// Any return probability p0(t) with values in [0, 1].
using ReturnProbability = std::function<double(double)>;

ReturnProbability as_function(const ReturnModel& model);

// ---------------------------------------------------------------------------
// Partial products

/**
 * 1 - prod_i (1 - p0(t_i)), accumulated as sum_i log1p(-p0(t_i)).
 *
 * p0 >= 1 - 4 eps makes the result exactly 1. p0 at or below the amplitude
 * round-off floor (8 eps)^2 contributes exactly nothing, so a schedule that
 * only hits zeros of p0 gives exactly 0. A log-sum below -745 is treated as
 * an underflowed product.
 */
double partial_polya(const ReturnProbability& p0, std::span<const double> times);
double partial_polya(const ReturnModel& model, std::span<const double> times);
double partial_polya(const ReturnModel& model, const MeasurementSchedule& schedule);

// ---------------------------------------------------------------------------
// Expectations over random schedules

enum class EstimateMethod { PartialProduct, MonteCarlo, Quadrature };

std::string_view to_string(EstimateMethod method) noexcept;

struct PolyaEstimate {
    double value = 0.0;
    EstimateMethod method = EstimateMethod::MonteCarlo;
    std::size_t n_points = 0;
    std::size_t trials = 0;          ///< Monte Carlo only
    double std_error = 0.0;          ///< Monte Carlo only
    double error_estimate = 0.0;     ///< Quadrature only: |Q(n) - Q(coarser n)|
    int nodes_per_dim = 0;           ///< Quadrature only
    ScheduleLaw law;
    std::optional<std::uint64_t> seed;
};

/// {model, law, method, n_points, trials, value, std_error, seed, rng_id}.
nlohmann::json to_json(const PolyaEstimate& estimate, const nlohmann::json& model);

struct MonteCarloOptions {
    /// 0 uses std::thread::hardware_concurrency().
    unsigned threads = 0;
};

/**
 * Mean of partial_polya over `trials` schedules drawn from `law`, trial i
 * seeded by derive_seed(seed, i). Trials are summed in fixed blocks and the
 * blocks combined in order, so the result is bit-identical for any thread
 * count. Requires trials >= 100; n_points = 0 gives 0.
 */
PolyaEstimate monte_carlo_expectation(const ReturnProbability& p0, const ScheduleLaw& law, std::size_t n_points,
                                      std::size_t trials, std::uint64_t seed, const MonteCarloOptions& options = {});
PolyaEstimate monte_carlo_expectation(const ReturnModel& model, const ScheduleLaw& law, std::size_t n_points,
                                      std::size_t trials, std::uint64_t seed, const MonteCarloOptions& options = {});

/// Per-prefix Monte Carlo statistics E[P_1..P_N] with paired increments E[P_{n+1}] - E[P_n].
struct MonteCarloProfile {
    std::size_t trials = 0;
    std::vector<double> mean;
    std::vector<double> std_error;
    /// increment[n] = E[P_{n+2}] - E[P_{n+1}], estimated per trial (common random numbers).
    std::vector<double> increment;
    std::vector<double> increment_std_error;
};

inline constexpr std::size_t kMaxProfilePoints = 64;

MonteCarloProfile monte_carlo_profile(const ReturnProbability& p0, const ScheduleLaw& law, std::size_t n_points,
                                      std::size_t trials, std::uint64_t seed, const MonteCarloOptions& options = {});

/// Quadrature grids beyond this many integrand evaluations are refused.
inline constexpr double kMaxQuadratureEvaluations = 1e8;

/**
 * E[P_N] under Poisson(lambda) timing as an N-fold integral over the
 * inter-arrival times, substituting u_k = lambda T_k and applying a tensor
 * product of Gauss-Laguerre rules:
 *
 *   E[P_N] = 1 - sum w_1..w_N prod_n [1 - p0((u_1 + ... + u_n) / lambda)].
 *
 * The integrand oscillates, so the rule is also evaluated at
 * max(32, 2n/3) nodes and the difference reported as error_estimate.
 * Requires 1 <= n_points <= 4 and nodes_per_dim >= 32; throws ResourceError
 * when nodes_per_dim^n_points exceeds 1e8.
 */
PolyaEstimate quadrature_expectation(const ReturnProbability& p0, double lambda, std::size_t n_points,
                                     int nodes_per_dim = 96, const MonteCarloOptions& options = {});
PolyaEstimate quadrature_expectation(const ReturnModel& model, double lambda, std::size_t n_points,
                                     int nodes_per_dim = 96, const MonteCarloOptions& options = {});

// ---------------------------------------------------------------------------
// Divergence of sum p0(t_i)

enum class GrowthModel { Logarithmic, Linear, Converging, Boundary };

std::string_view to_string(GrowthModel model) noexcept;

/// S = coefficient * g(t) + intercept with g = ln t, t, or -1/t.
struct GrowthFit {
    GrowthModel model = GrowthModel::Logarithmic;
    double coefficient = 0.0;
    double intercept = 0.0;
    double rss = 0.0;
    double r_squared = 0.0;
};

struct PartialSum {
    std::size_t n = 0;
    double t = 0.0;
    double sum = 0.0;
};

struct DivergenceDiagnostic {
    std::vector<PartialSum> partial_sums;
    /// Best model by residual sum of squares; Boundary when the two best are within 1%.
    GrowthFit growth_fit;
    /// Logarithmic, Linear, Converging, in that order.
    std::array<GrowthFit, 3> candidates;
    /// S_N - S_{floor(N/10)}.
    double tail_bound = 0.0;
};

/// Requires max_points >= 1000.
DivergenceDiagnostic divergence_diagnostic(const ReturnProbability& p0, const ScheduleLaw& law,
                                           std::size_t max_points, std::uint64_t seed);
DivergenceDiagnostic divergence_diagnostic(const ReturnModel& model, const ScheduleLaw& law,
                                           std::size_t max_points, std::uint64_t seed);

/// CSV "n,t_n,S_n".
void write_partial_sums_csv(std::ostream& out, const DivergenceDiagnostic& diagnostic);
nlohmann::json to_json(const GrowthFit& fit);

// ---------------------------------------------------------------------------
// Envelope decay classification

enum class Verdict { Recurrent, Transient, Boundary };

std::string_view to_string(Verdict verdict) noexcept;

/// Width of the dead band above alpha = 1.
inline constexpr double kAlphaDeadBand = 0.05;

struct RecurrenceVerdict {
    Verdict verdict = Verdict::Boundary;
    double alpha_estimate = 0.0;
    std::pair<double, double> confidence_interval{0.0, 0.0};
    std::size_t maxima = 0;
};

nlohmann::json to_json(const RecurrenceVerdict& verdict);

struct DecayFitOptions {
    int bootstrap_resamples = 1000;
    std::uint64_t bootstrap_seed = 0x5eed;
    /// Two-sided coverage of the percentile interval.
    double confidence = 0.95;
};

/**
 * Fits ln p0 at the local maxima of p0 on a uniform grid against ln t;
 * alpha is minus the slope. A non-oscillating, non-increasing p0 is its own
 * envelope and is fitted on the grid samples directly. The verdict is
 * Recurrent when the upper confidence bound is <= 1 + kAlphaDeadBand,
 * Transient when the lower bound exceeds it, Boundary otherwise.
 *
 * Requires t_max >= 10 t_min > 0 and grid_points >= 1000. Throws
 * InsufficientDataError when an oscillating p0 has fewer than 10 maxima.
 * The grid must resolve the oscillation (spacing well below its period).
 */
RecurrenceVerdict estimate_decay_exponent(const ReturnProbability& p0, double t_min, double t_max,
                                          std::size_t grid_points, const DecayFitOptions& options = {});
RecurrenceVerdict estimate_decay_exponent(const ReturnModel& model, double t_min, double t_max,
                                          std::size_t grid_points, const DecayFitOptions& options = {});

} // namespace ctqw
