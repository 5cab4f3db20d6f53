#include "ctqw/polya.hpp"

#include <algorithm>
#include <atomic>
#include <cfloat>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "ctqw/errors.hpp"
#include "ctqw/laguerre.hpp"
#include "ctqw/stats.hpp"

namespace ctqw {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kOneSnap = 1.0 - 4.0 * kEps;
constexpr double kZeroFloor = (8.0 * kEps) * (8.0 * kEps);
constexpr double kLogUnderflow = -745.0;
constexpr std::size_t kTrialBlock = 4096;

unsigned resolve_threads(unsigned requested)
{
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Runs body(i) for i in [0, count) on up to `threads` workers. Results must be
// written to per-index slots so that the outcome is independent of scheduling.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body)
{
    const auto workers = static_cast<std::size_t>(std::min<std::size_t>(resolve_threads(threads), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count && !failed; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

/// Welford accumulator combinable with Chan's formula.
struct Moments {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) noexcept
    {
        count += 1.0;
        const double delta = x - mean;
        mean += delta / count;
        m2 += delta * (x - mean);
    }

    void merge(const Moments& other) noexcept
    {
        if (other.count == 0.0) return;
        if (count == 0.0) {
            *this = other;
            return;
        }
        const double total = count + other.count;
        const double delta = other.mean - mean;
        mean += delta * other.count / total;
        m2 += other.m2 + delta * delta * count * other.count / total;
        count = total;
    }

    double std_error() const noexcept
    {
        if (count < 2.0) return 0.0;
        return std::sqrt(m2 / (count - 1.0)) / std::sqrt(count);
    }
};

void check_trials(std::size_t trials)
{
    if (trials < 100) throw ValidationError(fmt::format("Monte Carlo needs at least 100 trials, got {}", trials));
}

} // namespace

ReturnProbability as_function(const ReturnModel& model)
{
    return [model](double t) { return p0(model, t); };
}

// ---------------------------------------------------------------------------

double partial_polya(const ReturnProbability& p0_fn, std::span<const double> times)
{
    double log_survival = 0.0;
    for (double t : times) {
        const double p = p0_fn(t);
        if (p >= kOneSnap) return 1.0;
        if (p <= kZeroFloor) continue;
        log_survival += std::log1p(-p);
        if (log_survival < kLogUnderflow) return 1.0;
    }
    return log_survival == 0.0 ? 0.0 : -std::expm1(log_survival);
}

double partial_polya(const ReturnModel& model, std::span<const double> times)
{
    return partial_polya([&model](double t) { return p0(model, t); }, times);
}

double partial_polya(const ReturnModel& model, const MeasurementSchedule& schedule)
{
    if (schedule.times.empty()) throw ValidationError("partial_polya needs a non-empty schedule");
    return partial_polya(model, schedule.times);
}

std::string_view to_string(EstimateMethod method) noexcept
{
    switch (method) {
    case EstimateMethod::PartialProduct: return "partial-product";
    case EstimateMethod::MonteCarlo: return "monte-carlo";
    case EstimateMethod::Quadrature: return "quadrature";
    }
    return "?";
}

nlohmann::json to_json(const PolyaEstimate& estimate, const nlohmann::json& model)
{
    nlohmann::json j;
    j["model"] = model;
    j["law"] = to_json(estimate.law);
    j["method"] = to_string(estimate.method);
    j["n_points"] = estimate.n_points;
    j["trials"] = estimate.trials;
    j["value"] = estimate.value;
    j["std_error"] = estimate.std_error;
    j["seed"] = estimate.seed ? nlohmann::json(*estimate.seed) : nlohmann::json(nullptr);
    j["rng_id"] = estimate.method == EstimateMethod::MonteCarlo ? nlohmann::json(kRngId) : nlohmann::json(nullptr);
    if (estimate.method == EstimateMethod::Quadrature) {
        j["error_estimate"] = estimate.error_estimate;
        j["nodes_per_dim"] = estimate.nodes_per_dim;
    }
    return j;
}

// ---------------------------------------------------------------------------

PolyaEstimate monte_carlo_expectation(const ReturnProbability& p0_fn, const ScheduleLaw& law, std::size_t n_points,
                                      std::size_t trials, std::uint64_t seed, const MonteCarloOptions& options)
{
    validate(law);
    check_trials(trials);

    PolyaEstimate estimate;
    estimate.method = EstimateMethod::MonteCarlo;
    estimate.n_points = n_points;
    estimate.trials = trials;
    estimate.law = law;
    estimate.seed = seed;
    if (n_points == 0) return estimate;

    if (!is_random(law)) {
        std::vector<double> times(n_points);
        SplitMix64 rng(seed);
        generate_into(law, rng, times);
        estimate.value = partial_polya(p0_fn, times);
        return estimate;
    }

    const std::size_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
    std::vector<Moments> block_moments(blocks);
    parallel_for(blocks, options.threads, [&](std::size_t b) {
        std::vector<double> times(n_points);
        Moments local;
        const std::size_t end = std::min(trials, (b + 1) * kTrialBlock);
        for (std::size_t trial = b * kTrialBlock; trial < end; ++trial) {
            SplitMix64 rng(derive_seed(seed, trial));
            generate_into(law, rng, times);
            local.add(partial_polya(p0_fn, times));
        }
        block_moments[b] = local;
    });

    Moments total;
    for (const auto& m : block_moments) total.merge(m);
    estimate.value = std::clamp(total.mean, 0.0, 1.0);
    estimate.std_error = total.std_error();
    return estimate;
}

PolyaEstimate monte_carlo_expectation(const ReturnModel& model, const ScheduleLaw& law, std::size_t n_points,
                                      std::size_t trials, std::uint64_t seed, const MonteCarloOptions& options)
{
    return monte_carlo_expectation(as_function(model), law, n_points, trials, seed, options);
}

MonteCarloProfile monte_carlo_profile(const ReturnProbability& p0_fn, const ScheduleLaw& law, std::size_t n_points,
                                      std::size_t trials, std::uint64_t seed, const MonteCarloOptions& options)
{
    validate(law);
    check_trials(trials);
    if (n_points < 1 || n_points > kMaxProfilePoints) {
        throw ValidationError(fmt::format("profile n_points must be in [1, {}]", kMaxProfilePoints));
    }

    struct Block {
        std::vector<Moments> prefix;
        std::vector<Moments> increment;
    };
    const std::size_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
    std::vector<Block> block_stats(blocks);
    parallel_for(blocks, options.threads, [&](std::size_t b) {
        Block local{std::vector<Moments>(n_points), std::vector<Moments>(n_points - 1)};
        std::vector<double> times(n_points);
        std::vector<double> prefix(n_points);
        const std::size_t end = std::min(trials, (b + 1) * kTrialBlock);
        for (std::size_t trial = b * kTrialBlock; trial < end; ++trial) {
            SplitMix64 rng(derive_seed(seed, trial));
            generate_into(law, rng, times);
            double log_survival = 0.0;
            bool certain = false;
            for (std::size_t i = 0; i < n_points; ++i) {
                if (!certain) {
                    const double p = p0_fn(times[i]);
                    if (p >= kOneSnap) {
                        certain = true;
                    } else if (p > kZeroFloor) {
                        log_survival += std::log1p(-p);
                        certain = log_survival < kLogUnderflow;
                    }
                }
                prefix[i] = certain ? 1.0 : (log_survival == 0.0 ? 0.0 : -std::expm1(log_survival));
                local.prefix[i].add(prefix[i]);
                if (i > 0) local.increment[i - 1].add(prefix[i] - prefix[i - 1]);
            }
        }
        block_stats[b] = std::move(local);
    });

    MonteCarloProfile profile;
    profile.trials = trials;
    std::vector<Moments> prefix(n_points);
    std::vector<Moments> increment(n_points - 1);
    for (const auto& block : block_stats) {
        for (std::size_t i = 0; i < n_points; ++i) prefix[i].merge(block.prefix[i]);
        for (std::size_t i = 0; i + 1 < n_points; ++i) increment[i].merge(block.increment[i]);
    }
    for (const auto& m : prefix) {
        profile.mean.push_back(m.mean);
        profile.std_error.push_back(m.std_error());
    }
    for (const auto& m : increment) {
        profile.increment.push_back(m.mean);
        profile.increment_std_error.push_back(m.std_error());
    }
    return profile;
}

// ---------------------------------------------------------------------------

namespace {

// Terms whose accumulated weight falls below this cannot move the sum
// (the integrand is bounded by 1); they are skipped.
constexpr double kNegligibleWeight = 1e-22;

double survival_integral(const ReturnProbability& p0_fn, double lambda, std::size_t n_points, int nodes,
                         unsigned threads)
{
    const auto rule = gauss_laguerre(nodes);
    const auto n = static_cast<std::size_t>(nodes);

    // level(depth, elapsed, weight) = sum_i w_i (1 - p0(elapsed + x_i / lambda)) * level(depth + 1, ...)
    auto level = [&](auto&& self, std::size_t depth, double elapsed, double weight) -> double {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = weight * rule.weights[i];
            if (w < kNegligibleWeight) continue;
            const double t = elapsed + rule.nodes[i] / lambda;
            const double survive = 1.0 - p0_fn(t);
            if (survive == 0.0) continue;
            const double inner = depth + 1 == n_points ? 1.0 : self(self, depth + 1, t, w);
            sum += rule.weights[i] * survive * inner;
        }
        return sum;
    };

    std::vector<double> outer(n, 0.0);
    parallel_for(n, threads, [&](std::size_t i) {
        const double w = rule.weights[i];
        if (w < kNegligibleWeight) return;
        const double t = rule.nodes[i] / lambda;
        const double survive = 1.0 - p0_fn(t);
        const double inner = n_points == 1 ? 1.0 : level(level, 1, t, w);
        outer[i] = w * survive * inner;
    });
    CompensatedSum total;
    for (double v : outer) total.add(v);
    return total.value();
}

} // namespace

PolyaEstimate quadrature_expectation(const ReturnProbability& p0_fn, double lambda, std::size_t n_points,
                                     int nodes_per_dim, const MonteCarloOptions& options)
{
    if (!(lambda > 0.0)) throw ValidationError("quadrature needs lambda > 0");
    if (n_points < 1 || n_points > 4) throw ValidationError(fmt::format("quadrature needs 1 <= n_points <= 4, got {}", n_points));
    if (nodes_per_dim < 32) throw ValidationError(fmt::format("quadrature needs nodes_per_dim >= 32, got {}", nodes_per_dim));
    const double evaluations = std::pow(static_cast<double>(nodes_per_dim), static_cast<double>(n_points));
    if (evaluations > kMaxQuadratureEvaluations) {
        throw ResourceError(fmt::format("{}^{} = {:.3g} integrand evaluations exceed the cap of {:.0e}; use Monte Carlo",
                                        nodes_per_dim, n_points, evaluations, kMaxQuadratureEvaluations));
    }

    const int coarse = std::max(8, (2 * nodes_per_dim) / 3);
    const double fine_value = 1.0 - survival_integral(p0_fn, lambda, n_points, nodes_per_dim, options.threads);
    const double coarse_value = 1.0 - survival_integral(p0_fn, lambda, n_points, coarse, options.threads);

    PolyaEstimate estimate;
    estimate.method = EstimateMethod::Quadrature;
    estimate.n_points = n_points;
    estimate.value = std::clamp(fine_value, 0.0, 1.0);
    estimate.error_estimate = std::abs(fine_value - coarse_value);
    estimate.nodes_per_dim = nodes_per_dim;
    estimate.law = PoissonLaw{lambda};
    return estimate;
}

PolyaEstimate quadrature_expectation(const ReturnModel& model, double lambda, std::size_t n_points,
                                     int nodes_per_dim, const MonteCarloOptions& options)
{
    return quadrature_expectation(as_function(model), lambda, n_points, nodes_per_dim, options);
}

// ---------------------------------------------------------------------------

std::string_view to_string(GrowthModel model) noexcept
{
    switch (model) {
    case GrowthModel::Logarithmic: return "logarithmic";
    case GrowthModel::Linear: return "linear";
    case GrowthModel::Converging: return "converging";
    case GrowthModel::Boundary: return "boundary";
    }
    return "?";
}

nlohmann::json to_json(const GrowthFit& fit)
{
    return {{"model", to_string(fit.model)},
            {"coefficient", fit.coefficient},
            {"intercept", fit.intercept},
            {"rss", fit.rss},
            {"r_squared", fit.r_squared}};
}

DivergenceDiagnostic divergence_diagnostic(const ReturnProbability& p0_fn, const ScheduleLaw& law,
                                           std::size_t max_points, std::uint64_t seed)
{
    if (max_points < 1000) throw ValidationError(fmt::format("divergence diagnostic needs >= 1000 points, got {}", max_points));
    const auto schedule = generate(law, max_points, seed);

    DivergenceDiagnostic diagnostic;
    diagnostic.partial_sums.reserve(max_points);
    std::vector<double> sums(max_points);
    CompensatedSum running;
    for (std::size_t i = 0; i < max_points; ++i) {
        running.add(p0_fn(schedule.times[i]));
        sums[i] = running.value();
        diagnostic.partial_sums.push_back({i + 1, schedule.times[i], sums[i]});
    }

    std::vector<double> regressor(max_points);
    const std::array<GrowthModel, 3> models{GrowthModel::Logarithmic, GrowthModel::Linear, GrowthModel::Converging};
    for (std::size_t m = 0; m < models.size(); ++m) {
        for (std::size_t i = 0; i < max_points; ++i) {
            const double t = schedule.times[i];
            regressor[i] = models[m] == GrowthModel::Logarithmic ? std::log(t)
                           : models[m] == GrowthModel::Linear    ? t
                                                                 : -1.0 / t;
        }
        const auto line = fit_line(regressor, sums);
        diagnostic.candidates[m] = {models[m], line.slope, line.intercept, line.rss, line.r_squared};
    }

    std::array<std::size_t, 3> rank{0, 1, 2};
    std::sort(rank.begin(), rank.end(),
              [&](std::size_t a, std::size_t b) { return diagnostic.candidates[a].rss < diagnostic.candidates[b].rss; });
    diagnostic.growth_fit = diagnostic.candidates[rank[0]];
    const double best = diagnostic.candidates[rank[0]].rss;
    const double second = diagnostic.candidates[rank[1]].rss;
    if (second - best <= 0.01 * second) diagnostic.growth_fit.model = GrowthModel::Boundary;

    diagnostic.tail_bound = sums.back() - sums[max_points / 10 - 1];
    return diagnostic;
}

DivergenceDiagnostic divergence_diagnostic(const ReturnModel& model, const ScheduleLaw& law, std::size_t max_points,
                                           std::uint64_t seed)
{
    return divergence_diagnostic(as_function(model), law, max_points, seed);
}

void write_partial_sums_csv(std::ostream& out, const DivergenceDiagnostic& diagnostic)
{
    out << "n,t_n,S_n\n";
    for (const auto& row : diagnostic.partial_sums) fmt::print(out, "{},{:.17g},{:.17g}\n", row.n, row.t, row.sum);
}

// ---------------------------------------------------------------------------

std::string_view to_string(Verdict verdict) noexcept
{
    switch (verdict) {
    case Verdict::Recurrent: return "recurrent";
    case Verdict::Transient: return "transient";
    case Verdict::Boundary: return "boundary";
    }
    return "?";
}

nlohmann::json to_json(const RecurrenceVerdict& verdict)
{
    return {{"verdict", to_string(verdict.verdict)},
            {"alpha", verdict.alpha_estimate},
            {"ci_low", verdict.confidence_interval.first},
            {"ci_high", verdict.confidence_interval.second},
            {"maxima", verdict.maxima}};
}

namespace {

double slope_of(std::span<const double> x, std::span<const double> y, std::span<const std::size_t> pick)
{
    double mx = 0.0;
    double my = 0.0;
    for (auto i : pick) {
        mx += x[i];
        my += y[i];
    }
    const auto n = static_cast<double>(pick.size());
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (auto i : pick) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

} // namespace

RecurrenceVerdict estimate_decay_exponent(const ReturnProbability& p0_fn, double t_min, double t_max,
                                          std::size_t grid_points, const DecayFitOptions& options)
{
    if (!(t_min > 0.0) || !(t_max >= 10.0 * t_min)) {
        throw ValidationError(fmt::format("decay fit needs t_max >= 10 t_min > 0, got [{}, {}]", t_min, t_max));
    }
    if (grid_points < 1000) throw ValidationError(fmt::format("decay fit needs >= 1000 grid points, got {}", grid_points));
    if (options.bootstrap_resamples < 1) throw ValidationError("decay fit needs at least one bootstrap resample");

    const double step = (t_max - t_min) / static_cast<double>(grid_points - 1);
    std::vector<double> values(grid_points);
    for (std::size_t i = 0; i < grid_points; ++i) values[i] = p0_fn(t_min + step * static_cast<double>(i));

    std::vector<double> log_t;
    std::vector<double> log_p;
    for (std::size_t i = 1; i + 1 < grid_points; ++i) {
        const double left = values[i - 1];
        const double mid = values[i];
        const double right = values[i + 1];
        if (!(mid > left && mid >= right) || mid < DBL_MIN) continue;
        // vertex of the parabola through the three samples
        const double curvature = left - 2.0 * mid + right;
        double offset = 0.0;
        double peak = mid;
        if (curvature < 0.0) {
            offset = std::clamp(0.5 * (left - right) / curvature, -0.5, 0.5);
            peak = std::max(mid, mid - 0.25 * (left - right) * offset);
        }
        log_t.push_back(std::log(t_min + step * (static_cast<double>(i) + offset)));
        log_p.push_back(std::log(std::min(peak, 1.0)));
    }

    const std::size_t maxima = log_t.size();
    if (maxima == 0) {
        const bool non_increasing =
            std::adjacent_find(values.begin(), values.end(), [](double a, double b) { return b > a; }) == values.end();
        if (!non_increasing) throw InsufficientDataError("p0 has no local maxima and is not monotone on the window");
        // A monotone p0 is its own upper envelope; sample it geometrically.
        constexpr std::size_t kEnvelopeSamples = 512;
        std::size_t last = grid_points;
        for (std::size_t s = 0; s < kEnvelopeSamples; ++s) {
            const double t = t_min * std::pow(t_max / t_min, static_cast<double>(s) / (kEnvelopeSamples - 1));
            const auto i = std::min(grid_points - 1, static_cast<std::size_t>(std::llround((t - t_min) / step)));
            if (i == last || values[i] < DBL_MIN || values[i] >= 1.0) continue;
            last = i;
            log_t.push_back(std::log(t_min + step * static_cast<double>(i)));
            log_p.push_back(std::log(values[i]));
        }
        if (log_t.size() < 10) throw InsufficientDataError("too few positive envelope samples below 1");
    } else if (maxima < 10) {
        throw InsufficientDataError(fmt::format("found {} local maxima of p0, need at least 10", maxima));
    }

    const auto fit = fit_line(log_t, log_p);
    RecurrenceVerdict verdict;
    verdict.alpha_estimate = -fit.slope;
    verdict.maxima = maxima;

    const std::size_t n = log_t.size();
    std::vector<std::size_t> pick(n);
    std::vector<double> alphas;
    alphas.reserve(static_cast<std::size_t>(options.bootstrap_resamples));
    SplitMix64 rng(options.bootstrap_seed);
    for (int b = 0; b < options.bootstrap_resamples; ++b) {
        for (auto& p : pick) p = static_cast<std::size_t>(rng.uniform_open() * static_cast<double>(n));
        const double slope = slope_of(log_t, log_p, pick);
        if (std::isfinite(slope)) alphas.push_back(-slope);
    }
    if (alphas.empty()) {
        verdict.confidence_interval = {verdict.alpha_estimate, verdict.alpha_estimate};
    } else {
        std::sort(alphas.begin(), alphas.end());
        const double tail = 0.5 * (1.0 - options.confidence);
        auto quantile = [&](double q) {
            const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(alphas.size() - 1) + 0.5));
            return alphas[std::min(idx, alphas.size() - 1)];
        };
        verdict.confidence_interval = {quantile(tail), quantile(1.0 - tail)};
    }

    const double threshold = 1.0 + kAlphaDeadBand;
    if (verdict.confidence_interval.second <= threshold) {
        verdict.verdict = Verdict::Recurrent;
    } else if (verdict.confidence_interval.first > threshold) {
        verdict.verdict = Verdict::Transient;
    } else {
        verdict.verdict = Verdict::Boundary;
    }
    return verdict;
}

RecurrenceVerdict estimate_decay_exponent(const ReturnModel& model, double t_min, double t_max,
                                          std::size_t grid_points, const DecayFitOptions& options)
{
    return estimate_decay_exponent(as_function(model), t_min, t_max, grid_points, options);
}

} // namespace ctqw
