#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ctqw/errors.hpp"
#include "ctqw/rng.hpp"
#include "ctqw/schedule.hpp"

using namespace ctqw;
using std::numbers::pi;

TEST(Rng, SplitMix64ReferenceStream)
{
    // First outputs of the published SplitMix64 for seed 0.
    SplitMix64 rng(0);
    EXPECT_EQ(rng(), 0xe220a8397b1dcdafULL);
    EXPECT_EQ(rng(), 0x6e789e6aa1b965f4ULL);
    EXPECT_EQ(rng(), 0x06c45d188009454fULL);
}

TEST(Rng, UniformOpenInterval)
{
    SplitMix64 rng(7);
    double lo = 1.0;
    double hi = 0.0;
    double sum = 0.0;
    constexpr int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform_open();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    EXPECT_GT(lo, 0.0);
    EXPECT_LT(hi, 1.0);
    EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(Rng, DerivedSeedsDiffer)
{
    EXPECT_NE(derive_seed(42, 0), derive_seed(42, 1));
    EXPECT_NE(derive_seed(42, 0), derive_seed(43, 0));
    EXPECT_EQ(derive_seed(42, 9), derive_seed(42, 9));
}

TEST(Generate, PeriodicExample)
{
    const auto s = generate(PeriodicLaw{0.5, 0.5}, 4, 0);
    EXPECT_EQ(s.times, (std::vector<double>{0.5, 1.0, 1.5, 2.0}));
    EXPECT_FALSE(s.seed.has_value());
}

TEST(Generate, PoissonGapMean)
{
    const auto s = generate(PoissonLaw{1.0}, 100000, 2024);
    EXPECT_EQ(s.times.size(), 100000u);
    EXPECT_NEAR(s.times.back() / 100000.0, 1.0, 0.01);
    EXPECT_EQ(s.seed, std::optional<std::uint64_t>(2024));
}

TEST(Generate, PoissonGapsAreExponential)
{
    const double lambda = 2.5;
    const auto s = generate(PoissonLaw{lambda}, 50000, 5);
    std::vector<double> gaps(s.times.size());
    std::adjacent_difference(s.times.begin(), s.times.end(), gaps.begin());
    std::sort(gaps.begin(), gaps.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        const double cdf = 1.0 - std::exp(-lambda * gaps[i]);
        ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / gaps.size()),
                       std::abs(cdf - static_cast<double>(i + 1) / gaps.size())});
    }
    EXPECT_LT(ks, 1.63 / std::sqrt(static_cast<double>(gaps.size())));
}

TEST(Generate, JitteredStaysOnGrid)
{
    const JitteredLaw law{pi / 2, 3 * pi / 8, 0.01};
    const auto s = generate(law, 100, 11);
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        EXPECT_LE(std::abs(s.times[i] - (law.first + static_cast<double>(i) * law.period)), law.delta + 1e-12);
    }
}

TEST(Generate, JitteredNeverReorders)
{
    const JitteredLaw law{1.0, 0.6, 0.499};
    const auto s = generate(law, 100000, 3);
    EXPECT_GT(s.times.front(), 0.0);
    EXPECT_TRUE(std::adjacent_find(s.times.begin(), s.times.end(), std::greater_equal<>()) == s.times.end());
}

TEST(Generate, StrictlyIncreasingAndReproducible)
{
    for (const ScheduleLaw& law : std::vector<ScheduleLaw>{PoissonLaw{3.0}, PeriodicLaw{0.1, 0.2}, JitteredLaw{1.0, 1.0, 0.3}}) {
        const auto a = generate(law, 5000, 99);
        const auto b = generate(law, 5000, 99);
        EXPECT_EQ(a.times, b.times);
        EXPECT_GT(a.times.front(), 0.0);
        EXPECT_TRUE(std::adjacent_find(a.times.begin(), a.times.end(), std::greater_equal<>()) == a.times.end());
    }
    EXPECT_NE(generate(PoissonLaw{1.0}, 10, 1).times, generate(PoissonLaw{1.0}, 10, 2).times);
}

TEST(Generate, PrefixProperty)
{
    const auto longer = generate(PoissonLaw{1.0}, 1000, 17);
    const auto shorter = generate(PoissonLaw{1.0}, 10, 17);
    EXPECT_TRUE(std::equal(shorter.times.begin(), shorter.times.end(), longer.times.begin()));
}

TEST(Generate, PoissonCountProperty)
{
    const double lambda = 1.5;
    const double horizon = 4.0;
    constexpr int trials = 20000;
    double total = 0.0;
    for (int i = 0; i < trials; ++i) {
        const auto s = generate(PoissonLaw{lambda}, 40, derive_seed(8, static_cast<std::uint64_t>(i)));
        total += static_cast<double>(std::upper_bound(s.times.begin(), s.times.end(), horizon) - s.times.begin());
    }
    EXPECT_NEAR(total / trials, lambda * horizon, 3.0 * std::sqrt(lambda * horizon / trials));
}

TEST(Generate, InvalidLaws)
{
    EXPECT_THROW(generate(PoissonLaw{0.0}, 3, 1), ValidationError);
    EXPECT_THROW(generate(PeriodicLaw{-1.0, 1.0}, 3, 1), ValidationError);
    EXPECT_THROW(generate(PeriodicLaw{1.0, 0.0}, 3, 1), ValidationError);
    EXPECT_THROW(generate(JitteredLaw{1.0, 1.0, 0.5}, 3, 1), ValidationError);
    EXPECT_THROW(generate(JitteredLaw{1.0, 0.05, 0.1}, 3, 1), ValidationError);
    EXPECT_THROW(generate(PoissonLaw{1.0}, 0, 1), ValidationError);
}

TEST(Export, CsvAndJson)
{
    const auto s = generate(PeriodicLaw{0.5, 0.5}, 2, 0);
    std::ostringstream csv;
    write_schedule_csv(csv, s);
    EXPECT_EQ(csv.str(), "index,t\n1,0.5\n2,1\n");

    const auto poisson = generate(PoissonLaw{2.0}, 3, 5);
    const auto j = to_json(poisson);
    EXPECT_EQ(j.at("seed"), 5u);
    EXPECT_EQ(j.at("rng_id"), kRngId);
    EXPECT_EQ(j.at("times").get<std::vector<double>>(), poisson.times);
    EXPECT_EQ(j.at("law"), to_json(ScheduleLaw{PoissonLaw{2.0}}));
}

TEST(Export, LawJsonRoundTrip)
{
    for (const ScheduleLaw& law : std::vector<ScheduleLaw>{PoissonLaw{3.0}, PeriodicLaw{0.1, 0.2}, JitteredLaw{1.0, 1.0, 0.3}}) {
        EXPECT_EQ(to_json(schedule_law_from_json(to_json(law))), to_json(law));
    }
    EXPECT_THROW(schedule_law_from_json({{"kind", "bursty"}}), ValidationError);
}

TEST(Erlang, CdfMatchesClosedForm)
{
    for (double t : {0.1, 1.0, 3.7}) {
        EXPECT_NEAR(erlang_cdf(1, 2.0, t), 1.0 - std::exp(-2.0 * t), 1e-15);
        const double x = 2.0 * t;
        EXPECT_NEAR(erlang_cdf(3, 2.0, t), 1.0 - std::exp(-x) * (1.0 + x + x * x / 2.0), 1e-14);
    }
}

TEST(Erlang, KsWithinCriticalValue)
{
    const auto r = erlang_check(1.0, 1, 100000, 42);
    EXPECT_LT(r.ks_statistic, 0.006);
    EXPECT_NEAR(r.ks_critical_1pct, 1.63 / std::sqrt(100000.0), 1e-3 / std::sqrt(100000.0));
}

TEST(Erlang, MeanRatio)
{
    const auto r = erlang_check(2.0, 50, 10000, 42);
    EXPECT_GE(r.mean_ratio, 0.49);
    EXPECT_LE(r.mean_ratio, 0.51);
    EXPECT_NEAR(r.ratio_std_error, 1.0 / (2.0 * std::sqrt(50.0 * 10000.0)), 2e-5);
}

TEST(Erlang, RatioApproachesInverseRate)
{
    double previous_error = 1.0;
    for (int k : {10, 100, 1000}) {
        const auto r = erlang_check(1.0, k, 2000, 3);
        const double gap = std::abs(r.mean_ratio - 1.0);
        EXPECT_LT(gap, 4.0 * r.ratio_std_error);
        EXPECT_LT(r.ratio_std_error, previous_error);
        previous_error = r.ratio_std_error;
    }
}

TEST(Erlang, Preconditions)
{
    EXPECT_THROW(erlang_check(1.0, 0, 1000, 1), ValidationError);
    EXPECT_THROW(erlang_check(1.0, 1, 999, 1), ValidationError);
    EXPECT_THROW(erlang_check(0.0, 1, 1000, 1), ValidationError);
}
