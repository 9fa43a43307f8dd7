#include <gtest/gtest.h>

#include <random>

#include "tfrcorr/empirical_correlation.hpp"

using namespace tfrcorr;

namespace {

std::pair<std::vector<double>, std::vector<double>> correlated(double rho, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = z(rng);
    y[i] = rho * x[i] + std::sqrt(1 - rho * rho) * z(rng);
  }
  return {x, y};
}

std::vector<double> negate(std::vector<double> v) {
  for (auto& x : v) x = -x;
  return v;
}

// Posterior mean by a fine midpoint rule directly in rho, with the prior
// singularity handled by the substitution rho = sin(u) on a uniform grid.
double midpoint_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  const int m = 400000;
  const double n = static_cast<double>(x.size());
  double sq = 0, xy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sq += x[i] * x[i] + y[i] * y[i];
    xy += x[i] * y[i];
  }
  auto ll = [&](double r) { return -0.5 * n * std::log(1 - r * r) - (sq - 2 * r * xy) / (2 * (1 - r * r)); };
  const double a = std::asin(1 - 1e-9);
  double top = -1e300;
  for (int k = 0; k < m; ++k) top = std::max(top, ll(std::sin(-a + (k + 0.5) * 2 * a / m)));
  double num = 0, den = 0;
  for (int k = 0; k < m; ++k) {
    double r = std::sin(-a + (k + 0.5) * 2 * a / m);
    double w = std::exp(ll(r) - top);
    num += r * w;
    den += w;
  }
  return num / den;
}

}  // namespace

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  for (std::size_t n : {1u, 2u, 5u, 20u, 201u}) {
    auto rule = gauss_legendre(n);
    for (std::size_t deg = 0; deg < 2 * n; deg += 1) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], double(deg));
      const double exact = deg % 2 == 1 ? 0.0 : 2.0 / (deg + 1.0);
      EXPECT_NEAR(s, exact, 1e-12) << "n=" << n << " deg=" << deg;
    }
  }
}

TEST(GaussLegendre, MirrorSymmetric) {
  auto rule = gauss_legendre(201);
  for (std::size_t i = 0; i < 201; ++i) {
    EXPECT_EQ(rule.nodes[i], -rule.nodes[200 - i]);
    EXPECT_EQ(rule.weights[i], rule.weights[200 - i]);
  }
  EXPECT_EQ(rule.nodes[100], 0.0);
}

TEST(ArcsinePosteriorMean, IdenticalSeriesNearOne) {
  auto [x, y] = correlated(0.0, 8, 4);
  const double est = arcsine_posterior_mean(x, x);
  EXPECT_GT(est, 0.9);
  EXPECT_LT(est, 1.0);
  EXPECT_NEAR(est, midpoint_oracle(x, x), 1e-6);
}

TEST(ArcsinePosteriorMean, MatchesIndependentQuadrature) {
  for (std::uint64_t seed : {1, 2, 3}) {
    for (int n : {2, 8, 15, 60}) {
      auto [x, y] = correlated(0.5, n, seed);
      EXPECT_NEAR(arcsine_posterior_mean(x, y), midpoint_oracle(x, y), 1e-7) << n;
    }
  }
}

TEST(ArcsinePosteriorMean, AntisymmetricExactly) {
  for (int n : {2, 8, 100, 5000}) {
    auto [x, y] = correlated(0.3, n, 9);
    EXPECT_EQ(arcsine_posterior_mean(x, negate(y)), -arcsine_posterior_mean(x, y));
  }
  auto [x, y] = correlated(0.0, 8, 10);
  EXPECT_EQ(arcsine_posterior_mean(x, negate(x)), -arcsine_posterior_mean(x, x));
}

TEST(ArcsinePosteriorMean, SwapSymmetricExactly) {
  for (int n : {3, 8, 100, 5000}) {
    auto [x, y] = correlated(-0.6, n, 12);
    EXPECT_EQ(arcsine_posterior_mean(x, y), arcsine_posterior_mean(y, x));
  }
}

TEST(ArcsinePosteriorMean, StrictlyInsideUnitInterval) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z(0.0, 3.0);
  for (int rep = 0; rep < 300; ++rep) {
    std::vector<double> x(2 + rep % 30), y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = z(rng);
      y[i] = rep % 3 == 0 ? x[i] : z(rng);
    }
    const double e = arcsine_posterior_mean(x, y);
    EXPECT_GT(e, -1.0);
    EXPECT_LT(e, 1.0);
  }
}

TEST(ArcsinePosteriorMean, RefinementStable) {
  for (int n : {2, 8, 12, 50, 300, 1000, 10000}) {
    for (double rho : {-0.8, 0.0, 0.4, 0.95}) {
      auto [x, y] = correlated(rho, n, 100 + n);
      EXPECT_LT(std::abs(arcsine_posterior_mean(x, y, 201) - arcsine_posterior_mean(x, y, 402)), 1e-6)
          << "n=" << n << " rho=" << rho;
    }
  }
}

TEST(ArcsinePosteriorMean, ConsistentAtLargeN) {
  auto [x, y] = correlated(0.4, 10000, 2024);
  EXPECT_NEAR(arcsine_posterior_mean(x, y), 0.4, 0.03);
}

TEST(ArcsinePosteriorMean, Errors) {
  std::vector<double> one{1.0}, two{1.0, 2.0}, three{1.0, 2.0, 3.0};
  EXPECT_THROW(arcsine_posterior_mean(one, one), InsufficientDataError);
  EXPECT_THROW(arcsine_posterior_mean(two, three), DimensionError);
  std::vector<double> bad{1.0, std::numeric_limits<double>::infinity()};
  EXPECT_THROW(arcsine_posterior_mean(two, bad), DomainError);
}

namespace {

void add_country(std::vector<PanelRecord>& recs, const std::string& c, int first_modeled, int last,
                 int first_observed = 1) {
  for (int t = first_observed; t <= last; ++t)
    recs.push_back({{c}, {1945 + 5 * t}, 5.0,
                    t < first_modeled ? Phase::pre_transition : Phase::transition});
}

}  // namespace

TEST(PairwiseErrorOverlap, FullHistories) {
  std::vector<PanelRecord> recs;
  add_country(recs, "A", 1, 12);
  add_country(recs, "B", 1, 12);
  // Period 1 has no predecessor, so 11 periods carry errors.
  EXPECT_EQ(pairwise_error_overlap(TFRPanel(recs)).at(CountryPair::of({"A"}, {"B"})), 11);
}

TEST(PairwiseErrorOverlap, DisjointWindows) {
  std::vector<PanelRecord> recs;
  add_country(recs, "A", 2, 5);
  add_country(recs, "B", 7, 11);
  EXPECT_EQ(pairwise_error_overlap(TFRPanel(recs)).at(CountryPair::of({"A"}, {"B"})), 0);
}

TEST(PairwiseErrorOverlap, StaggeredStarts) {
  std::vector<PanelRecord> recs;
  add_country(recs, "A", 3, 10);
  add_country(recs, "B", 6, 11);
  // Set intersection of {3..10} and {6..11}.
  int expected = 0;
  for (int t = 3; t <= 10; ++t) expected += (t >= 6 && t <= 11);
  EXPECT_EQ(expected, 5);
  EXPECT_EQ(pairwise_error_overlap(TFRPanel(recs)).at(CountryPair::of({"A"}, {"B"})), expected);
}
