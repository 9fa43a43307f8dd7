#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <vector>

#include "tfrcorr/domain.hpp"
#include "tfrcorr/phase_model.hpp"

namespace tfrcorr {

struct QuadratureRule {
  std::vector<double> nodes;  // ascending, symmetric about 0
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1]. Roots of P_n by Newton iteration
/// from the usual Chebyshev-like starting points; the rule is built
/// symmetric by mirroring the positive half.
inline QuadratureRule gauss_legendre(std::size_t n) {
  if (n == 0) throw DomainError("quadrature needs at least one node");
  QuadratureRule rule{std::vector<double>(n), std::vector<double>(n)};
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Final derivative at the converged root.
    {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    }
    const bool middle = (n % 2 == 1) && (i == half - 1);
    if (middle) x = 0.0;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = w;
    rule.nodes[i] = -x;
    rule.weights[i] = w;
  }
  return rule;
}

inline constexpr std::size_t default_arcsine_nodes = 201;

/// Posterior mean of the correlation of standardized error pairs under the
/// arc-sine prior 1/(pi sqrt(1 - rho^2)). With rho = sin(u) the prior is
/// uniform in u, so the integral is a plain Gauss-Legendre sum in u.
///
/// For large samples the posterior is narrower than the node spacing on the
/// full range, so a second pass integrates over a window of about
/// 12/sqrt(n) around the first-pass mean of u. Mirror nodes are accumulated
/// together, which makes the estimate exactly odd in the sign of ys and
/// exactly symmetric in (xs, ys).
inline double arcsine_posterior_mean(std::span<const double> xs, std::span<const double> ys,
                                     std::size_t nodes = default_arcsine_nodes) {
  if (xs.size() != ys.size()) throw DimensionError("xs and ys differ in length");
  if (xs.size() < 2) throw InsufficientDataError("need at least two error pairs");
  if (nodes < 2) throw DomainError("quadrature needs at least two nodes");
  double sum_sq = 0.0, sum_xy = 0.0;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    if (!std::isfinite(xs[t]) || !std::isfinite(ys[t]))
      throw DomainError("non-finite standardized error");
    sum_sq += xs[t] * xs[t] + ys[t] * ys[t];
    sum_xy += xs[t] * ys[t];
  }
  const double n = static_cast<double>(xs.size());
  auto loglik = [&](double rho) {
    const double one_minus = 1.0 - rho * rho;
    return -0.5 * n * std::log(one_minus) - (sum_sq - 2.0 * rho * sum_xy) / (2.0 * one_minus);
  };

  const QuadratureRule rule = gauss_legendre(nodes);
  const std::size_t half = nodes / 2;
  const bool has_middle = nodes % 2 == 1;

  struct Moments {
    double rho;
    double u;
  };
  // Posterior means of rho and u from the rule mapped onto [lo, hi].
  auto moments = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
    std::vector<double> u_hi(half), u_lo(half), ll_hi(half), ll_lo(half);
    double shift = has_middle ? loglik(std::sin(mid)) : -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < half; ++k) {
      const double t = rule.nodes[nodes - 1 - k];
      u_hi[k] = mid + hw * t;
      u_lo[k] = mid - hw * t;
      ll_hi[k] = loglik(std::sin(u_hi[k]));
      ll_lo[k] = loglik(std::sin(u_lo[k]));
      shift = std::max({shift, ll_hi[k], ll_lo[k]});
    }
    double num_rho = 0.0, num_u = 0.0, den = 0.0;
    if (has_middle) {
      const double a = rule.weights[half] * std::exp(loglik(std::sin(mid)) - shift);
      num_rho += a * std::sin(mid);
      num_u += a * mid;
      den += a;
    }
    for (std::size_t k = 0; k < half; ++k) {
      const double w = rule.weights[nodes - 1 - k];
      const double a = std::exp(ll_hi[k] - shift);
      const double b = std::exp(ll_lo[k] - shift);
      num_rho += w * (std::sin(u_hi[k]) * a + std::sin(u_lo[k]) * b);
      num_u += w * (u_hi[k] * a + u_lo[k] * b);
      den += w * (a + b);
    }
    return Moments{num_rho / den, num_u / den};
  };

  const double u_max = std::asin(1.0 - 1e-9);
  const Moments coarse = moments(-u_max, u_max);
  const double reach = 12.0 / std::sqrt(n) + 0.1;
  if (reach >= u_max) return coarse.rho;
  return moments(std::max(-u_max, coarse.u - reach), std::min(u_max, coarse.u + reach)).rho;
}

/// Number of periods in which both countries of each pair have a
/// standardized error defined.
inline std::map<CountryPair, int> pairwise_error_overlap(const TFRPanel& panel) {
  const auto& countries = panel.countries();
  std::vector<std::vector<Period>> defined(countries.size());
  for (std::size_t i = 0; i < countries.size(); ++i) defined[i] = error_periods(panel, countries[i]);
  std::map<CountryPair, int> out;
  for (std::size_t i = 0; i < countries.size(); ++i) {
    for (std::size_t j = i + 1; j < countries.size(); ++j) {
      int count = 0;
      auto a = defined[i].begin(), b = defined[j].begin();
      while (a != defined[i].end() && b != defined[j].end()) {
        if (*a < *b) {
          ++a;
        } else if (*b < *a) {
          ++b;
        } else {
          ++count;
          ++a;
          ++b;
        }
      }
      out.emplace(CountryPair::of(countries[i], countries[j]), count);
    }
  }
  return out;
}

}  // namespace tfrcorr
