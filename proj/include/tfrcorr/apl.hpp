#pragma once

// Estimation of the correlation-model parameters by maximizing the
// aggregation pseudo-likelihood: a product over periods and country pairs
// of bivariate standard normal likelihoods whose correlation is chosen by
// the pair's regime at the previous period.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "tfrcorr/correlation_model.hpp"
#include "tfrcorr/domain.hpp"
#include "tfrcorr/nelder_mead.hpp"
#include "tfrcorr/parallel.hpp"
#include "tfrcorr/phase_model.hpp"

namespace tfrcorr {

inline double bivariate_normal_loglik(double x, double y, double rho) {
  if (!(std::abs(rho) < 1.0)) throw DomainError("bivariate normal needs |rho| < 1");
  const double one_minus = 1.0 - rho * rho;
  return -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(one_minus) -
         (x * x - 2.0 * rho * x * y + y * y) / (2.0 * one_minus);
}

/// One (pair, period) contribution: both standardized errors, both
/// previous-period TFRs and the pair's covariate combination.
struct PairTerm {
  double x = 0.0;
  double y = 0.0;
  double prev_i = 0.0;
  double prev_j = 0.0;
  int combination = 0;
};

/// Terms ordered by period, then by pair in country order. Pairs with only
/// one defined error in a period contribute nothing.
inline std::vector<PairTerm> collect_pair_terms(const ErrorTable& errors, const TFRPanel& panel,
                                                const PairCovariateTable& pairs) {
  std::map<Period, std::vector<std::pair<const CountryId*, double>>> by_period;
  for (const auto& [c, series] : errors)
    for (const auto& [p, e] : series) by_period[p].emplace_back(&c, e);

  std::vector<PairTerm> terms;
  for (const auto& [p, members] : by_period) {
    const Period prev = panel.previous(p);
    std::vector<double> prev_tfr(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
      const Observation* o = panel.find(*members[i].first, prev);
      if (o == nullptr)
        throw MissingDataError("no previous-period TFR for " + members[i].first->code + " " +
                               std::to_string(p.start_year));
      prev_tfr[i] = o->tfr;
    }
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j)
        terms.push_back({members[i].second, members[j].second, prev_tfr[i], prev_tfr[j],
                         pairs.get(*members[i].first, *members[j].first).combination()});
  }
  return terms;
}

/// Log-APL for raw coefficients; -inf when either coefficient row implies a
/// correlation outside (-1, 1).
inline double apl_loglik(double kappa, const Betas& low, const Betas& high,
                         const std::vector<PairTerm>& terms) {
  if (!admissible(low) || !admissible(high)) return -std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (const auto& t : terms) {
    const Betas& b = regime_for(t.prev_i, t.prev_j, kappa) == Regime::low ? low : high;
    total += bivariate_normal_loglik(t.x, t.y,
                                     linear_correlation(b, PairCovariates::from_combination(t.combination)));
  }
  return total;
}

inline double apl_loglik(const CorrelationParams& params, const ErrorTable& errors,
                         const TFRPanel& panel, const PairCovariateTable& pairs) {
  return apl_loglik(params.kappa(), params.beta_low(), params.beta_high(),
                    collect_pair_terms(errors, panel, pairs));
}

/// Per-combination sufficient statistics of one regime at a fixed kappa.
struct RegimeStats {
  std::array<double, 8> count{};
  std::array<double, 8> sum_sq{};  // sum of x^2 + y^2
  std::array<double, 8> sum_xy{};
};

struct KappaStats {
  RegimeStats low;
  RegimeStats high;
};

inline KappaStats stats_for_kappa(const std::vector<PairTerm>& terms, double kappa) {
  KappaStats s;
  for (const auto& t : terms) {
    RegimeStats& r = regime_for(t.prev_i, t.prev_j, kappa) == Regime::low ? s.low : s.high;
    r.count[t.combination] += 1.0;
    r.sum_sq[t.combination] += t.x * t.x + t.y * t.y;
    r.sum_xy[t.combination] += t.x * t.y;
  }
  return s;
}

/// Log-APL restricted to one regime, from sufficient statistics.
inline double regime_loglik(const RegimeStats& s, const Betas& b) {
  if (!admissible(b)) return -std::numeric_limits<double>::infinity();
  const double log2pi = std::log(2.0 * std::numbers::pi);
  double total = 0.0;
  for (int k = 0; k < 8; ++k) {
    if (s.count[k] == 0.0) continue;
    const double rho = linear_correlation(b, PairCovariates::from_combination(k));
    const double one_minus = 1.0 - rho * rho;
    total += -s.count[k] * (log2pi + 0.5 * std::log(one_minus)) -
             (s.sum_sq[k] - 2.0 * rho * s.sum_xy[k]) / (2.0 * one_minus);
  }
  return total;
}

struct AplOptions {
  NelderMeadOptions optimizer;
  Betas init_low = CorrelationParams::defaults().beta_low();
  Betas init_high = CorrelationParams::defaults().beta_high();
  unsigned threads = 1;
};

struct KappaFit {
  double kappa = 0.0;
  Betas beta_low{};
  Betas beta_high{};
  double loglik = 0.0;
  NelderMeadResult low_run;
  NelderMeadResult high_run;

  bool converged() const noexcept { return low_run.converged && high_run.converged; }
};

/// The two regimes share no coefficients, so each is maximized on its own
/// four-vector and the optimum values add.
inline KappaFit maximize_apl_given_kappa(double kappa, const std::vector<PairTerm>& terms,
                                         const AplOptions& opt = {}) {
  if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
  const KappaStats stats = stats_for_kappa(terms, kappa);
  auto fit = [&](const RegimeStats& s, const Betas& init) {
    auto objective = [&s](std::span<const double> x) {
      return regime_loglik(s, Betas{x[0], x[1], x[2], x[3]});
    };
    return nelder_mead_maximize(objective, std::span<const double>(init), opt.optimizer);
  };
  KappaFit out;
  out.kappa = kappa;
  out.low_run = fit(stats.low, opt.init_low);
  out.high_run = fit(stats.high, opt.init_high);
  std::copy_n(out.low_run.x.begin(), 4, out.beta_low.begin());
  std::copy_n(out.high_run.x.begin(), 4, out.beta_high.begin());
  out.loglik = out.low_run.value + out.high_run.value;
  return out;
}

inline KappaFit maximize_apl_given_kappa(double kappa, const ErrorTable& errors,
                                         const TFRPanel& panel, const PairCovariateTable& pairs,
                                         const AplOptions& opt = {}) {
  return maximize_apl_given_kappa(kappa, collect_pair_terms(errors, panel, pairs), opt);
}

/// 0.5, 0.6, ..., 9.0 children per woman.
inline std::vector<double> default_kappa_grid() {
  std::vector<double> grid;
  for (int tenths = 5; tenths <= 90; ++tenths) grid.push_back(tenths / 10.0);
  return grid;
}

struct ProfilePoint {
  double kappa = 0.0;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct APLFit {
  CorrelationParams params = CorrelationParams::defaults();
  double loglik = 0.0;
  std::vector<ProfilePoint> kappa_profile;
};

/// Profile the maximized log-APL over `grid` and keep the argmax; ties go
/// to the smaller kappa.
inline APLFit kappa_grid_search(const std::vector<PairTerm>& terms, std::vector<double> grid,
                                const AplOptions& opt = {}) {
  if (grid.empty()) throw DomainError("kappa grid is empty");
  std::sort(grid.begin(), grid.end());
  std::vector<std::optional<KappaFit>> fits(grid.size());
  parallel_for(grid.size(), opt.threads,
               [&](std::size_t i) { fits[i] = maximize_apl_given_kappa(grid[i], terms, opt); });

  APLFit out;
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const KappaFit& f = *fits[i];
    out.kappa_profile.push_back({f.kappa, f.loglik, f.low_run.iterations + f.high_run.iterations,
                                 f.converged()});
    if (f.loglik > fits[best]->loglik) best = i;
  }
  const KappaFit& b = *fits[best];
  out.params = CorrelationParams(b.kappa, b.beta_low, b.beta_high);
  out.loglik = b.loglik;
  return out;
}

inline APLFit kappa_grid_search(const ErrorTable& errors, const TFRPanel& panel,
                                const PairCovariateTable& pairs,
                                std::vector<double> grid = default_kappa_grid(),
                                const AplOptions& opt = {}) {
  return kappa_grid_search(collect_pair_terms(errors, panel, pairs), std::move(grid), opt);
}

}  // namespace tfrcorr
