#pragma once

// Joint trajectory projection. Each trajectory draws one posterior theta per
// country, then steps forward: the correlation matrix for the step is built
// from that trajectory's own previous TFRs, repaired if needed, and used to
// draw correlated standardized errors through its symmetric square root.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tfrcorr/correlation_model.hpp"
#include "tfrcorr/domain.hpp"
#include "tfrcorr/parallel.hpp"
#include "tfrcorr/phase_model.hpp"
#include "tfrcorr/psd_repair.hpp"
#include "tfrcorr/rng.hpp"

namespace tfrcorr {

enum class ErrorMode { independent, correlated };

inline std::string_view to_string(ErrorMode m) {
  return m == ErrorMode::independent ? "independent" : "correlated";
}

/// One draw from N(0, diag(sigma) R diag(sigma)). R must be PSD; it may be
/// singular.
inline Eigen::VectorXd sample_joint_errors(const Eigen::MatrixXd& r_hat,
                                           const Eigen::VectorXd& sigmas, Engine& rng) {
  if (r_hat.rows() != sigmas.size() || r_hat.cols() != sigmas.size())
    throw DimensionError("correlation matrix and sigma vector differ in size");
  const Eigen::MatrixXd root = symmetric_sqrt(r_hat);
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(sigmas.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  return sigmas.cwiseProduct(root * z);
}

inline Eigen::VectorXd sample_joint_errors(const CorrelationMatrix& r_hat,
                                           const Eigen::VectorXd& sigmas, Engine& rng) {
  return sample_joint_errors(r_hat.values, sigmas, rng);
}

/// Countries modeled at the launch period with their TFR and phase.
struct LaunchState {
  Period period;
  std::vector<CountryId> countries;
  std::vector<double> tfr;
  std::vector<Phase> phase;
};

/// Pre-transition countries are dropped with a warning, or rejected when
/// `strict` is set.
inline LaunchState launch_state(const TFRPanel& panel, Period launch, Warnings& warnings,
                                bool strict = false) {
  LaunchState s{launch, {}, {}, {}};
  for (const auto& c : panel.countries()) {
    const Observation* o = panel.find(c, launch);
    if (o == nullptr) continue;
    if (o->phase == Phase::pre_transition) {
      std::string msg = "country " + c.code + " is pre-transition at launch; excluded";
      if (strict) throw DomainError(msg);
      warnings.add(std::move(msg));
      continue;
    }
    s.countries.push_back(c);
    s.tfr.push_back(o->tfr);
    s.phase.push_back(o->phase);
  }
  if (s.countries.empty())
    throw MissingDataError("no modeled country has data at launch period " +
                           std::to_string(launch.start_year));
  return s;
}

/// Simulated TFR values indexed [trajectory][country][period]; period 0 is
/// the launch period.
class TrajectoryEnsemble {
 public:
  TrajectoryEnsemble() = default;
  TrajectoryEnsemble(std::vector<CountryId> countries, std::vector<Period> periods,
                     std::size_t trajectories, std::uint64_t seed)
      : countries_(std::move(countries)),
        periods_(std::move(periods)),
        trajectories_(trajectories),
        seed_(seed),
        values_(trajectories_ * countries_.size() * periods_.size(), 0.0) {}

  std::size_t trajectories() const noexcept { return trajectories_; }
  const std::vector<CountryId>& countries() const noexcept { return countries_; }
  const std::vector<Period>& periods() const noexcept { return periods_; }
  std::uint64_t seed() const noexcept { return seed_; }

  double at(std::size_t traj, std::size_t country, std::size_t period) const {
    return values_[index(traj, country, period)];
  }
  double& at(std::size_t traj, std::size_t country, std::size_t period) {
    return values_[index(traj, country, period)];
  }

  std::size_t country_index(const CountryId& c) const {
    auto it = std::find(countries_.begin(), countries_.end(), c);
    if (it == countries_.end()) throw MissingDataError("country not in ensemble: " + c.code);
    return static_cast<std::size_t>(it - countries_.begin());
  }

  /// All trajectories' values for one (country, period).
  std::vector<double> samples(std::size_t country, std::size_t period) const {
    std::vector<double> out(trajectories_);
    for (std::size_t t = 0; t < trajectories_; ++t) out[t] = at(t, country, period);
    return out;
  }

  const std::vector<double>& raw() const noexcept { return values_; }

 private:
  std::size_t index(std::size_t traj, std::size_t country, std::size_t period) const noexcept {
    return (traj * countries_.size() + country) * periods_.size() + period;
  }

  std::vector<CountryId> countries_;
  std::vector<Period> periods_;
  std::size_t trajectories_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> values_;
};

struct ProjectionOptions {
  int horizon = 0;
  std::size_t trajectories = 1000;
  std::uint64_t seed = 0;
  ErrorMode mode = ErrorMode::correlated;
  double tfr_floor = 0.5;
  // A transition path moves to post-transition once its TFR is below
  // post_entry_tfr and the expected decrement there is below
  // post_entry_decrement.
  double post_entry_tfr = 2.1;
  double post_entry_decrement = 0.01;
  PostTransitionConstants constants;
  int period_stride = 5;
  unsigned threads = 1;
};

namespace detail {

/// Symmetric square roots of repaired correlation matrices keyed by the
/// below-kappa flags. Values are pure functions of the key, so sharing the
/// cache across threads cannot affect results.
class RootCache {
 public:
  RootCache(const std::vector<CountryId>& countries, const PairCovariateTable& pairs,
            const CorrelationParams& params)
      : countries_(countries), pairs_(pairs), params_(params) {}

  std::shared_ptr<const Eigen::MatrixXd> get(const std::vector<bool>& below) {
    {
      std::lock_guard lock(mutex_);
      auto it = cache_.find(below);
      if (it != cache_.end()) return it->second;
    }
    auto r = repair(correlation_for_regimes(below, pairs_, params_, countries_));
    auto root = std::make_shared<const Eigen::MatrixXd>(symmetric_sqrt(r));
    std::lock_guard lock(mutex_);
    return cache_.emplace(below, std::move(root)).first->second;
  }

 private:
  const std::vector<CountryId>& countries_;
  const PairCovariateTable& pairs_;
  const CorrelationParams& params_;
  std::mutex mutex_;
  std::map<std::vector<bool>, std::shared_ptr<const Eigen::MatrixXd>> cache_;
};

}  // namespace detail

template <class Curve = DoubleLogisticDecline>
TrajectoryEnsemble project(const LaunchState& launch, const ThetaSamples& thetas,
                           const CorrelationParams& params, const PairCovariateTable& pairs,
                           const ProjectionOptions& opt, const Curve& curve = Curve{}) {
  if (opt.trajectories < 1) throw DomainError("need at least one trajectory");
  if (opt.horizon < 0) throw DomainError("horizon must be >= 0");
  const std::size_t n = launch.countries.size();
  const std::size_t n_periods = static_cast<std::size_t>(opt.horizon) + 1;
  for (Phase p : launch.phase)
    if (p == Phase::pre_transition) throw DomainError("pre-transition country in launch state");

  std::vector<const std::vector<DeclineTheta>*> draws(n);
  for (std::size_t c = 0; c < n; ++c) draws[c] = &thetas.at(launch.countries[c]);

  std::vector<Period> periods(n_periods);
  for (std::size_t p = 0; p < n_periods; ++p)
    periods[p] = Period{launch.period.start_year + static_cast<int>(p) * opt.period_stride};

  TrajectoryEnsemble ens(launch.countries, periods, opt.trajectories, opt.seed);
  const PhaseModel<Curve> model(opt.constants, curve);
  detail::RootCache roots(launch.countries, pairs, params);

  parallel_for(opt.trajectories, opt.threads, [&](std::size_t traj) {
    Engine rng = make_stream(opt.seed, traj);
    std::normal_distribution<double> normal;
    std::vector<const DeclineTheta*> theta(n);
    for (std::size_t c = 0; c < n; ++c) {
      std::uniform_int_distribution<std::size_t> pick(0, draws[c]->size() - 1);
      theta[c] = &(*draws[c])[pick(rng)];
    }
    std::vector<double> f = launch.tfr;
    std::vector<Phase> phase = launch.phase;
    std::vector<bool> below(n);
    Eigen::VectorXd z(static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < n; ++c) ens.at(traj, c, 0) = f[c];

    for (std::size_t p = 1; p < n_periods; ++p) {
      for (std::size_t c = 0; c < n; ++c) z(static_cast<Eigen::Index>(c)) = normal(rng);
      Eigen::VectorXd eps;
      if (opt.mode == ErrorMode::correlated && n > 1) {
        for (std::size_t c = 0; c < n; ++c) below[c] = f[c] < params.kappa();
        eps = *roots.get(below) * z;
      } else {
        eps = z;
      }
      for (std::size_t c = 0; c < n; ++c) {
        const double mean = model.conditional_mean(f[c], phase[c], *theta[c]);
        const double sd = model.conditional_sd(f[c], phase[c], *theta[c]);
        double next = std::max(opt.tfr_floor, mean + sd * eps(static_cast<Eigen::Index>(c)));
        if (phase[c] == Phase::transition && next < opt.post_entry_tfr &&
            model.decline(*theta[c], next) < opt.post_entry_decrement)
          phase[c] = Phase::post_transition;
        f[c] = next;
        ens.at(traj, c, p) = next;
      }
    }
  });
  return ens;
}

/// Regional weighted-average samples, indexed [period][trajectory].
struct RegionalSamples {
  std::string region;
  std::vector<Period> periods;
  std::vector<std::vector<double>> samples;
};

inline RegionalSamples regional_aggregate(const TrajectoryEnsemble& ens,
                                          const PopulationWeights& weights) {
  std::vector<std::pair<std::size_t, double>> idx;
  for (const auto& [c, w] : weights.entries()) {
    const auto& cs = ens.countries();
    auto it = std::find(cs.begin(), cs.end(), c);
    if (it == cs.end())
      throw MissingDataError("weight given for country absent from ensemble: " + c.code);
    idx.emplace_back(static_cast<std::size_t>(it - cs.begin()), w);
  }
  RegionalSamples out{weights.region(), ens.periods(), {}};
  out.samples.assign(ens.periods().size(), std::vector<double>(ens.trajectories(), 0.0));
  for (std::size_t p = 0; p < ens.periods().size(); ++p)
    for (std::size_t t = 0; t < ens.trajectories(); ++t) {
      double sum = 0.0;
      for (const auto& [c, w] : idx) sum += w * ens.at(t, c, p);
      out.samples[p][t] = sum;
    }
  return out;
}

/// Empirical quantile with linear interpolation between order statistics
/// (position (n - 1) p on the sorted sample).
inline double sorted_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InsufficientDataError("quantile of empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

inline Interval prediction_interval(std::vector<double> samples, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("interval level must lie in (0, 1)");
  if (samples.size() < 2) throw InsufficientDataError("need at least two samples");
  std::sort(samples.begin(), samples.end());
  const double tail = (1.0 - level) / 2.0;
  return {sorted_quantile(samples, tail), sorted_quantile(samples, 1.0 - tail)};
}

/// One row of an interval summary: (name, period, level, lo, median, hi).
struct IntervalRow {
  std::string name;
  Period period;
  double level = 0.0;
  double lo = 0.0;
  double median = 0.0;
  double hi = 0.0;
};

inline std::vector<IntervalRow> summarize(const std::string& name, Period period,
                                          std::vector<double> samples,
                                          const std::vector<double>& levels) {
  if (samples.size() < 2) throw InsufficientDataError("need at least two samples");
  std::sort(samples.begin(), samples.end());
  const double median = sorted_quantile(samples, 0.5);
  std::vector<IntervalRow> rows;
  for (double level : levels) {
    if (!(level > 0.0 && level < 1.0)) throw DomainError("interval level must lie in (0, 1)");
    const double tail = (1.0 - level) / 2.0;
    rows.push_back({name, period, level, sorted_quantile(samples, tail), median,
                    sorted_quantile(samples, 1.0 - tail)});
  }
  return rows;
}

inline std::vector<IntervalRow> summarize_countries(const TrajectoryEnsemble& ens,
                                                    const std::vector<double>& levels) {
  std::vector<IntervalRow> rows;
  for (std::size_t c = 0; c < ens.countries().size(); ++c)
    for (std::size_t p = 0; p < ens.periods().size(); ++p) {
      auto r = summarize(ens.countries()[c].code, ens.periods()[p], ens.samples(c, p), levels);
      rows.insert(rows.end(), r.begin(), r.end());
    }
  return rows;
}

inline std::vector<IntervalRow> summarize_region(const RegionalSamples& reg,
                                                 const std::vector<double>& levels) {
  std::vector<IntervalRow> rows;
  for (std::size_t p = 0; p < reg.periods.size(); ++p) {
    auto r = summarize(reg.region, reg.periods[p], reg.samples[p], levels);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  return rows;
}

}  // namespace tfrcorr
