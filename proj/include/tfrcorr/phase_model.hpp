#pragma once

// Country-level evolution model: conditional mean and standard deviation of
// next-period TFR in the transition and post-transition phases, and the
// standardized one-period-ahead forecast errors built from them.

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "tfrcorr/domain.hpp"
#include "tfrcorr/parallel.hpp"

namespace tfrcorr {

/// Transition-phase standard deviation as a function of previous TFR:
/// either a constant or a piecewise-linear curve through fixed knots, held
/// flat outside the knot range.
struct SigmaSpec {
  enum class Kind { constant, piecewise_linear };

  static constexpr std::array<double, 4> knots{1.0, 2.5, 5.0, 9.0};

  Kind kind = Kind::constant;
  std::array<double, 4> values{0.3, 0.3, 0.3, 0.3};

  static SigmaSpec constant(double sigma) { return {Kind::constant, {sigma, sigma, sigma, sigma}}; }
  static SigmaSpec piecewise(const std::array<double, 4>& at_knots) {
    return {Kind::piecewise_linear, at_knots};
  }

  double operator()(double f) const noexcept {
    if (kind == Kind::constant) return values[0];
    if (f <= knots.front()) return values.front();
    if (f >= knots.back()) return values.back();
    std::size_t k = 1;
    while (f > knots[k]) ++k;
    double w = (f - knots[k - 1]) / (knots[k] - knots[k - 1]);
    return values[k - 1] + w * (values[k] - values[k - 1]);
  }

  bool valid() const noexcept {
    if (kind == Kind::constant) return values[0] > 0.0 && std::isfinite(values[0]);
    for (double v : values)
      if (!(v > 0.0) || !std::isfinite(v)) return false;
    return true;
  }
};

/// Decline pace d_c, four phase widths and the sigma specification.
struct DeclineTheta {
  double pace = 1.0;
  std::array<double, 4> widths{1.0, 1.0, 1.0, 1.0};
  SigmaSpec sigma;

  void validate() const {
    if (!(pace > 0.0) || !std::isfinite(pace)) throw DomainError("decline pace must be > 0");
    for (double w : widths)
      if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("phase widths must be > 0");
    if (!sigma.valid()) throw DomainError("sigma specification must be strictly positive");
  }
};

struct PostTransitionConstants {
  double target = 2.1;
  double ar_coef = 0.9;
  double s = 0.2;

  void validate() const {
    if (!(std::abs(ar_coef) < 1.0)) throw DomainError("|ar_coef| must be < 1");
    if (!(s > 0.0)) throw DomainError("post-transition s must be > 0");
  }
};

/// Posterior draws per country; every country carries the same number K.
class ThetaSamples {
 public:
  ThetaSamples() = default;

  explicit ThetaSamples(std::map<CountryId, std::vector<DeclineTheta>> draws)
      : draws_(std::move(draws)) {
    for (const auto& [c, v] : draws_) {
      if (v.empty()) throw DomainError("country " + c.code + " has no theta draws");
      if (k_ == 0) k_ = v.size();
      if (v.size() != k_)
        throw DomainError("country " + c.code + " has " + std::to_string(v.size()) +
                          " theta draws, expected " + std::to_string(k_));
      for (const auto& t : v) t.validate();
    }
  }

  std::size_t draws_per_country() const noexcept { return k_; }
  bool contains(const CountryId& c) const { return draws_.count(c) != 0; }

  const std::vector<DeclineTheta>& at(const CountryId& c) const {
    auto it = draws_.find(c);
    if (it == draws_.end()) throw MissingDataError("no theta draws for country " + c.code);
    return it->second;
  }

  const std::map<CountryId, std::vector<DeclineTheta>>& all() const noexcept { return draws_; }

 private:
  std::map<CountryId, std::vector<DeclineTheta>> draws_;
  std::size_t k_ = 0;
};

namespace detail {
inline double logistic(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}
}  // namespace detail

/// Double-logistic expected five-year decrement. The decline runs at pace
/// d_c between an upper logistic centred at D2+D3+D4+D1/2 and a lower one
/// centred at D4+D3/2, with 10%-90% transition widths D1 and D3.
struct DoubleLogisticDecline {
  double operator()(const DeclineTheta& theta, double f) const {
    if (!(f > 0.0) || !std::isfinite(f)) throw DomainError("decline: previous TFR must be > 0");
    const auto& w = theta.widths;
    const double ln81 = 2.0 * std::log(9.0);
    const double upper_mid = w[1] + w[2] + w[3] + 0.5 * w[0];
    const double lower_mid = w[3] + 0.5 * w[2];
    const double upper = detail::logistic(ln81 / w[0] * (f - upper_mid));
    const double lower = detail::logistic(ln81 / w[2] * (f - lower_mid));
    return std::max(0.0, theta.pace * (lower - upper));
  }
};

template <class Curve = DoubleLogisticDecline>
class PhaseModel {
 public:
  explicit PhaseModel(PostTransitionConstants consts = {}, Curve curve = {})
      : consts_(consts), curve_(std::move(curve)) {
    consts_.validate();
  }

  const PostTransitionConstants& constants() const noexcept { return consts_; }

  double decline(const DeclineTheta& theta, double f_prev) const { return curve_(theta, f_prev); }

  double conditional_mean(double f_prev, Phase phase, const DeclineTheta& theta) const {
    check(f_prev, phase);
    if (phase == Phase::post_transition)
      return consts_.target + consts_.ar_coef * (f_prev - consts_.target);
    return f_prev - decline(theta, f_prev);
  }

  double conditional_sd(double f_prev, Phase phase, const DeclineTheta& theta) const {
    check(f_prev, phase);
    if (phase == Phase::post_transition) return consts_.s;
    return theta.sigma(f_prev);
  }

  double standardized_error(double f_obs, double f_prev, Phase phase,
                            const DeclineTheta& theta) const {
    double sd = conditional_sd(f_prev, phase, theta);
    if (!(sd > 0.0)) throw DomainError("conditional sd must be > 0");
    return (f_obs - conditional_mean(f_prev, phase, theta)) / sd;
  }

 private:
  static void check(double f_prev, Phase phase) {
    if (phase == Phase::pre_transition)
      throw UnsupportedPhaseError("TFR is not modeled before the fertility transition");
    if (!(f_prev > 0.0) || !std::isfinite(f_prev))
      throw DomainError("previous TFR must be > 0");
  }

  PostTransitionConstants consts_;
  Curve curve_;
};

inline double decline(const DeclineTheta& theta, double f_prev) {
  return DoubleLogisticDecline{}(theta, f_prev);
}

inline double conditional_mean(double f_prev, Phase phase, const DeclineTheta& theta,
                               const PostTransitionConstants& consts = {}) {
  return PhaseModel<>(consts).conditional_mean(f_prev, phase, theta);
}

inline double conditional_sd(double f_prev, Phase phase, const DeclineTheta& theta,
                             const PostTransitionConstants& consts = {}) {
  return PhaseModel<>(consts).conditional_sd(f_prev, phase, theta);
}

inline double standardized_error(double f_obs, double f_prev, Phase phase,
                                 const DeclineTheta& theta,
                                 const PostTransitionConstants& consts = {}) {
  return PhaseModel<>(consts).standardized_error(f_obs, f_prev, phase, theta);
}

/// Mean standardized error per (country, period).
using ErrorTable = std::map<CountryId, std::map<Period, double>>;

inline const double* find_error(const ErrorTable& errors, const CountryId& c, Period p) {
  auto it = errors.find(c);
  if (it == errors.end()) return nullptr;
  auto jt = it->second.find(p);
  return jt == it->second.end() ? nullptr : &jt->second;
}

/// Periods of `c` that carry a forecast error: the period is in a modeled
/// phase and the previous period was observed.
inline std::vector<Period> error_periods(const TFRPanel& panel, const CountryId& c) {
  std::vector<Period> out;
  for (const auto& [p, obs] : panel.series(c)) {
    if (!is_modeled(obs.phase)) continue;
    if (panel.find(c, panel.previous(p)) == nullptr) continue;
    out.push_back(p);
  }
  return out;
}

/// Average over the K posterior draws of the parameter-specific
/// standardized errors. Countries are processed in parallel; each (c, t)
/// sum runs in draw order so the result is bit-reproducible.
template <class Curve = DoubleLogisticDecline>
ErrorTable mean_standardized_errors(const TFRPanel& panel, const ThetaSamples& thetas,
                                    const PhaseModel<Curve>& model = PhaseModel<Curve>{},
                                    unsigned threads = 1) {
  const auto& countries = panel.countries();
  std::vector<std::map<Period, double>> per_country(countries.size());
  parallel_for(countries.size(), threads, [&](std::size_t ci) {
    const auto& c = countries[ci];
    auto periods = error_periods(panel, c);
    if (periods.empty()) return;
    const auto& draws = thetas.at(c);
    for (Period p : periods) {
      const auto& obs = *panel.find(c, p);
      const double f_prev = panel.find(c, panel.previous(p))->tfr;
      double sum = 0.0;
      for (const auto& theta : draws) sum += model.standardized_error(obs.tfr, f_prev, obs.phase, theta);
      per_country[ci].emplace(p, sum / static_cast<double>(draws.size()));
    }
  });
  ErrorTable out;
  for (std::size_t ci = 0; ci < countries.size(); ++ci)
    if (!per_country[ci].empty()) out.emplace(countries[ci], std::move(per_country[ci]));
  return out;
}

}  // namespace tfrcorr
