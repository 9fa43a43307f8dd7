#pragma once

// Core value types shared by every module: country and period keys, the
// TFR panel, pairwise covariates, correlation-model parameters and regional
// population weights. Everything here is immutable once constructed.

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tfrcorr/errors.hpp"

namespace tfrcorr {

struct CountryId {
  std::string code;

  auto operator<=>(const CountryId&) const = default;
  bool operator==(const CountryId&) const = default;
};

/// Start year of a (by default five-year) period.
struct Period {
  int start_year = 0;

  auto operator<=>(const Period&) const = default;
  bool operator==(const Period&) const = default;
};

enum class Phase { pre_transition, transition, post_transition };

inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::pre_transition:
      return "pre_transition";
    case Phase::transition:
      return "transition";
    case Phase::post_transition:
      return "post_transition";
  }
  return "?";
}

inline std::optional<Phase> parse_phase(std::string_view s) {
  if (s == "pre_transition") return Phase::pre_transition;
  if (s == "transition") return Phase::transition;
  if (s == "post_transition") return Phase::post_transition;
  return std::nullopt;
}

inline bool is_modeled(Phase p) { return p != Phase::pre_transition; }

// ---------------------------------------------------------------------------
// TFR panel

struct Observation {
  double tfr = 0.0;
  Phase phase = Phase::transition;
};

struct PanelRecord {
  CountryId country;
  Period period;
  double tfr = 0.0;
  Phase phase = Phase::transition;
};

class TFRPanel {
 public:
  using Series = std::map<Period, Observation>;

  TFRPanel() = default;

  /// Duplicate (country, period) keys are rejected; everything else is left
  /// for validate_panel to report.
  explicit TFRPanel(const std::vector<PanelRecord>& records, int stride = 5)
      : stride_(stride) {
    if (stride <= 0) throw DomainError("period stride must be positive");
    for (const auto& r : records) {
      auto [it, inserted] = data_[r.country].emplace(r.period, Observation{r.tfr, r.phase});
      if (!inserted) {
        throw DomainError("duplicate panel entry for " + r.country.code + " " +
                          std::to_string(r.period.start_year));
      }
    }
    countries_.reserve(data_.size());
    for (const auto& [c, s] : data_) countries_.push_back(c);
  }

  int stride() const noexcept { return stride_; }
  Period previous(Period p) const noexcept { return Period{p.start_year - stride_}; }
  Period next(Period p) const noexcept { return Period{p.start_year + stride_}; }

  /// Countries in ascending code order.
  const std::vector<CountryId>& countries() const noexcept { return countries_; }

  /// Sorted union of all periods present for any country.
  std::vector<Period> periods() const {
    std::vector<Period> out;
    for (const auto& [c, s] : data_)
      for (const auto& [p, o] : s) out.push_back(p);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  const Observation* find(const CountryId& c, Period p) const {
    auto it = data_.find(c);
    if (it == data_.end()) return nullptr;
    auto jt = it->second.find(p);
    return jt == it->second.end() ? nullptr : &jt->second;
  }

  const Series& series(const CountryId& c) const {
    auto it = data_.find(c);
    if (it == data_.end()) throw MissingDataError("country not in panel: " + c.code);
    return it->second;
  }

  bool contains(const CountryId& c) const { return data_.count(c) != 0; }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& [c, s] : data_) n += s.size();
    return n;
  }

  std::vector<PanelRecord> records() const {
    std::vector<PanelRecord> out;
    out.reserve(size());
    for (const auto& [c, s] : data_)
      for (const auto& [p, o] : s) out.push_back({c, p, o.tfr, o.phase});
    return out;
  }

 private:
  int stride_ = 5;
  std::map<CountryId, Series> data_;
  std::vector<CountryId> countries_;
};

struct PanelDiagnostic {
  CountryId country;
  std::optional<Period> period;
  std::string rule;
};

/// Checks every panel invariant and returns one diagnostic per violation.
inline std::vector<PanelDiagnostic> validate_panel(const TFRPanel& panel) {
  std::vector<PanelDiagnostic> out;
  for (const auto& c : panel.countries()) {
    if (c.code.empty()) out.push_back({c, std::nullopt, "country code non-empty violated"});
    const auto& series = panel.series(c);
    std::optional<Period> last;
    std::optional<Phase> last_phase;
    for (const auto& [p, obs] : series) {
      if (!std::isfinite(obs.tfr)) {
        out.push_back({c, p, "tfr finite violated"});
      } else if (obs.tfr <= 0.0) {
        out.push_back({c, p, "tfr > 0 violated"});
      }
      if (p.start_year % panel.stride() != 0) {
        out.push_back({c, p, "period alignment violated"});
      }
      if (last && p.start_year - last->start_year != panel.stride()) {
        out.push_back({c, p, "periods consecutive violated"});
      }
      if (last_phase && static_cast<int>(obs.phase) < static_cast<int>(*last_phase)) {
        out.push_back({c, p, "phase order violated"});
      }
      last = p;
      last_phase = obs.phase;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pairwise covariates

struct PairCovariates {
  bool contig = false;
  bool comcol = false;
  bool same_region = false;

  /// Index in [0, 8) of this covariate combination.
  int combination() const noexcept {
    return int(contig) + 2 * int(comcol) + 4 * int(same_region);
  }
  static PairCovariates from_combination(int k) noexcept {
    return {(k & 1) != 0, (k & 2) != 0, (k & 4) != 0};
  }
  bool operator==(const PairCovariates&) const = default;
};

/// Unordered country pair, stored with the smaller code first.
struct CountryPair {
  CountryId first;
  CountryId second;

  static CountryPair of(const CountryId& a, const CountryId& b) {
    return a < b ? CountryPair{a, b} : CountryPair{b, a};
  }
  auto operator<=>(const CountryPair&) const = default;
  bool operator==(const CountryPair&) const = default;
};

struct PairCovariateRecord {
  CountryId a;
  CountryId b;
  PairCovariates cov;
};

class PairCovariateTable {
 public:
  PairCovariateTable() = default;

  explicit PairCovariateTable(const std::vector<PairCovariateRecord>& records) {
    for (const auto& r : records) {
      if (r.a == r.b) throw DomainError("covariate row pairs a country with itself: " + r.a.code);
      auto [it, inserted] = table_.emplace(CountryPair::of(r.a, r.b), r.cov);
      if (!inserted) {
        throw DomainError("duplicate covariate row for " + r.a.code + "/" + r.b.code);
      }
    }
  }

  std::optional<PairCovariates> find(const CountryId& a, const CountryId& b) const {
    auto it = table_.find(CountryPair::of(a, b));
    if (it == table_.end()) return std::nullopt;
    return it->second;
  }

  /// Missing pairs fall back to (0,0,0), the intercept-only correlation.
  PairCovariates get(const CountryId& a, const CountryId& b) const {
    return find(a, b).value_or(PairCovariates{});
  }

  /// Pairs of `countries` without a covariate row.
  std::vector<CountryPair> missing_pairs(const std::vector<CountryId>& countries) const {
    std::vector<CountryPair> out;
    for (std::size_t i = 0; i < countries.size(); ++i)
      for (std::size_t j = i + 1; j < countries.size(); ++j)
        if (!find(countries[i], countries[j])) out.push_back(CountryPair::of(countries[i], countries[j]));
    return out;
  }

  /// Adds a single warning summarizing the pairs that default to (0,0,0).
  void report_missing(const std::vector<CountryId>& countries, Warnings& warnings) const {
    auto missing = missing_pairs(countries);
    if (missing.empty()) return;
    std::string msg = std::to_string(missing.size()) +
                      " country pair(s) have no covariate row; using (0,0,0) for:";
    for (std::size_t k = 0; k < missing.size() && k < 5; ++k)
      msg += " " + missing[k].first.code + "/" + missing[k].second.code;
    if (missing.size() > 5) msg += " ...";
    warnings.add(std::move(msg));
  }

  const std::map<CountryPair, PairCovariates>& entries() const noexcept { return table_; }
  std::size_t size() const noexcept { return table_.size(); }

 private:
  std::map<CountryPair, PairCovariates> table_;
};

// ---------------------------------------------------------------------------
// Correlation-model parameters

enum class Regime { low, high };

inline std::string_view to_string(Regime r) { return r == Regime::low ? "low" : "high"; }

/// Intercept, contig, comcol, sameRegion coefficients.
using Betas = std::array<double, 4>;

/// Linear predictor of the pair correlation for one regime.
inline double linear_correlation(const Betas& b, const PairCovariates& cov) noexcept {
  double rho = b[0];
  if (cov.contig) rho += b[1];
  if (cov.comcol) rho += b[2];
  if (cov.same_region) rho += b[3];
  return rho;
}

/// True when every covariate combination yields a correlation in (-1, 1).
inline bool admissible(const Betas& b) noexcept {
  for (int k = 0; k < 8; ++k) {
    double rho = linear_correlation(b, PairCovariates::from_combination(k));
    if (!(std::abs(rho) < 1.0)) return false;
  }
  return true;
}

class CorrelationParams {
 public:
  CorrelationParams(double kappa, const Betas& beta_low, const Betas& beta_high)
      : kappa_(kappa), low_(beta_low), high_(beta_high) {
    if (!(kappa > 0.0) || !std::isfinite(kappa))
      throw InvalidParamsError("kappa must be positive and finite");
    if (!admissible(low_)) throw InvalidParamsError("low-regime betas imply |rho| >= 1");
    if (!admissible(high_)) throw InvalidParamsError("high-regime betas imply |rho| >= 1");
  }

  /// Published estimates: kappa = 5 and the two coefficient rows.
  static CorrelationParams defaults() {
    return CorrelationParams(5.0, {0.11, 0.26, 0.05, 0.09}, {0.05, 0.06, 0.00, 0.02});
  }

  double kappa() const noexcept { return kappa_; }
  const Betas& beta_low() const noexcept { return low_; }
  const Betas& beta_high() const noexcept { return high_; }
  const Betas& betas(Regime r) const noexcept { return r == Regime::low ? low_ : high_; }

 private:
  double kappa_;
  Betas low_;
  Betas high_;
};

// ---------------------------------------------------------------------------
// Population weights

class PopulationWeights {
 public:
  using Entry = std::pair<CountryId, double>;

  /// Renormalizes to sum one. Warns when the raw sum is off by more than 1e-6.
  PopulationWeights(std::string region, std::vector<Entry> raw, Warnings* warnings = nullptr)
      : region_(std::move(region)), entries_(std::move(raw)) {
    if (entries_.empty()) throw DomainError("region " + region_ + " has no countries");
    double sum = 0.0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& [c, w] = entries_[i];
      if (!std::isfinite(w) || w < 0.0)
        throw DomainError("weight for " + c.code + " in region " + region_ + " must be >= 0");
      for (std::size_t j = 0; j < i; ++j)
        if (entries_[j].first == c)
          throw DomainError("duplicate weight for " + c.code + " in region " + region_);
      sum += w;
    }
    if (!(sum > 0.0)) throw DomainError("weights for region " + region_ + " sum to zero");
    if (warnings && std::abs(sum - 1.0) > 1e-6)
      warnings->add("weights for region " + region_ + " sum to " + std::to_string(sum) +
                    "; renormalized");
    // Sums within rounding of one are kept as given so files round-trip.
    if (std::abs(sum - 1.0) > 1e-12)
      for (auto& e : entries_) e.second /= sum;
  }

  const std::string& region() const noexcept { return region_; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  std::vector<CountryId> countries() const {
    std::vector<CountryId> out;
    for (const auto& e : entries_) out.push_back(e.first);
    return out;
  }

  double max_proportion() const {
    double m = 0.0;
    for (const auto& e : entries_) m = std::max(m, e.second);
    return m;
  }

 private:
  std::string region_;
  std::vector<Entry> entries_;
};

}  // namespace tfrcorr
