#pragma once

// Interval coverage scoring and the steady-state variance factors of a
// regional weighted average: IF = sum p_i^2 (independent errors) and
// DF = sum p_i^2 + 2 sum_{i<j} p_i p_j R[i,j] (correlated errors).

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "tfrcorr/correlation_model.hpp"
#include "tfrcorr/domain.hpp"
#include "tfrcorr/psd_repair.hpp"

namespace tfrcorr {

struct RegionPeriod {
  std::string region;
  Period period;
  auto operator<=>(const RegionPeriod&) const = default;
  bool operator==(const RegionPeriod&) const = default;
};

struct IntervalKey {
  std::string region;
  Period period;
  double level = 0.0;
  auto operator<=>(const IntervalKey&) const = default;
  bool operator==(const IntervalKey&) const = default;
};

struct CoverageCell {
  int inside = 0;
  int total = 0;
  double proportion() const noexcept { return total == 0 ? 0.0 : double(inside) / total; }
};

struct CoverageTable {
  std::vector<double> levels;
  std::map<double, CoverageCell> overall;
  std::map<Period, std::map<double, CoverageCell>> by_period;
};

inline CoverageTable coverage(const std::map<RegionPeriod, double>& observed,
                              const std::map<IntervalKey, std::pair<double, double>>& intervals,
                              const std::vector<double>& levels) {
  CoverageTable out;
  out.levels = levels;
  for (const auto& [key, v] : observed) {
    for (double level : levels) {
      auto it = intervals.find({key.region, key.period, level});
      if (it == intervals.end())
        throw MissingDataError("no " + std::to_string(level) + " interval for " + key.region +
                               " " + std::to_string(key.period.start_year));
      const bool inside = it->second.first <= v && v <= it->second.second;
      auto& cell = out.overall[level];
      auto& pcell = out.by_period[key.period][level];
      cell.total += 1;
      pcell.total += 1;
      cell.inside += inside;
      pcell.inside += inside;
    }
  }
  return out;
}

inline Eigen::VectorXd weight_vector(const PopulationWeights& w) {
  Eigen::VectorXd p(static_cast<Eigen::Index>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) p(static_cast<Eigen::Index>(i)) = w.entries()[i].second;
  return p;
}

inline double independence_factor(const PopulationWeights& w) {
  double s = 0.0;
  for (const auto& [c, p] : w.entries()) s += p * p;
  return s;
}

/// `r` must list the countries in the same order as the weights.
inline double dependence_factor(const PopulationWeights& w, const Eigen::MatrixXd& r) {
  const auto n = static_cast<Eigen::Index>(w.size());
  if (r.rows() != n || r.cols() != n) throw DimensionError("correlation matrix does not match weights");
  const auto& e = w.entries();
  double diag = 0.0, cross = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    diag += e[i].second * e[i].second;
    for (Eigen::Index j = i + 1; j < n; ++j) cross += e[i].second * e[j].second * r(i, j);
  }
  return diag + 2.0 * cross;
}

inline double dependence_factor(const PopulationWeights& w, const CorrelationMatrix& r) {
  if (r.countries != w.countries()) throw DimensionError("correlation matrix country order differs from weights");
  return dependence_factor(w, r.values);
}

inline double df_if_ratio(const PopulationWeights& w, const Eigen::MatrixXd& r) {
  return dependence_factor(w, r) / independence_factor(w);
}

struct VarianceRow {
  std::string region;
  double df_if = 1.0;
  double max_proportion = 1.0;
  std::size_t n = 0;
  bool repaired = false;
};

/// Steady-state (all countries post-transition, low regime) DF/IF per region.
inline std::vector<VarianceRow> variance_report(const std::vector<PopulationWeights>& regions,
                                                const PairCovariateTable& pairs,
                                                const CorrelationParams& params) {
  std::vector<VarianceRow> rows;
  for (const auto& w : regions) {
    const auto countries = w.countries();
    Eigen::MatrixXd r =
        correlation_for_regimes(std::vector<bool>(countries.size(), true), pairs, params, countries);
    RepairReport rep;
    r = repair(r, &rep);
    rows.push_back({w.region(), df_if_ratio(w, r), w.max_proportion(), w.size(), rep.repaired});
  }
  return rows;
}

}  // namespace tfrcorr
