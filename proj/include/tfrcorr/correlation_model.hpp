#pragma once

#include <cmath>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "tfrcorr/domain.hpp"

namespace tfrcorr {

/// Dense symmetric correlation matrix with an explicit country order.
struct CorrelationMatrix {
  std::vector<CountryId> countries;
  Eigen::MatrixXd values;

  std::size_t size() const noexcept { return countries.size(); }
};

/// Low iff both previous TFRs are strictly below kappa; ties go high.
inline Regime regime_for(double f_i, double f_j, double kappa) noexcept {
  return (f_i < kappa && f_j < kappa) ? Regime::low : Regime::high;
}

inline double pair_correlation(const PairCovariates& cov, Regime regime,
                               const CorrelationParams& params) {
  double rho = linear_correlation(params.betas(regime), cov);
  if (!(std::abs(rho) < 1.0)) throw InvalidParamsError("pair correlation outside (-1, 1)");
  return rho;
}

/// Correlation matrix given which countries sit below kappa. The matrix
/// depends on previous TFRs only through these flags.
inline Eigen::MatrixXd correlation_for_regimes(const std::vector<bool>& below_kappa,
                                               const PairCovariateTable& pairs,
                                               const CorrelationParams& params,
                                               const std::vector<CountryId>& countries) {
  if (below_kappa.size() != countries.size()) throw DimensionError("regime flags size mismatch");
  const auto n = static_cast<Eigen::Index>(countries.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      Regime r = (below_kappa[i] && below_kappa[j]) ? Regime::low : Regime::high;
      double rho = pair_correlation(pairs.get(countries[i], countries[j]), r, params);
      out(i, j) = rho;
      out(j, i) = rho;
    }
  }
  return out;
}

/// Model correlation matrix for `countries` given their previous-period
/// TFRs. The result is not necessarily positive semidefinite.
inline CorrelationMatrix build_correlation_matrix(const std::map<CountryId, double>& prev_tfrs,
                                                  const PairCovariateTable& pairs,
                                                  const CorrelationParams& params,
                                                  const std::vector<CountryId>& countries) {
  std::vector<bool> below(countries.size());
  for (std::size_t i = 0; i < countries.size(); ++i) {
    auto it = prev_tfrs.find(countries[i]);
    if (it == prev_tfrs.end())
      throw MissingDataError("no previous TFR for country " + countries[i].code);
    below[i] = it->second < params.kappa();
  }
  return {countries, correlation_for_regimes(below, pairs, params, countries)};
}

}  // namespace tfrcorr
