#pragma once

// Synthetic worlds for recovery and calibration tests. The generator builds
// its own correlation matrices and square roots so that it does not share
// code paths with the library under test.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tfrcorr/domain.hpp"
#include "tfrcorr/phase_model.hpp"

namespace synth {

using namespace tfrcorr;

struct World {
  std::vector<CountryId> countries;
  std::vector<PairCovariateRecord> covariate_rows;
  std::vector<std::string> region;  // per country
  std::vector<DeclineTheta> theta;  // one draw per country
  std::vector<double> launch_tfr;
  std::vector<Phase> launch_phase;

  PairCovariateTable pairs() const { return PairCovariateTable(covariate_rows); }

  ThetaSamples thetas() const {
    std::map<CountryId, std::vector<DeclineTheta>> m;
    for (std::size_t i = 0; i < countries.size(); ++i) m[countries[i]] = {theta[i]};
    return ThetaSamples(m);
  }
};

inline std::string code(std::size_t i) {
  std::string s = "C00";
  s[1] = static_cast<char>('0' + (i / 10) % 10);
  s[2] = static_cast<char>('0' + i % 10);
  return s;
}

/// rows x cols lattice. Contiguity is king-move adjacency, regions are
/// blocks of two columns, common-colonizer groups run along anti-diagonals
/// so they cut across regions. Launch TFRs are spread over [3, 8] in an
/// order unrelated to position.
inline World grid_world(int rows = 5, int cols = 8) {
  World w;
  const int n = rows * cols;
  for (int i = 0; i < n; ++i) {
    w.countries.push_back({code(static_cast<std::size_t>(i))});
    w.region.push_back("R" + std::to_string((i % cols) / 2));
  }
  auto colonizer = [&](int i) { return (i / cols + i % cols) % 5; };  // 0 means none
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const int dr = std::abs(i / cols - j / cols), dc = std::abs(i % cols - j % cols);
      PairCovariates c;
      c.contig = dr <= 1 && dc <= 1;
      c.comcol = colonizer(i) != 0 && colonizer(i) == colonizer(j);
      c.same_region = w.region[static_cast<std::size_t>(i)] == w.region[static_cast<std::size_t>(j)];
      w.covariate_rows.push_back({w.countries[static_cast<std::size_t>(i)],
                                  w.countries[static_cast<std::size_t>(j)], c});
    }
  for (int i = 0; i < n; ++i) {
    DeclineTheta t;
    t.pace = 0.45;
    t.widths = {2.5, 2.0, 2.0, 1.2};
    t.sigma = SigmaSpec::constant(0.25);
    w.theta.push_back(t);
    w.launch_tfr.push_back(3.0 + 5.0 * ((7 * i) % n) / (n - 1.0));
    w.launch_phase.push_back(Phase::transition);
  }
  return w;
}

/// Correlation matrix of the linear model, written out pair by pair.
inline Eigen::MatrixXd model_matrix(const World& w, const std::vector<double>& prev,
                                    const CorrelationParams& params) {
  const auto n = static_cast<Eigen::Index>(w.countries.size());
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(n, n);
  for (const auto& row : w.covariate_rows) {
    Eigen::Index i = 0, j = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (w.countries[static_cast<std::size_t>(k)] == row.a) i = k;
      if (w.countries[static_cast<std::size_t>(k)] == row.b) j = k;
    }
    const bool low = prev[static_cast<std::size_t>(i)] < params.kappa() &&
                     prev[static_cast<std::size_t>(j)] < params.kappa();
    const auto& b = low ? params.beta_low() : params.beta_high();
    const double rho = b[0] + b[1] * row.cov.contig + b[2] * row.cov.comcol + b[3] * row.cov.same_region;
    r(i, j) = r(j, i) = rho;
  }
  return r;
}

/// Square root of the clipped-and-rescaled matrix.
inline Eigen::MatrixXd root_of(const Eigen::MatrixXd& r) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r);
  Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd s = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
  Eigen::VectorXd inv = s.diagonal().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd c = inv.asDiagonal() * s * inv.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(c);
  Eigen::VectorXd d2 = es2.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es2.eigenvectors() * d2.asDiagonal() * es2.eigenvectors().transpose();
}

/// Panel of `steps` + 1 periods starting at `start`, simulated from the
/// full model with the world's single theta draw per country.
inline TFRPanel simulate_panel(const World& w, const CorrelationParams& params, int steps,
                               std::uint64_t seed, int start = 1950) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const std::size_t n = w.countries.size();
  std::vector<double> f = w.launch_tfr;
  std::vector<Phase> ph = w.launch_phase;
  std::vector<PanelRecord> recs;
  for (std::size_t c = 0; c < n; ++c) recs.push_back({w.countries[c], {start}, f[c], ph[c]});
  const PostTransitionConstants k;
  for (int t = 1; t <= steps; ++t) {
    Eigen::MatrixXd root = root_of(model_matrix(w, f, params));
    Eigen::VectorXd z(static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < n; ++c) z(static_cast<Eigen::Index>(c)) = normal(rng);
    Eigen::VectorXd eps = root * z;
    for (std::size_t c = 0; c < n; ++c) {
      const DeclineTheta& th = w.theta[c];
      double mean, sd;
      if (ph[c] == Phase::post_transition) {
        mean = k.target + k.ar_coef * (f[c] - k.target);
        sd = k.s;
      } else {
        mean = f[c] - decline(th, f[c]);
        sd = th.sigma(f[c]);
      }
      const double next = std::max(0.5, mean + sd * eps(static_cast<Eigen::Index>(c)));
      recs.push_back({w.countries[c], {start + 5 * t}, next, ph[c]});
      if (ph[c] == Phase::transition && next < 2.1 && decline(th, next) < 0.01)
        ph[c] = Phase::post_transition;
      f[c] = next;
    }
  }
  return TFRPanel(recs);
}

}  // namespace synth
