#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace tfrcorr {

struct NelderMeadOptions {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double initial_step = 0.05;
  int max_iterations = 5000;  // per run
  double x_tolerance = 1e-8;  // simplex diameter
  double f_tolerance = 1e-10;
  int restarts = 1;  // extra runs from the best vertex after a non-converged run
  bool record_trace = false;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  int restarts_used = 0;
  std::vector<double> best_trace;  // best value after each iteration
};

namespace detail {

template <class F>
NelderMeadResult nelder_mead_run(F& f, const std::vector<double>& start,
                                 const NelderMeadOptions& opt) {
  const std::size_t n = start.size();
  auto eval = [&](const std::vector<double>& x) {
    double v = f(std::span<const double>(x));
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<std::vector<double>> simplex(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += opt.initial_step;
  std::vector<double> fx(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fx[i] = eval(simplex[i]);

  NelderMeadResult res;
  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);

  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
    std::vector<std::vector<double>> s2(n + 1);
    std::vector<double> f2(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
      s2[k] = std::move(simplex[order[k]]);
      f2[k] = fx[order[k]];
    }
    simplex.swap(s2);
    fx.swap(f2);
  };
  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += std::pow(simplex[k][i] - simplex[0][i], 2);
      d = std::max(d, std::sqrt(s));
    }
    return d;
  };
  auto point = [&](std::vector<double>& out, const std::vector<double>& toward, double coef) {
    for (std::size_t i = 0; i < n; ++i) out[i] = centroid[i] + coef * (toward[i] - centroid[i]);
  };

  sort_simplex();
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    if (diameter() < opt.x_tolerance && std::abs(fx[n] - fx[0]) < opt.f_tolerance) {
      res.converged = true;
      break;
    }
    ++res.iterations;
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k][i] / static_cast<double>(n);

    point(trial, simplex[n], -opt.reflection);
    const double fr = eval(trial);
    if (fr < fx[0]) {
      point(trial2, trial, opt.expansion);
      const double fe = eval(trial2);
      if (fe < fr) {
        simplex[n] = trial2;
        fx[n] = fe;
      } else {
        simplex[n] = trial;
        fx[n] = fr;
      }
    } else if (fr < fx[n - 1]) {
      simplex[n] = trial;
      fx[n] = fr;
    } else {
      const bool outside = fr < fx[n];
      if (outside) {
        point(trial2, trial, opt.contraction);
      } else {
        point(trial2, simplex[n], opt.contraction);
      }
      const double fc = eval(trial2);
      if (fc < (outside ? fr : fx[n])) {
        simplex[n] = trial2;
        fx[n] = fc;
      } else {
        for (std::size_t k = 1; k <= n; ++k) {
          for (std::size_t i = 0; i < n; ++i)
            simplex[k][i] = simplex[0][i] + opt.shrink * (simplex[k][i] - simplex[0][i]);
          fx[k] = eval(simplex[k]);
        }
      }
    }
    sort_simplex();
    if (opt.record_trace) res.best_trace.push_back(fx[0]);
  }
  if (!res.converged && diameter() < opt.x_tolerance && std::abs(fx[n] - fx[0]) < opt.f_tolerance)
    res.converged = true;
  res.x = simplex[0];
  res.value = fx[0];
  return res;
}

}  // namespace detail

/// Derivative-free minimization. NaN objective values are treated as +inf,
/// so infeasible points can be rejected by returning infinity.
template <class F>
NelderMeadResult nelder_mead_minimize(F&& f, std::span<const double> x0,
                                      const NelderMeadOptions& opt = {}) {
  std::vector<double> start(x0.begin(), x0.end());
  NelderMeadResult best = detail::nelder_mead_run(f, start, opt);
  for (int r = 0; r < opt.restarts && !best.converged; ++r) {
    NelderMeadResult next = detail::nelder_mead_run(f, best.x, opt);
    next.iterations += best.iterations;
    next.restarts_used = best.restarts_used + 1;
    if (opt.record_trace) {
      std::vector<double> trace = std::move(best.best_trace);
      trace.insert(trace.end(), next.best_trace.begin(), next.best_trace.end());
      next.best_trace = std::move(trace);
    }
    if (!(next.value <= best.value)) {
      next.x = best.x;
      next.value = best.value;
    }
    best = std::move(next);
  }
  return best;
}

/// Maximization wrapper: -inf from the objective means "reject".
template <class F>
NelderMeadResult nelder_mead_maximize(F&& f, std::span<const double> x0,
                                      const NelderMeadOptions& opt = {}) {
  auto neg = [&f](std::span<const double> x) { return -f(x); };
  NelderMeadResult r = nelder_mead_minimize(neg, x0, opt);
  r.value = -r.value;
  for (double& v : r.best_trace) v = -v;
  return r;
}

}  // namespace tfrcorr
