#pragma once

// Subcommand front end. Exit codes: 0 success, 1 usage error, 2 data error.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tfrcorr/analytics.hpp"
#include "tfrcorr/apl.hpp"
#include "tfrcorr/io.hpp"
#include "tfrcorr/phase_model.hpp"
#include "tfrcorr/psd_repair.hpp"
#include "tfrcorr/simulation.hpp"

namespace tfrcorr::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_data = 2;

struct CommonOptions {
  bool strict = false;
  unsigned threads = 1;
};

namespace detail {

template <class Fn>
void write_file(const std::string& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MissingDataError("cannot write " + path);
  fn(out);
  out.flush();
  if (!out) throw MissingDataError("failed writing " + path);
}

inline void flush_warnings(const Warnings& w, const CommonOptions& common, std::ostream& err) {
  for (const auto& m : w.messages) err << "warning: " << m << '\n';
  if (common.strict && !w.empty()) throw DomainError("warnings treated as errors (--strict)");
}

inline void require_clean(const io::Inputs& in, std::ostream& err) {
  for (const auto& d : in.diagnostics)
    err << "diagnostic: " << d.country.code << " "
        << (d.period ? std::to_string(d.period->start_year) : std::string("-")) << ": " << d.rule
        << '\n';
  if (!in.diagnostics.empty())
    throw DomainError(std::to_string(in.diagnostics.size()) + " panel diagnostic(s)");
}

inline CorrelationParams params_or_default(const std::string& path) {
  return path.empty() ? CorrelationParams::defaults() : io::read_params(io::read_csv(path));
}

}  // namespace detail

struct EstimateArgs {
  io::InputPaths in;
  std::string out_params = "params.csv";
  std::string out_profile = "kappa_profile.csv";
  double grid_min = 0.5;
  double grid_max = 9.0;
  double grid_step = 0.1;
};

inline void run_estimate(const EstimateArgs& a, const CommonOptions& common, std::ostream& out,
                         std::ostream& err) {
  auto in = io::load_inputs(a.in);
  detail::require_clean(in, err);
  detail::flush_warnings(in.warnings, common, err);
  if (!(a.grid_step > 0.0) || a.grid_max < a.grid_min) throw DomainError("invalid kappa grid");
  std::vector<double> grid;
  const long steps = std::lround((a.grid_max - a.grid_min) / a.grid_step);
  for (long i = 0; i <= steps; ++i)
    grid.push_back(std::round((a.grid_min + i * a.grid_step) * 1e9) / 1e9);

  const auto errors = mean_standardized_errors(in.panel, in.thetas, PhaseModel<>{}, common.threads);
  AplOptions opt;
  opt.threads = common.threads;
  const APLFit fit = kappa_grid_search(errors, in.panel, in.pairs, grid, opt);
  detail::write_file(a.out_params, [&](std::ostream& o) { io::write_params(o, fit.params); });
  detail::write_file(a.out_profile, [&](std::ostream& o) { io::write_kappa_profile(o, fit); });
  out << "kappa=" << io::format_number(fit.params.kappa())
      << " loglik=" << io::format_number(fit.loglik) << '\n';
}

struct ProjectArgs {
  io::InputPaths in;
  std::string params;
  int launch_period = 0;  // 0: latest period in the panel
  std::string mode = "correlated";
  std::size_t trajectories = 1000;
  std::uint64_t seed = 0;
  int horizon = 4;
  std::vector<double> levels{0.8, 0.9, 0.95};
  std::string out_ensemble = "ensemble.csv";
  std::string out_intervals = "intervals.csv";
  std::string out_regional;
};

inline void run_project(const ProjectArgs& a, const CommonOptions& common, std::ostream& out,
                        std::ostream& err) {
  auto in = io::load_inputs(a.in);
  detail::require_clean(in, err);
  const auto params = detail::params_or_default(a.params);
  const auto periods = in.panel.periods();
  if (periods.empty()) throw MissingDataError("panel is empty");
  const Period launch = a.launch_period == 0 ? periods.back() : Period{a.launch_period};
  const LaunchState state = launch_state(in.panel, launch, in.warnings, common.strict);
  detail::flush_warnings(in.warnings, common, err);

  ProjectionOptions opt;
  opt.horizon = a.horizon;
  opt.trajectories = a.trajectories;
  opt.seed = a.seed;
  opt.mode = a.mode == "independent" ? ErrorMode::independent : ErrorMode::correlated;
  opt.period_stride = in.panel.stride();
  opt.threads = common.threads;
  const auto ens = project(state, in.thetas, params, in.pairs, opt);

  detail::write_file(a.out_ensemble, [&](std::ostream& o) { io::write_ensemble(o, ens); });
  detail::write_file(a.out_intervals,
                     [&](std::ostream& o) { io::write_intervals(o, summarize_countries(ens, a.levels)); });
  if (!a.out_regional.empty()) {
    std::vector<IntervalRow> rows;
    for (const auto& w : in.weights) {
      auto r = summarize_region(regional_aggregate(ens, w), a.levels);
      rows.insert(rows.end(), r.begin(), r.end());
    }
    detail::write_file(a.out_regional, [&](std::ostream& o) { io::write_intervals(o, rows); });
  }
  out << "projected " << ens.countries().size() << " countries, " << ens.trajectories()
      << " trajectories, " << a.horizon << " periods (" << to_string(opt.mode) << ")\n";
}

struct AggregateArgs {
  std::string ensemble;
  std::string weights;
  std::vector<double> levels{0.8, 0.9, 0.95};
  std::string out = "regional_intervals.csv";
};

inline void run_aggregate(const AggregateArgs& a, const CommonOptions& common, std::ostream& out,
                          std::ostream& err) {
  Warnings warnings;
  const auto ens = io::read_ensemble(io::read_csv(a.ensemble));
  const auto regions = io::read_weights(io::read_csv(a.weights), &warnings);
  detail::flush_warnings(warnings, common, err);
  std::vector<IntervalRow> rows;
  for (const auto& w : regions) {
    auto r = summarize_region(regional_aggregate(ens, w), a.levels);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  detail::write_file(a.out, [&](std::ostream& o) { io::write_intervals(o, rows); });
  out << "aggregated " << regions.size() << " region(s)\n";
}

struct ValidateArgs {
  std::string intervals;
  std::string observed;
  std::vector<double> levels{0.8, 0.9, 0.95};
  std::string out = "coverage.csv";
};

inline void run_validate(const ValidateArgs& a, const CommonOptions&, std::ostream& out,
                         std::ostream&) {
  const auto intervals = io::read_intervals(io::read_csv(a.intervals));
  const auto observed = io::read_observed(io::read_csv(a.observed));
  const auto table = coverage(observed, intervals, a.levels);
  detail::write_file(a.out, [&](std::ostream& o) { io::write_coverage(o, table); });
  io::write_coverage(out, table);
}

struct DfifArgs {
  std::string weights;
  std::string covariates;
  std::string params;
  std::string out = "dfif.csv";
};

inline void run_dfif(const DfifArgs& a, const CommonOptions& common, std::ostream& out,
                     std::ostream& err) {
  io::InputPaths paths;
  paths.weights = a.weights;
  paths.covariates = a.covariates;
  auto in = io::load_inputs(paths);
  for (const auto& w : in.weights) in.pairs.report_missing(w.countries(), in.warnings);
  detail::flush_warnings(in.warnings, common, err);
  const auto rows = variance_report(in.weights, in.pairs, detail::params_or_default(a.params));
  detail::write_file(a.out, [&](std::ostream& o) { io::write_variance_report(o, rows); });
  io::write_variance_report(out, rows);
}

struct RepairArgs {
  std::string matrix;
  std::string out = "repaired.csv";
};

inline void run_repair(const RepairArgs& a, const CommonOptions&, std::ostream& out,
                       std::ostream&) {
  const auto m = io::read_matrix(io::read_csv(a.matrix));
  RepairReport rep;
  const auto fixed = repair(m, &rep);
  detail::write_file(a.out, [&](std::ostream& o) { io::write_matrix(o, fixed); });
  out << "repaired=" << (rep.repaired ? 1 : 0)
      << " min_eigenvalue_before=" << io::format_number(rep.min_eigenvalue_before)
      << " max_abs_change=" << io::format_number(rep.max_abs_change) << '\n';
}

/// `args` excludes the program name.
inline int run_cli(std::vector<std::string> args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Joint probabilistic TFR projection with between-country correlation", "tfrcorr"};
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  CommonOptions common;
  common.threads = default_threads();
  app.add_flag("--strict", common.strict, "Treat warnings as errors");
  app.add_option("--threads", common.threads, "Maximum worker threads")->check(CLI::PositiveNumber);

  auto add_inputs = [](CLI::App* sub, io::InputPaths& p, bool need_theta) {
    sub->add_option("--tfr", p.tfr, "tfr.csv")->required();
    sub->add_option("--phases", p.phases, "phases.csv")->required();
    sub->add_option("--covariates", p.covariates, "covariates.csv");
    auto* th = sub->add_option("--theta", p.theta, "theta.csv");
    if (need_theta) th->required();
  };
  auto add_levels = [](CLI::App* sub, std::vector<double>& levels) {
    sub->add_option("--levels", levels, "Interval levels, comma separated")
        ->delimiter(',')
        ->check(CLI::Range(0.0, 1.0));
  };

  EstimateArgs est;
  auto* s_est = app.add_subcommand("estimate", "Fit kappa and the correlation coefficients");
  add_inputs(s_est, est.in, true);
  s_est->add_option("--out-params", est.out_params);
  s_est->add_option("--out-profile", est.out_profile);
  s_est->add_option("--grid-min", est.grid_min);
  s_est->add_option("--grid-max", est.grid_max);
  s_est->add_option("--grid-step", est.grid_step);

  ProjectArgs proj;
  auto* s_proj = app.add_subcommand("project", "Simulate joint TFR trajectories");
  add_inputs(s_proj, proj.in, true);
  s_proj->add_option("--weights", proj.in.weights, "weights.csv for regional intervals");
  s_proj->add_option("--params", proj.params, "params.csv (defaults to published estimates)");
  s_proj->add_option("--launch-period", proj.launch_period, "Start year of the launch period");
  s_proj->add_option("--mode", proj.mode)->check(CLI::IsMember({"correlated", "independent"}));
  s_proj->add_option("--trajectories", proj.trajectories)->check(CLI::PositiveNumber);
  s_proj->add_option("--seed", proj.seed);
  s_proj->add_option("--horizon", proj.horizon)->check(CLI::NonNegativeNumber);
  add_levels(s_proj, proj.levels);
  s_proj->add_option("--out-ensemble", proj.out_ensemble);
  s_proj->add_option("--out-intervals", proj.out_intervals);
  s_proj->add_option("--out-regional", proj.out_regional);

  AggregateArgs agg;
  auto* s_agg = app.add_subcommand("aggregate", "Regional intervals from an ensemble");
  s_agg->add_option("--ensemble", agg.ensemble)->required();
  s_agg->add_option("--weights", agg.weights)->required();
  add_levels(s_agg, agg.levels);
  s_agg->add_option("--out", agg.out);

  ValidateArgs val;
  auto* s_val = app.add_subcommand("validate", "Coverage of intervals against observations");
  s_val->add_option("--intervals", val.intervals)->required();
  s_val->add_option("--observed", val.observed)->required();
  add_levels(s_val, val.levels);
  s_val->add_option("--out", val.out);

  DfifArgs dfif;
  auto* s_dfif = app.add_subcommand("dfif", "Steady-state DF/IF variance report per region");
  s_dfif->add_option("--weights", dfif.weights)->required();
  s_dfif->add_option("--covariates", dfif.covariates)->required();
  s_dfif->add_option("--params", dfif.params);
  s_dfif->add_option("--out", dfif.out);

  RepairArgs rep;
  auto* s_rep = app.add_subcommand("repair", "Repair a correlation matrix to PSD");
  s_rep->add_option("--matrix", rep.matrix)->required();
  s_rep->add_option("--out", rep.out);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (s_est->parsed()) run_estimate(est, common, out, err);
    if (s_proj->parsed()) run_project(proj, common, out, err);
    if (s_agg->parsed()) run_aggregate(agg, common, out, err);
    if (s_val->parsed()) run_validate(val, common, out, err);
    if (s_dfif->parsed()) run_dfif(dfif, common, out, err);
    if (s_rep->parsed()) run_repair(rep, common, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_data;
  }
  return exit_ok;
}

inline int run_cli(int argc, const char* const argv[], std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  return run_cli(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace tfrcorr::cli
