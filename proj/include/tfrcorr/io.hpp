#pragma once

// Headered CSV ingestion and emission for every file the pipeline reads or
// writes. Numbers are written in shortest round-trip form, so loading and
// re-serializing a file reproduces it exactly.

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <Eigen/Dense>

#include "tfrcorr/analytics.hpp"
#include "tfrcorr/apl.hpp"
#include "tfrcorr/domain.hpp"
#include "tfrcorr/phase_model.hpp"
#include "tfrcorr/psd_repair.hpp"
#include "tfrcorr/simulation.hpp"

namespace tfrcorr::io {

// ---------------------------------------------------------------------------
// CSV primitives

struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<CsvRow> rows;

  /// Index of a required column.
  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw ParseError(source, 1, 0, "missing column '" + std::string(name) + "'");
  }

  std::optional<std::size_t> find_column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  }
};

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line, const std::string& source,
                                               std::size_t lineno) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false, was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"' && field.empty() && !was_quoted) {
      quoted = was_quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else {
      field += ch;
    }
  }
  if (quoted) throw ParseError(source, lineno, out.size() + 1, "unterminated quoted field");
  out.push_back(std::move(field));
  return out;
}

inline bool needs_quotes(std::string_view s) {
  return s.find_first_of(",\"\n\r") != std::string_view::npos;
}

}  // namespace detail

inline CsvTable parse_csv(std::istream& in, const std::string& source) {
  CsvTable t;
  t.source = source;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto fields = detail::split_csv_line(line, source, lineno);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size())
      throw ParseError(source, lineno, 0,
                       "expected " + std::to_string(t.header.size()) + " fields, found " +
                           std::to_string(fields.size()));
    t.rows.push_back({lineno, std::move(fields)});
  }
  if (!have_header) throw ParseError(source, 1, 0, "empty file (no header)");
  return t;
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingDataError("cannot open " + path);
  return parse_csv(in, path);
}

inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string csv_field(std::string_view s) {
  if (!detail::needs_quotes(s)) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  CsvWriter& row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << csv_field(fields[i]);
    }
    out_ << '\n';
    return *this;
  }

 private:
  std::ostream& out_;
};

// Field accessors that report file, line and column on failure.

inline double number(const CsvTable& t, const CsvRow& r, std::size_t col) {
  const std::string& s = r.fields[col];
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(t.source, r.line, col + 1,
                     "expected a number in column '" + t.header[col] + "', found '" + s + "'");
  return v;
}

inline long long integer(const CsvTable& t, const CsvRow& r, std::size_t col) {
  const std::string& s = r.fields[col];
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(t.source, r.line, col + 1,
                     "expected an integer in column '" + t.header[col] + "', found '" + s + "'");
  return v;
}

inline bool flag01(const CsvTable& t, const CsvRow& r, std::size_t col) {
  const std::string& s = r.fields[col];
  if (s == "0") return false;
  if (s == "1") return true;
  throw ParseError(t.source, r.line, col + 1,
                   "expected 0 or 1 in column '" + t.header[col] + "', found '" + s + "'");
}

inline CountryId country(const CsvTable& t, const CsvRow& r, std::size_t col) {
  if (r.fields[col].empty())
    throw ParseError(t.source, r.line, col + 1, "empty country code in column '" + t.header[col] + "'");
  return CountryId{r.fields[col]};
}

// ---------------------------------------------------------------------------
// Panel: tfr.csv (country, period_start, tfr) + phases.csv (country,
// period_start, phase)

inline TFRPanel read_panel(const CsvTable& tfr, const CsvTable& phases, int stride = 5) {
  const auto tc = tfr.column("country"), tp = tfr.column("period_start"), tv = tfr.column("tfr");
  const auto pc = phases.column("country"), pp = phases.column("period_start"),
             pv = phases.column("phase");

  std::map<std::pair<CountryId, int>, std::pair<Phase, std::size_t>> phase_of;
  for (const auto& r : phases.rows) {
    auto ph = parse_phase(r.fields[pv]);
    if (!ph)
      throw ParseError(phases.source, r.line, pv + 1, "unknown phase '" + r.fields[pv] + "'");
    auto key = std::make_pair(country(phases, r, pc), static_cast<int>(integer(phases, r, pp)));
    if (!phase_of.emplace(key, std::make_pair(*ph, r.line)).second)
      throw ParseError(phases.source, r.line, 0, "duplicate phase row");
  }

  std::vector<PanelRecord> records;
  std::map<std::pair<CountryId, int>, bool> seen;
  for (const auto& r : tfr.rows) {
    auto key = std::make_pair(country(tfr, r, tc), static_cast<int>(integer(tfr, r, tp)));
    const double v = number(tfr, r, tv);
    auto it = phase_of.find(key);
    if (it == phase_of.end())
      throw ParseError(tfr.source, r.line, 0,
                       "no phase for " + key.first.code + " " + std::to_string(key.second) +
                           " in " + phases.source);
    if (!seen.emplace(key, true).second) throw ParseError(tfr.source, r.line, 0, "duplicate tfr row");
    records.push_back({key.first, Period{key.second}, v, it->second.first});
  }
  for (const auto& [key, val] : phase_of)
    if (!seen.count(key))
      throw ParseError(phases.source, val.second, 0,
                       "phase row for " + key.first.code + " " + std::to_string(key.second) +
                           " has no tfr row");
  return TFRPanel(records, stride);
}

inline void write_tfr(std::ostream& out, const TFRPanel& panel) {
  CsvWriter w(out);
  w.row({"country", "period_start", "tfr"});
  for (const auto& r : panel.records())
    w.row({r.country.code, std::to_string(r.period.start_year), format_number(r.tfr)});
}

inline void write_phases(std::ostream& out, const TFRPanel& panel) {
  CsvWriter w(out);
  w.row({"country", "period_start", "phase"});
  for (const auto& r : panel.records())
    w.row({r.country.code, std::to_string(r.period.start_year), std::string(to_string(r.phase))});
}

// ---------------------------------------------------------------------------
// covariates.csv (country_a, country_b, contig, comcol, same_region)

inline PairCovariateTable read_covariates(const CsvTable& t) {
  const auto a = t.column("country_a"), b = t.column("country_b"), c1 = t.column("contig"),
             c2 = t.column("comcol"), c3 = t.column("same_region");
  std::vector<PairCovariateRecord> recs;
  std::map<CountryPair, std::size_t> lines;
  for (const auto& r : t.rows) {
    PairCovariateRecord rec{country(t, r, a), country(t, r, b),
                            {flag01(t, r, c1), flag01(t, r, c2), flag01(t, r, c3)}};
    if (rec.a == rec.b) throw ParseError(t.source, r.line, 0, "pair of a country with itself");
    if (!lines.emplace(CountryPair::of(rec.a, rec.b), r.line).second)
      throw ParseError(t.source, r.line, 0, "duplicate covariate row for " + rec.a.code + "/" + rec.b.code);
    recs.push_back(std::move(rec));
  }
  return PairCovariateTable(recs);
}

inline void write_covariates(std::ostream& out, const PairCovariateTable& pairs) {
  CsvWriter w(out);
  w.row({"country_a", "country_b", "contig", "comcol", "same_region"});
  for (const auto& [k, c] : pairs.entries())
    w.row({k.first.code, k.second.code, c.contig ? "1" : "0", c.comcol ? "1" : "0",
           c.same_region ? "1" : "0"});
}

// ---------------------------------------------------------------------------
// theta.csv (country, sample_id, d_c, delta1..delta4, sigma_kind,
// sigma1..sigma4). sample_id runs 0..K-1 per country. sigma_kind is "constant" (sigma1 only) or
// "piecewise_linear" (values at TFR 1, 2.5, 5, 9).

inline ThetaSamples read_theta(const CsvTable& t) {
  const auto cc = t.column("country"), sid = t.column("sample_id"), dc = t.column("d_c");
  const std::array<std::size_t, 4> dl{t.column("delta1"), t.column("delta2"), t.column("delta3"),
                                      t.column("delta4")};
  const auto kind = t.column("sigma_kind");
  const std::array<std::size_t, 4> sg{t.column("sigma1"), t.column("sigma2"), t.column("sigma3"),
                                      t.column("sigma4")};
  std::map<CountryId, std::map<long long, DeclineTheta>> by_country;
  for (const auto& r : t.rows) {
    DeclineTheta th;
    th.pace = number(t, r, dc);
    for (int i = 0; i < 4; ++i) th.widths[i] = number(t, r, dl[i]);
    const std::string& k = r.fields[kind];
    if (k == "constant") {
      th.sigma = SigmaSpec::constant(number(t, r, sg[0]));
      for (int i = 1; i < 4; ++i)
        if (!r.fields[sg[i]].empty())
          throw ParseError(t.source, r.line, sg[i] + 1, "constant sigma takes only sigma1");
    } else if (k == "piecewise_linear") {
      std::array<double, 4> v{};
      for (int i = 0; i < 4; ++i) v[i] = number(t, r, sg[i]);
      th.sigma = SigmaSpec::piecewise(v);
    } else {
      throw ParseError(t.source, r.line, kind + 1, "unknown sigma_kind '" + k + "'");
    }
    try {
      th.validate();
    } catch (const DomainError& e) {
      throw ParseError(t.source, r.line, 0, e.what());
    }
    auto c = country(t, r, cc);
    if (!by_country[c].emplace(integer(t, r, sid), th).second)
      throw ParseError(t.source, r.line, sid + 1, "duplicate sample_id for " + c.code);
  }
  std::map<CountryId, std::vector<DeclineTheta>> draws;
  for (auto& [c, m] : by_country) {
    long long expected = 0;
    for (auto& [id, th] : m) {
      if (id != expected++)
        throw ParseError(t.source, 1, sid + 1,
                         "sample_id values for " + c.code + " must run 0..K-1");
      draws[c].push_back(th);
    }
  }
  try {
    return ThetaSamples(std::move(draws));
  } catch (const DomainError& e) {
    throw ParseError(t.source, 1, 0, e.what());
  }
}

inline void write_theta(std::ostream& out, const ThetaSamples& thetas) {
  CsvWriter w(out);
  w.row({"country", "sample_id", "d_c", "delta1", "delta2", "delta3", "delta4", "sigma_kind",
         "sigma1", "sigma2", "sigma3", "sigma4"});
  for (const auto& [c, draws] : thetas.all())
    for (std::size_t k = 0; k < draws.size(); ++k) {
      const auto& th = draws[k];
      std::vector<std::string> f{c.code, std::to_string(k), format_number(th.pace)};
      for (double d : th.widths) f.push_back(format_number(d));
      if (th.sigma.kind == SigmaSpec::Kind::constant) {
        f.insert(f.end(), {"constant", format_number(th.sigma.values[0]), "", "", ""});
      } else {
        f.push_back("piecewise_linear");
        for (double v : th.sigma.values) f.push_back(format_number(v));
      }
      w.row(f);
    }
}

// ---------------------------------------------------------------------------
// weights.csv (region, country, weight)

inline std::vector<PopulationWeights> read_weights(const CsvTable& t, Warnings* warnings = nullptr) {
  const auto rc = t.column("region"), cc = t.column("country"), wc = t.column("weight");
  std::vector<std::string> order;
  std::map<std::string, std::vector<PopulationWeights::Entry>> raw;
  for (const auto& r : t.rows) {
    const std::string& region = r.fields[rc];
    if (region.empty()) throw ParseError(t.source, r.line, rc + 1, "empty region");
    if (!raw.count(region)) order.push_back(region);
    raw[region].emplace_back(country(t, r, cc), number(t, r, wc));
  }
  std::vector<PopulationWeights> out;
  for (const auto& region : order) out.emplace_back(region, raw[region], warnings);
  return out;
}

inline void write_weights(std::ostream& out, const std::vector<PopulationWeights>& regions) {
  CsvWriter w(out);
  w.row({"region", "country", "weight"});
  for (const auto& reg : regions)
    for (const auto& [c, p] : reg.entries()) w.row({reg.region(), c.code, format_number(p)});
}

// ---------------------------------------------------------------------------
// params.csv (kappa, regime, beta0..beta3), one row per regime

inline CorrelationParams read_params(const CsvTable& t) {
  const auto kc = t.column("kappa"), rc = t.column("regime");
  const std::array<std::size_t, 4> bc{t.column("beta0"), t.column("beta1"), t.column("beta2"),
                                      t.column("beta3")};
  std::optional<Betas> low, high;
  std::optional<double> kappa;
  for (const auto& r : t.rows) {
    const double k = number(t, r, kc);
    if (kappa && *kappa != k) throw ParseError(t.source, r.line, kc + 1, "kappa differs between rows");
    kappa = k;
    Betas b{};
    for (int i = 0; i < 4; ++i) b[i] = number(t, r, bc[i]);
    const std::string& regime = r.fields[rc];
    auto& slot = regime == "low" ? low : regime == "high" ? high : low;
    if (regime != "low" && regime != "high")
      throw ParseError(t.source, r.line, rc + 1, "regime must be 'low' or 'high'");
    if (slot) throw ParseError(t.source, r.line, rc + 1, "duplicate regime row");
    slot = b;
  }
  if (!low || !high || !kappa) throw ParseError(t.source, 1, 0, "params need one low and one high row");
  return CorrelationParams(*kappa, *low, *high);
}

inline void write_params(std::ostream& out, const CorrelationParams& p) {
  CsvWriter w(out);
  w.row({"kappa", "regime", "beta0", "beta1", "beta2", "beta3"});
  for (Regime r : {Regime::low, Regime::high}) {
    std::vector<std::string> f{format_number(p.kappa()), std::string(to_string(r))};
    for (double b : p.betas(r)) f.push_back(format_number(b));
    w.row(f);
  }
}

inline void write_kappa_profile(std::ostream& out, const APLFit& fit) {
  CsvWriter w(out);
  w.row({"kappa", "loglik", "iterations", "converged"});
  for (const auto& pt : fit.kappa_profile)
    w.row({format_number(pt.kappa), format_number(pt.loglik), std::to_string(pt.iterations),
           pt.converged ? "1" : "0"});
}

// ---------------------------------------------------------------------------
// Ensemble: long format (trajectory, country, period, tfr)

inline void write_ensemble(std::ostream& out, const TrajectoryEnsemble& ens) {
  CsvWriter w(out);
  w.row({"trajectory", "country", "period", "tfr"});
  for (std::size_t t = 0; t < ens.trajectories(); ++t)
    for (std::size_t c = 0; c < ens.countries().size(); ++c)
      for (std::size_t p = 0; p < ens.periods().size(); ++p)
        w.row({std::to_string(t), ens.countries()[c].code,
               std::to_string(ens.periods()[p].start_year), format_number(ens.at(t, c, p))});
}

inline TrajectoryEnsemble read_ensemble(const CsvTable& t) {
  const auto tc = t.column("trajectory"), cc = t.column("country"), pc = t.column("period"),
             vc = t.column("tfr");
  std::vector<CountryId> countries;
  std::map<CountryId, std::size_t> cidx;
  std::map<int, std::size_t> pidx;
  long long max_traj = -1;
  for (const auto& r : t.rows) {
    auto c = country(t, r, cc);
    if (!cidx.count(c)) {
      cidx.emplace(c, countries.size());
      countries.push_back(c);
    }
    pidx.emplace(static_cast<int>(integer(t, r, pc)), 0);
    const long long tr = integer(t, r, tc);
    if (tr < 0) throw ParseError(t.source, r.line, tc + 1, "negative trajectory index");
    max_traj = std::max(max_traj, tr);
  }
  std::vector<Period> periods;
  for (auto& [p, i] : pidx) {
    i = periods.size();
    periods.push_back(Period{p});
  }
  const std::size_t n_traj = static_cast<std::size_t>(max_traj + 1);
  TrajectoryEnsemble ens(countries, periods, n_traj, 0);
  std::vector<char> filled(n_traj * countries.size() * periods.size(), 0);
  for (const auto& r : t.rows) {
    const auto tr = static_cast<std::size_t>(integer(t, r, tc));
    const auto c = cidx.at(CountryId{r.fields[cc]});
    const auto p = pidx.at(static_cast<int>(integer(t, r, pc)));
    auto& f = filled[(tr * countries.size() + c) * periods.size() + p];
    if (f) throw ParseError(t.source, r.line, 0, "duplicate ensemble cell");
    f = 1;
    ens.at(tr, c, p) = number(t, r, vc);
  }
  for (char f : filled)
    if (!f) throw ParseError(t.source, 1, 0, "ensemble table is incomplete");
  return ens;
}

// ---------------------------------------------------------------------------
// Interval summaries (region, period, level, lo, median, hi)

inline void write_intervals(std::ostream& out, const std::vector<IntervalRow>& rows) {
  CsvWriter w(out);
  w.row({"region", "period", "level", "lo", "median", "hi"});
  for (const auto& r : rows)
    w.row({r.name, std::to_string(r.period.start_year), format_number(r.level), format_number(r.lo),
           format_number(r.median), format_number(r.hi)});
}

inline std::map<IntervalKey, std::pair<double, double>> read_intervals(const CsvTable& t) {
  const auto rc = t.column("region"), pc = t.column("period"), lc = t.column("level"),
             lo = t.column("lo"), hi = t.column("hi");
  std::map<IntervalKey, std::pair<double, double>> out;
  for (const auto& r : t.rows) {
    IntervalKey k{r.fields[rc], Period{static_cast<int>(integer(t, r, pc))}, number(t, r, lc)};
    if (!out.emplace(k, std::make_pair(number(t, r, lo), number(t, r, hi))).second)
      throw ParseError(t.source, r.line, 0, "duplicate interval row");
  }
  return out;
}

/// observed.csv (region, period_start, tfr)
inline std::map<RegionPeriod, double> read_observed(const CsvTable& t) {
  const auto rc = t.column("region"), pc = t.column("period_start"), vc = t.column("tfr");
  std::map<RegionPeriod, double> out;
  for (const auto& r : t.rows) {
    RegionPeriod k{r.fields[rc], Period{static_cast<int>(integer(t, r, pc))}};
    if (!out.emplace(k, number(t, r, vc)).second)
      throw ParseError(t.source, r.line, 0, "duplicate observed row");
  }
  return out;
}

inline std::string level_column(double level) {
  return "ci" + format_number(std::round(level * 1000.0) / 10.0);
}

/// One row per period plus a final "All" row; one column per level.
inline void write_coverage(std::ostream& out, const CoverageTable& table) {
  CsvWriter w(out);
  std::vector<std::string> header{"period"};
  for (double l : table.levels) header.push_back(level_column(l));
  header.push_back("n");
  w.row(header);
  auto emit = [&](const std::string& label, const std::map<double, CoverageCell>& cells) {
    std::vector<std::string> f{label};
    int n = 0;
    for (double l : table.levels) {
      auto it = cells.find(l);
      const CoverageCell c = it == cells.end() ? CoverageCell{} : it->second;
      f.push_back(format_number(c.proportion()));
      n = c.total;
    }
    f.push_back(std::to_string(n));
    w.row(f);
  };
  for (const auto& [p, cells] : table.by_period) emit(std::to_string(p.start_year), cells);
  emit("All", table.overall);
}

inline void write_variance_report(std::ostream& out, const std::vector<VarianceRow>& rows) {
  CsvWriter w(out);
  w.row({"region", "df_if", "max_proportion", "n", "repaired"});
  for (const auto& r : rows)
    w.row({r.region, format_number(r.df_if), format_number(r.max_proportion), std::to_string(r.n),
           r.repaired ? "1" : "0"});
}

// ---------------------------------------------------------------------------
// Square matrix: header "country,<c1>,...,<cn>", then one row per country

inline CorrelationMatrix read_matrix(const CsvTable& t) {
  if (t.header.empty() || t.header.size() != t.rows.size() + 1)
    throw ParseError(t.source, 1, 0, "matrix file must have one row per column");
  const std::size_t n = t.rows.size();
  CorrelationMatrix m{{}, Eigen::MatrixXd(n, n)};
  for (std::size_t j = 1; j <= n; ++j) m.countries.push_back(CountryId{t.header[j]});
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = t.rows[i];
    if (r.fields[0] != t.header[i + 1])
      throw ParseError(t.source, r.line, 1, "row label '" + r.fields[0] + "' does not match column '" +
                                                t.header[i + 1] + "'");
    for (std::size_t j = 0; j < n; ++j) m.values(i, j) = number(t, r, j + 1);
  }
  return m;
}

inline void write_matrix(std::ostream& out, const CorrelationMatrix& m) {
  CsvWriter w(out);
  std::vector<std::string> header{"country"};
  for (const auto& c : m.countries) header.push_back(c.code);
  w.row(header);
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::vector<std::string> f{m.countries[i].code};
    for (std::size_t j = 0; j < m.size(); ++j) f.push_back(format_number(m.values(i, j)));
    w.row(f);
  }
}

// ---------------------------------------------------------------------------
// Bundled loading with cross-reference checks

struct InputPaths {
  std::string tfr;
  std::string phases;
  std::string covariates;
  std::string theta;
  std::string weights;
};

struct Inputs {
  TFRPanel panel;
  PairCovariateTable pairs;
  ThetaSamples thetas;
  std::vector<PopulationWeights> weights;
  std::vector<PanelDiagnostic> diagnostics;
  Warnings warnings;
};

/// Loads whichever files are named. Country codes in covariates, theta and
/// weights must exist in the panel when a panel is loaded.
inline Inputs load_inputs(const InputPaths& paths, int stride = 5) {
  Inputs in;
  const bool have_panel = !paths.tfr.empty() || !paths.phases.empty();
  if (have_panel) {
    if (paths.tfr.empty() || paths.phases.empty())
      throw MissingDataError("tfr and phases files must be given together");
    in.panel = read_panel(read_csv(paths.tfr), read_csv(paths.phases), stride);
    in.diagnostics = validate_panel(in.panel);
  }
  auto check_known = [&](const CountryId& c, const std::string& file) {
    if (have_panel && !in.panel.contains(c))
      throw MissingDataError(file + ": unknown country code '" + c.code + "'");
  };
  if (!paths.covariates.empty()) {
    in.pairs = read_covariates(read_csv(paths.covariates));
    for (const auto& [k, v] : in.pairs.entries()) {
      check_known(k.first, paths.covariates);
      check_known(k.second, paths.covariates);
    }
    if (have_panel) in.pairs.report_missing(in.panel.countries(), in.warnings);
  }
  if (!paths.theta.empty()) {
    in.thetas = read_theta(read_csv(paths.theta));
    for (const auto& [c, v] : in.thetas.all()) check_known(c, paths.theta);
  }
  if (!paths.weights.empty()) {
    in.weights = read_weights(read_csv(paths.weights), &in.warnings);
    for (const auto& w : in.weights)
      for (const auto& [c, p] : w.entries()) check_known(c, paths.weights);
  }
  return in;
}

}  // namespace tfrcorr::io
