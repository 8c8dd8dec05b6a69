#include "stpot/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stpot/artifacts.hpp"
#include "stpot/decluster.hpp"
#include "stpot/dependence.hpp"
#include "stpot/error.hpp"
#include "stpot/homogenize.hpp"
#include "stpot/panel.hpp"
#include "stpot/risk.hpp"
#include "stpot/scedasis.hpp"
#include "stpot/synth.hpp"
#include "stpot/tail.hpp"
#include "stpot/trend_tests.hpp"

namespace stpot::cli {

namespace {

namespace fs = std::filesystem;

constexpr double kPi = 3.14159265358979323846;

std::string join_path(const std::string& dir, const std::string& name) {
  if (fs::path(name).is_absolute()) return name;
  return (fs::path(dir) / name).string();
}

std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return fnv1a64(ss.str());
}

/** Canonical stage configuration string; its hash stamps every artifact so
 *  reruns with the same inputs are byte identical and mixups are visible. */
class ConfigHash {
 public:
  explicit ConfigHash(const std::string& stage) : s_("stage=" + stage) {}
  void add(const std::string& key, const std::string& v) {
    s_ += "|" + key + "=" + v;
  }
  void add(const std::string& key, double v) { add(key, format_full(v)); }
  void add(const std::string& key, long long v) { add(key, std::to_string(v)); }
  void add(const std::string& key, int v) { add(key, std::to_string(v)); }
  void add_file(const std::string& key, const std::string& path) {
    add(key, format_hash(hash_file(path)));
  }
  std::uint64_t value() const { return fnv1a64(s_); }
  std::string hex() const { return format_hash(value()); }

 private:
  std::string s_;
};

ObservationPanel load_panel_artifact(const std::string& path) {
  require_artifact(path, "ingest' or 'simulate");
  return read_panel_file(path);
}

double empirical_quantile(std::vector<double> sorted_ascending, double q) {
  const auto n = sorted_ascending.size();
  auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  if (idx > 0) --idx;
  if (idx >= n) idx = n - 1;
  return sorted_ascending[idx];
}

struct GlobalOptions {
  std::string output_dir = ".";
  int threads = 1;
};

struct SimulateOptions {
  std::string spec_path;
  std::string out = "panel.tsv";
};

struct IngestOptions {
  std::string stations_path;
  std::string observations_path;
  std::string season = "all";
  std::string out = "panel.tsv";
};

struct DeclusterOptions {
  std::string panel;
  int lag = 1;
  int target = 0;
  std::string out = "panel_declustered.tsv";
};

struct FitTailOptions {
  std::string panel;
  int k = 0;
  std::vector<int> k_grid;
  std::string out = "tailfit.txt";
  std::string trace_out = "gamma_trace.tsv";
};

struct ScedasisOptions {
  std::string panel;
  int k = 0;
  double bandwidth = 0.1;
  int grid_points = 201;
  std::string out = "scedasis.tsv";
  std::string exceedances_out = "exceedances.tsv";
};

struct TestTrendOptions {
  std::string panel;
  int k = 0;
  std::string mode = "max-sd";
  double alpha = 0.05;
  std::string out = "trend_tests.tsv";
};

struct HomogenizeOptions {
  std::string panel;
  int k = 0;
  double bandwidth = 0.1;
  std::string out = "homogenized.tsv";
  std::string quantiles_out = "homog_quantiles.tsv";
};

struct FitVariogramOptions {
  std::string panel;
  int k = 0;
  double bandwidth = 0.1;
  std::string out = "variogram.txt";
  std::string pairs_out = "dependence_pairs.tsv";
  std::string grid_out = "variogram_grid.tsv";
};

struct RiskOptions {
  std::string panel;
  int k = 0;
  std::vector<int> k_list;
  double bandwidth = 0.1;
  double x = 0.0;
  double t = 1.0;
  std::string station = "all";
  std::string pair;
  std::string out = "risk.tsv";
};

struct ReportOptions {
  std::string panel;
  int k = 0;
  double bandwidth = 0.1;
  std::string mode = "max-sd";
  double alpha = 0.05;
  std::string out = "report.txt";
};

std::string resolve_panel(const GlobalOptions& g, const std::string& panel) {
  return panel.empty() ? join_path(g.output_dir, "panel.tsv")
                       : join_path(g.output_dir, panel);
}

void run_simulate(const GlobalOptions& g, const SimulateOptions& o) {
  ConfigHash cfg("simulate");
  cfg.add_file("spec", o.spec_path);
  SynthSpec spec = parse_spec_file(o.spec_path);
  ObservationPanel panel = simulate_panel(spec);
  write_panel_file(join_path(g.output_dir, o.out), panel, cfg.hex());
}

void run_ingest(const GlobalOptions& g, const IngestOptions& o) {
  ConfigHash cfg("ingest");
  cfg.add_file("stations", o.stations_path);
  cfg.add_file("observations", o.observations_path);
  cfg.add("season", o.season);
  auto stations = load_stations_file(o.stations_path);
  ObservationPanel panel = load_observations_file(o.observations_path, stations);
  panel = select_season(panel, season_from_string(o.season));
  panel = project_coordinates(panel);
  write_panel_file(join_path(g.output_dir, o.out), panel, cfg.hex());
}

void run_decluster(const GlobalOptions& g, const DeclusterOptions& o) {
  std::string panel_path = resolve_panel(g, o.panel);
  ConfigHash cfg("decluster");
  cfg.add_file("panel", panel_path);
  cfg.add("lag", o.lag);
  cfg.add("target", o.target);
  ObservationPanel panel = load_panel_artifact(panel_path);
  DeclusterResult d = decluster(panel, o.lag, o.target);
  ObservationPanel thinned = apply_decluster(panel, d);
  write_panel_file(join_path(g.output_dir, o.out), thinned, cfg.hex());
}

void run_fit_tail(const GlobalOptions& g, const FitTailOptions& o) {
  std::string panel_path = resolve_panel(g, o.panel);
  ConfigHash cfg("fit-tail");
  cfg.add_file("panel", panel_path);
  cfg.add("k", o.k);
  for (int kk : o.k_grid) cfg.add("k_grid", kk);
  ObservationPanel panel = load_panel_artifact(panel_path);
  TailFit fit = fit_tail(panel, o.k);

  ArtifactWriter w("tailfit", cfg.value());
  w.columns({"key", "value"});
  w.row({"n_days", std::to_string(panel.n_days())});
  w.row({"n_stations", std::to_string(panel.n_stations())});
  w.row({"n_values", std::to_string(fit.n_values)});
  w.row({"k", std::to_string(fit.k)});
  w.row({"threshold", format_short(fit.threshold)});
  w.row({"m1", format_short(fit.m1)});
  w.row({"m2", format_short(fit.m2)});
  w.row({"gamma", format_short(fit.gamma_hat)});
  w.row({"scale", format_short(fit.scale_hat)});
  w.row({"location", format_short(fit.location_hat)});
  w.row({"exceedances", std::to_string(fit.exceedance_count)});
  w.save(join_path(g.output_dir, o.out));

  if (!o.k_grid.empty()) {
    auto trace = tail_trace(panel, o.k_grid);
    ArtifactWriter t("gamma_trace", cfg.value());
    t.columns({"k", "threshold", "gamma", "scale", "exceedances"});
    for (const auto& pt : trace) {
      t.row({std::to_string(pt.k), format_short(pt.threshold),
             format_short(pt.gamma_hat), format_short(pt.scale_hat),
             std::to_string(pt.exceedance_count)});
    }
    t.save(join_path(g.output_dir, o.trace_out));
  }
}

void run_scedasis(const GlobalOptions& g, const ScedasisOptions& o) {
  std::string panel_path = resolve_panel(g, o.panel);
  ConfigHash cfg("scedasis");
  cfg.add_file("panel", panel_path);
  cfg.add("k", o.k);
  cfg.add("bandwidth", o.bandwidth);
  cfg.add("grid_points", o.grid_points);
  ObservationPanel panel = load_panel_artifact(panel_path);
  if (o.grid_points < 2) throw DataError("scedasis needs at least 2 grid points");

  ExceedanceProcess process = extract_exceedances(panel, o.k);
  std::vector<double> grid(o.grid_points);
  for (int gpt = 0; gpt < o.grid_points; ++gpt) {
    grid[gpt] = static_cast<double>(gpt) / (o.grid_points - 1);
  }
  ScedasisEstimate est = estimate_c(process, o.bandwidth, grid, g.threads);

  ArtifactWriter w("scedasis", cfg.value());
  w.meta("k", std::to_string(process.k));
  w.meta("threshold", format_short(process.threshold));
  w.meta("bandwidth", format_short(o.bandwidth));
  w.meta("low_resolution", est.low_resolution() ? "1" : "0");
  w.columns({"t", "station", "c", "c_normalized"});
  for (int gpt = 0; gpt < o.grid_points; ++gpt) {
    for (int j = 0; j < panel.n_stations(); ++j) {
      double c = est.at(gpt, j);
      w.row({format_short(grid[gpt]), panel.stations()[j].id, format_short(c),
             format_short(panel.n_stations() * c)});
    }
  }
  w.save(join_path(g.output_dir, o.out));

  ArtifactWriter e("exceedances", cfg.value());
  e.meta("k", std::to_string(process.k));
  e.meta("threshold", format_short(process.threshold));
  e.columns({"day", "date", "station", "t", "value"});
  for (const auto& rec : process.records) {
    e.row({std::to_string(rec.day), panel.dates()[rec.day].to_string(),
           panel.stations()[rec.station].id, format_short(rec.time),
           format_short(rec.value)});
  }
  e.save(join_path(g.output_dir, o.exceedances_out));
}

void run_test_trend(const GlobalOptions& g, const TestTrendOptions& o) {
  std::string panel_path = resolve_panel(g, o.panel);
  ConfigHash cfg("test-trend");
  cfg.add_file("panel", panel_path);
  cfg.add("k", o.k);
  cfg.add("mode", o.mode);
  cfg.add("alpha", o.alpha);
  ObservationPanel panel = load_panel_artifact(panel_path);
  ExceedanceProcess process = extract_exceedances(panel, o.k);
  TrendTestReport report =
      run_trend_tests(process, null_mode_from_string(o.mode), o.alpha);

  ArtifactWriter w("trend_tests", cfg.value());
  w.meta("mode", to_string(report.mode));
  w.meta("alpha", format_short(report.alpha));
  w.meta("bonferroni_level", format_short(report.alpha / report.n_stations));
  w.meta("k", std::to_string(report.k));
  w.meta("any_space_reject", report.any_space_reject ? "1" : "0");
  w.meta("any_time_reject", report.any_time_reject ? "1" : "0");
  w.columns({"station", "test", "c_total", "statistic", "z", "sigma_star",
             "p_value", "reject"});
  auto emit = [&](const std::vector<StationTestResult>& rs, const char* test) {
    for (const auto& r : rs) {
      w.row({panel.stations()[r.station].id, test, format_short(r.c_total),
             format_short(r.statistic), format_short(r.z),
             format_short(r.sigma_star), format_short(r.p_value),
             r.reject ? "1" : "0"});
    }
  };
  emit(report.space, "space");
  emit(report.time, "time");
  w.save(join_path(g.output_dir, o.out));
}

void run_homogenize(const GlobalOptions& g, const HomogenizeOptions& o) {
  std::string panel_path = resolve_panel(g, o.panel);
  ConfigHash cfg("homogenize");
  cfg.add_file("panel", panel_path);
  cfg.add("k", o.k);
  cfg.add("bandwidth", o.bandwidth);
  ObservationPanel panel = load_panel_artifact(panel_path);
  HomogenizedSample hs = homogenize_panel(panel, o.k, o.bandwidth, g.threads);

  ArtifactWriter w("homogenized", cfg.value());
  w.meta("k", std::to_string(hs.tail.k));
  w.meta("threshold", format_short(hs.tail.threshold));
  w.meta("gamma", format_short(hs.tail.gamma_hat));
  w.meta("scale", format_short(hs.tail.scale_hat));
  w.meta("bandwidth", format_short(hs.bandwidth));
  w.meta("z_k", format_short(hs.z_k));
  w.columns({"day", "date", "station", "t", "x", "c", "z"});
  for (int i = 0; i < hs.n_days; ++i) {
    for (int j = 0; j < hs.n_stations; ++j) {
      double x = panel.value(i, j);
      if (std::isnan(x)) continue;
      w.row({std::to_string(i), panel.dates()[i].to_string(),
             panel.stations()[j].id, format_short(hs.times[i]), format_short(x),
             format_short(hs.trend(i, j)), format_short(hs.value(i, j))});
    }
  }
  w.save(join_path(g.output_dir, o.out));

  std::vector<double> pool;
  pool.reserve(hs.z.size());
  for (double v : hs.z) {
    if (!std::isnan(v)) pool.push_back(v);
  }
  std::sort(pool.begin(), pool.end());
  ArtifactWriter q("homog_quantiles", cfg.value());
  q.meta("z_k", format_short(hs.z_k));
  q.columns({"q", "z"});
  for (double qq : {0.5, 0.75, 0.9, 0.95, 0.99, 0.995, 0.999}) {
    q.row({format_short(qq), format_short(empirical_quantile(pool, qq))});
  }
  q.save(join_path(g.output_dir, o.quantiles_out));
}

void run_fit_variogram(const GlobalOptions& g, const FitVariogramOptions& o) {
  std::string panel_path = resolve_panel(g, o.panel);
  ConfigHash cfg("fit-variogram");
  cfg.add_file("panel", panel_path);
  cfg.add("k", o.k);
  cfg.add("bandwidth", o.bandwidth);
  ObservationPanel panel = load_panel_artifact(panel_path);
  HomogenizedSample hs = homogenize_panel(panel, o.k, o.bandwidth, g.threads);
  std::vector<PairDependence> pairs = pairwise_dependence(hs, panel);

  ArtifactWriter pw("dependence_pairs", cfg.value());
  pw.meta("k", std::to_string(hs.tail.k));
  pw.columns({"station_i", "station_j", "dx_km", "dy_km", "distance_km",
              "k_pair", "l_hat", "v_hat", "censored"});
  for (const auto& p : pairs) {
    pw.row({panel.stations()[p.station_i].id, panel.stations()[p.station_j].id,
            format_short(p.dx_km), format_short(p.dy_km),
            format_short(p.distance_km), std::to_string(p.k_pair),
            format_short(p.l_hat),
            std::isinf(p.v_hat) ? "inf" : format_short(p.v_hat),
            p.censored ? "1" : "0"});
  }
  pw.save(join_path(g.output_dir, o.pairs_out));

  VariogramFit fit = fit_variogram(pairs);
  ArtifactWriter w("variogram", cfg.value());
  w.columns({"key", "value"});
  w.row({"b1", format_short(fit.params.b1)});
  w.row({"b2", format_short(fit.params.b2)});
  w.row({"theta", format_short(fit.params.theta)});
  w.row({"alpha", format_short(fit.params.alpha)});
  w.row({"se_b1", format_short(fit.se[0])});
  w.row({"se_b2", format_short(fit.se[1])});
  w.row({"se_theta", format_short(fit.se[2])});
  w.row({"se_alpha", format_short(fit.se[3])});
  w.row({"p_b1", format_short(fit.p_values[0])});
  w.row({"p_b2", format_short(fit.p_values[1])});
  w.row({"p_theta", format_short(fit.p_values[2])});
  w.row({"p_alpha", format_short(fit.p_values[3])});
  w.row({"rss", format_short(fit.rss)});
  w.row({"n_pairs", std::to_string(fit.n_pairs)});
  w.row({"n_censored", std::to_string(fit.n_censored)});
  w.row({"converged", fit.converged ? "1" : "0"});
  w.save(join_path(g.output_dir, o.out));

  ArtifactWriter gw("variogram_grid", cfg.value());
  gw.columns({"bearing_deg", "distance_km", "v"});
  for (int bearing = 0; bearing < 180; bearing += 30) {
    double rad = bearing * kPi / 180.0;
    for (int dist = 5; dist <= 200; dist += 5) {
      double v = variogram_model(fit.params, dist * std::cos(rad),
                                 dist * std::sin(rad));
      gw.row({std::to_string(bearing), std::to_string(dist), format_short(v)});
    }
  }
  gw.save(join_path(g.output_dir, o.grid_out));
}

void run_risk(const GlobalOptions& g, const RiskOptions& o) {
  std::string panel_path = resolve_panel(g, o.panel);
  std::vector<int> ks = o.k_list;
  if (ks.empty()) {
    if (o.k < 1) throw DataError("risk needs --k or --k-list");
    ks.push_back(o.k);
  }
  ConfigHash cfg("risk");
  cfg.add_file("panel", panel_path);
  for (int kk : ks) cfg.add("k", kk);
  cfg.add("bandwidth", o.bandwidth);
  cfg.add("x", o.x);
  cfg.add("t", o.t);
  cfg.add("station", o.station);
  cfg.add("pair", o.pair);
  ObservationPanel panel = load_panel_artifact(panel_path);
  if (!(o.t >= 0.0 && o.t <= 1.0)) throw DataError("risk: --t must lie in [0,1]");

  std::vector<int> marginal_stations;
  if (o.station == "all") {
    for (int j = 0; j < panel.n_stations(); ++j) marginal_stations.push_back(j);
  } else {
    int j = panel.station_index(o.station);
    if (j < 0) throw DataError("risk: unknown station '" + o.station + "'");
    marginal_stations.push_back(j);
  }
  int pair_i = -1, pair_j = -1;
  if (!o.pair.empty()) {
    std::size_t comma = o.pair.find(',');
    if (comma == std::string::npos) {
      throw DataError("risk: --pair expects 'ID1,ID2'");
    }
    pair_i = panel.station_index(o.pair.substr(0, comma));
    pair_j = panel.station_index(o.pair.substr(comma + 1));
    if (pair_i < 0 || pair_j < 0 || pair_i == pair_j) {
      throw DataError("risk: --pair must name two distinct known stations");
    }
  }

  ArtifactWriter w("risk", cfg.value());
  w.meta("x", format_short(o.x));
  w.meta("t", format_short(o.t));
  w.meta("bandwidth", format_short(o.bandwidth));
  w.columns({"k", "kind", "station_i", "station_j", "p", "detail"});
  std::vector<double> day_times(panel.n_days());
  for (int i = 0; i < panel.n_days(); ++i) {
    day_times[i] = static_cast<double>(i + 1) / panel.n_days();
  }
  for (int kk : ks) {
    TailFit tail = fit_tail(panel, kk);
    ExceedanceProcess process = extract_exceedances(panel, kk);
    ScedasisEstimate trend = estimate_c(process, o.bandwidth, day_times, g.threads);
    HomogenizedSample hs = homogenize_panel(panel, tail, process, trend);
    ScedasisEstimate at_t =
        estimate_c(process, o.bandwidth, std::vector<double>{o.t});

    for (int j : marginal_stations) {
      double c = at_t.at(0, j);
      if (c == 0.0) {
        std::cerr << "warning: trend estimate vanishes at t="
                  << format_short(o.t) << " for station "
                  << panel.stations()[j].id
                  << "; marginal probability reported as 0\n";
      }
      double p = marginal_failure_prob(hs, c, o.x);
      w.row({std::to_string(kk), "marginal", panel.stations()[j].id, "",
             format_short(p), format_short(c)});
    }
    if (pair_i >= 0) {
      std::vector<PairDependence> pairs = pairwise_dependence(hs, panel);
      VariogramFit fit = fit_variogram(pairs);
      double dx = 0.0, dy = 0.0;
      for (const auto& p : pairs) {
        if ((p.station_i == pair_i && p.station_j == pair_j) ||
            (p.station_i == pair_j && p.station_j == pair_i)) {
          dx = p.dx_km;
          dy = p.dy_km;
        }
      }
      double v = variogram_model(fit.params, dx, dy);
      double p_i = marginal_failure_prob(hs, at_t.at(0, pair_i), o.x);
      double p_j = marginal_failure_prob(hs, at_t.at(0, pair_j), o.x);
      JointRisk joint = joint_failure_prob(p_i, p_j, v);
      if (joint.clamped) {
        std::cerr << "warning: joint probability clamped to its first-order "
                     "bounds for pair " << panel.stations()[pair_i].id << ","
                  << panel.stations()[pair_j].id << " at k=" << kk << "\n";
      } else if (joint.p == 0.0 && p_i > 0.0 && p_j > 0.0) {
        std::cerr << "warning: joint probability for pair "
                  << panel.stations()[pair_i].id << ","
                  << panel.stations()[pair_j].id << " at k=" << kk
                  << " vanishes at the independence limit; the combination "
                     "formula is a tail first-order approximation\n";
      }
      w.row({std::to_string(kk), "joint", panel.stations()[pair_i].id,
             panel.stations()[pair_j].id, format_short(joint.p),
             format_short(v)});
    }
  }
  w.save(join_path(g.output_dir, o.out));
}

void run_report(const GlobalOptions& g, const ReportOptions& o) {
  std::string panel_path = resolve_panel(g, o.panel);
  ConfigHash cfg("report");
  cfg.add_file("panel", panel_path);
  cfg.add("k", o.k);
  cfg.add("bandwidth", o.bandwidth);
  cfg.add("mode", o.mode);
  cfg.add("alpha", o.alpha);
  ObservationPanel panel = load_panel_artifact(panel_path);

  TailFit tail = fit_tail(panel, o.k);
  ExceedanceProcess process = extract_exceedances(panel, o.k);
  TrendTestReport tests =
      run_trend_tests(process, null_mode_from_string(o.mode), o.alpha);

  std::ostringstream out;
  out << "# stpot report v1\n# config " << cfg.hex() << "\n\n";
  out << "panel: " << panel.n_stations() << " stations x " << panel.n_days()
      << " days (" << season_to_string(panel.season()) << " season), "
      << panel.n_nonmissing() << " values\n";
  out << "dates: " << panel.dates().front().to_string() << " .. "
      << panel.dates().back().to_string() << "\n\n";
  out << "tail fit at k = " << tail.k << "\n";
  out << "  threshold " << format_short(tail.threshold) << "\n";
  out << "  gamma     " << format_short(tail.gamma_hat) << "\n";
  out << "  scale     " << format_short(tail.scale_hat) << "\n\n";
  out << "homogeneity tests (" << to_string(tests.mode) << " null, alpha "
      << format_short(tests.alpha) << ", per-station level "
      << format_short(tests.alpha / tests.n_stations) << ")\n";
  out << "  station      share   space-p   time-p\n";
  for (int j = 0; j < tests.n_stations; ++j) {
    const auto& sp = tests.space[j];
    const auto& tm = tests.time[j];
    char line[160];
    std::snprintf(line, sizeof(line), "  %-10s %7.4f %9.4f%s %8.4f%s\n",
                  panel.stations()[j].id.c_str(), sp.c_total, sp.p_value,
                  sp.reject ? "*" : " ", tm.p_value, tm.reject ? "*" : " ");
    out << line;
  }
  out << "  (* = reject at the Bonferroni level)\n\n";

  try {
    HomogenizedSample hs = homogenize_panel(panel, o.k, o.bandwidth, g.threads);
    std::vector<PairDependence> pairs = pairwise_dependence(hs, panel);
    VariogramFit fit = fit_variogram(pairs);
    out << "anisotropic dependence (" << fit.n_pairs << " pairs, "
        << fit.n_censored << " censored)\n";
    out << "  b1 " << format_short(fit.params.b1) << " (se "
        << format_short(fit.se[0]) << ")\n";
    out << "  b2 " << format_short(fit.params.b2) << " (se "
        << format_short(fit.se[1]) << ")\n";
    out << "  theta " << format_short(fit.params.theta) << " (se "
        << format_short(fit.se[2]) << ")\n";
    out << "  alpha " << format_short(fit.params.alpha) << " (se "
        << format_short(fit.se[3]) << ")\n";
  } catch (const DataError& e) {
    out << "anisotropic dependence: not fitted (" << e.what() << ")\n";
  }

  std::string path = join_path(g.output_dir, o.out);
  std::ofstream file(path);
  if (!file) throw DataError("cannot write artifact '" + path + "'");
  file << out.str();
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"space-time peaks-over-threshold pipeline for non-stationary extremes"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI file");
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--output-dir", g.output_dir, "directory for artifacts")
      ->envname("STPOT_OUTPUT_DIR")
      ->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads for kernel smoothing")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "draw a synthetic panel");
  sim_cmd->add_option("--spec", sim.spec_path, "key = value scenario file")
      ->required();
  sim_cmd->add_option("--out", sim.out, "panel artifact name")
      ->capture_default_str();

  IngestOptions ing;
  auto* ing_cmd = app.add_subcommand("ingest", "build a panel from raw tables");
  ing_cmd->add_option("--stations", ing.stations_path, "station catalog CSV")
      ->required();
  ing_cmd->add_option("--observations", ing.observations_path,
                      "long-format observations CSV")
      ->required();
  ing_cmd->add_option("--season", ing.season, "all, cold or warm")
      ->capture_default_str();
  ing_cmd->add_option("--out", ing.out, "panel artifact name")
      ->capture_default_str();

  DeclusterOptions dec;
  auto* dec_cmd =
      app.add_subcommand("decluster", "thin the panel to isolated event days");
  dec_cmd->add_option("--panel", dec.panel, "input panel artifact");
  dec_cmd->add_option("--lag", dec.lag, "minimum day separation")
      ->required()
      ->check(CLI::NonNegativeNumber);
  dec_cmd->add_option("--target", dec.target, "cap on retained days (0 = all)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  dec_cmd->add_option("--out", dec.out, "output panel artifact name")
      ->capture_default_str();

  FitTailOptions ft;
  auto* ft_cmd = app.add_subcommand("fit-tail", "fit the pooled tail at level k");
  ft_cmd->add_option("--panel", ft.panel, "input panel artifact");
  ft_cmd->add_option("--k", ft.k, "number of upper order statistics")
      ->required()
      ->check(CLI::PositiveNumber);
  ft_cmd->add_option("--k-grid", ft.k_grid, "k values for the stability trace")
      ->delimiter(',');
  ft_cmd->add_option("--out", ft.out, "fit artifact name")->capture_default_str();
  ft_cmd->add_option("--trace-out", ft.trace_out, "stability trace artifact name")
      ->capture_default_str();

  ScedasisOptions sc;
  auto* sc_cmd =
      app.add_subcommand("scedasis", "estimate the space-time trend surface");
  sc_cmd->add_option("--panel", sc.panel, "input panel artifact");
  sc_cmd->add_option("--k", sc.k, "number of upper order statistics")
      ->required()
      ->check(CLI::PositiveNumber);
  sc_cmd->add_option("--bandwidth", sc.bandwidth, "kernel bandwidth in (0,1]")
      ->capture_default_str();
  sc_cmd->add_option("--grid-points", sc.grid_points, "evaluation grid size")
      ->capture_default_str();
  sc_cmd->add_option("--out", sc.out, "trend artifact name")->capture_default_str();
  sc_cmd->add_option("--exceedances-out", sc.exceedances_out,
                     "exceedance list artifact name")
      ->capture_default_str();

  TestTrendOptions tt;
  auto* tt_cmd =
      app.add_subcommand("test-trend", "test space and time homogeneity");
  tt_cmd->add_option("--panel", tt.panel, "input panel artifact");
  tt_cmd->add_option("--k", tt.k, "number of upper order statistics")
      ->required()
      ->check(CLI::PositiveNumber);
  tt_cmd->add_option("--mode", tt.mode, "null calibration: max-sd or independence")
      ->capture_default_str();
  tt_cmd->add_option("--alpha", tt.alpha, "family-wise test level")
      ->capture_default_str();
  tt_cmd->add_option("--out", tt.out, "test table artifact name")
      ->capture_default_str();

  HomogenizeOptions ho;
  auto* ho_cmd =
      app.add_subcommand("homogenize", "map the panel to the stationary scale");
  ho_cmd->add_option("--panel", ho.panel, "input panel artifact");
  ho_cmd->add_option("--k", ho.k, "number of upper order statistics")
      ->required()
      ->check(CLI::PositiveNumber);
  ho_cmd->add_option("--bandwidth", ho.bandwidth, "kernel bandwidth in (0,1]")
      ->capture_default_str();
  ho_cmd->add_option("--out", ho.out, "homogenized sample artifact name")
      ->capture_default_str();
  ho_cmd->add_option("--quantiles-out", ho.quantiles_out,
                     "pooled quantile artifact name")
      ->capture_default_str();

  FitVariogramOptions fv;
  auto* fv_cmd = app.add_subcommand("fit-variogram",
                                    "fit the anisotropic extremal dependence");
  fv_cmd->add_option("--panel", fv.panel, "input panel artifact");
  fv_cmd->add_option("--k", fv.k, "number of upper order statistics")
      ->required()
      ->check(CLI::PositiveNumber);
  fv_cmd->add_option("--bandwidth", fv.bandwidth, "kernel bandwidth in (0,1]")
      ->capture_default_str();
  fv_cmd->add_option("--out", fv.out, "variogram fit artifact name")
      ->capture_default_str();
  fv_cmd->add_option("--pairs-out", fv.pairs_out, "pairwise table artifact name")
      ->capture_default_str();
  fv_cmd->add_option("--grid-out", fv.grid_out,
                     "fitted variogram grid artifact name")
      ->capture_default_str();

  RiskOptions rk;
  auto* rk_cmd =
      app.add_subcommand("risk", "failure probabilities at a load level");
  rk_cmd->add_option("--panel", rk.panel, "input panel artifact");
  rk_cmd->add_option("--k", rk.k, "number of upper order statistics")
      ->check(CLI::PositiveNumber);
  rk_cmd->add_option("--k-list", rk.k_list, "several k values (sensitivity)")
      ->delimiter(',');
  rk_cmd->add_option("--bandwidth", rk.bandwidth, "kernel bandwidth in (0,1]")
      ->capture_default_str();
  rk_cmd->add_option("--x", rk.x, "load level of interest")->required();
  rk_cmd->add_option("--t", rk.t, "time point in [0,1]")->capture_default_str();
  rk_cmd->add_option("--station", rk.station, "station id or 'all'")
      ->capture_default_str();
  rk_cmd->add_option("--pair", rk.pair, "two station ids, comma separated");
  rk_cmd->add_option("--out", rk.out, "risk table artifact name")
      ->capture_default_str();

  ReportOptions rp;
  auto* rp_cmd = app.add_subcommand("report", "plain-text pipeline summary");
  rp_cmd->add_option("--panel", rp.panel, "input panel artifact");
  rp_cmd->add_option("--k", rp.k, "number of upper order statistics")
      ->required()
      ->check(CLI::PositiveNumber);
  rp_cmd->add_option("--bandwidth", rp.bandwidth, "kernel bandwidth in (0,1]")
      ->capture_default_str();
  rp_cmd->add_option("--mode", rp.mode, "null calibration: max-sd or independence")
      ->capture_default_str();
  rp_cmd->add_option("--alpha", rp.alpha, "family-wise test level")
      ->capture_default_str();
  rp_cmd->add_option("--out", rp.out, "report file name")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim_cmd->parsed()) run_simulate(g, sim);
    if (ing_cmd->parsed()) run_ingest(g, ing);
    if (dec_cmd->parsed()) run_decluster(g, dec);
    if (ft_cmd->parsed()) run_fit_tail(g, ft);
    if (sc_cmd->parsed()) run_scedasis(g, sc);
    if (tt_cmd->parsed()) run_test_trend(g, tt);
    if (ho_cmd->parsed()) run_homogenize(g, ho);
    if (fv_cmd->parsed()) run_fit_variogram(g, fv);
    if (rk_cmd->parsed()) run_risk(g, rk);
    if (rp_cmd->parsed()) run_report(g, rp);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace stpot::cli
