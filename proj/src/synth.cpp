#include "stpot/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "stpot/error.hpp"
#include "stpot/numerics.hpp"

namespace stpot {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Substream index reserved for the station layout; day indices stay below.
constexpr std::uint64_t kLayoutStream = 0x100000000ULL;

bool gamma_is_zero(double gamma) { return std::fabs(gamma) < 1e-12; }

double trend_shape(const SynthSpec& spec, double t) {
  switch (spec.trend) {
    case TrendFamily::constant:
    case TrendFamily::station_weights:
      return 1.0;
    case TrendFamily::linear:
      return spec.trend_a + spec.trend_b * t;
    case TrendFamily::sinusoid:
      return 1.0 + spec.trend_a * std::sin(2.0 * kPi * t + spec.trend_b);
  }
  return 1.0;
}

double trend_shape_integral(const SynthSpec& spec) {
  switch (spec.trend) {
    case TrendFamily::constant:
    case TrendFamily::station_weights:
      return 1.0;
    case TrendFamily::linear:
      return spec.trend_a + 0.5 * spec.trend_b;
    case TrendFamily::sinusoid:
      return 1.0;  // the sine integrates to zero over a full period
  }
  return 1.0;
}

double station_weight(const SynthSpec& spec, int station) {
  if (spec.station_weights.empty()) return 1.0;
  return spec.station_weights[station];
}

double weight_sum(const SynthSpec& spec) {
  if (spec.station_weights.empty()) return static_cast<double>(spec.n_stations);
  double s = 0.0;
  for (double w : spec.station_weights) s += w;
  return s;
}

/** Inverse of the cell survival function at survival level v. */
double cell_inverse(const SynthSpec& spec, double c, double v) {
  if (v < c) {
    double w = v / c;  // latent survival level, in (0, 1)
    if (gamma_is_zero(spec.gamma)) {
      return spec.location + spec.scale * std::log(1.0 / w);
    }
    return spec.location +
           spec.scale * (std::pow(w, -spec.gamma) - 1.0) / spec.gamma;
  }
  // Linear bulk on (0, location).
  return spec.location * (1.0 - (v - c) / (1.0 - c));
}

}  // namespace

void validate_spec(const SynthSpec& spec) {
  if (spec.n_days < 1) throw DataError("synth: n_days must be >= 1");
  if (spec.n_stations < 1) throw DataError("synth: n_stations must be >= 1");
  if (!(spec.scale > 0.0)) throw DataError("synth: scale must be positive");
  if (!(spec.location > 0.0)) throw DataError("synth: location must be positive");
  if (spec.trend == TrendFamily::linear) {
    if (!(spec.trend_a > 0.0) || !(spec.trend_a + spec.trend_b > 0.0)) {
      throw DataError("synth: linear trend must stay positive on [0,1]");
    }
  }
  if (spec.trend == TrendFamily::sinusoid && !(std::fabs(spec.trend_a) < 1.0)) {
    throw DataError("synth: sinusoid amplitude must satisfy |a| < 1");
  }
  if (!spec.station_weights.empty()) {
    if (static_cast<int>(spec.station_weights.size()) != spec.n_stations) {
      throw DataError("synth: station_weights size must equal n_stations");
    }
    for (double w : spec.station_weights) {
      if (!(w > 0.0)) throw DataError("synth: station weights must be positive");
    }
  }
  if (spec.dependence == DependenceKind::gaussian_copula) {
    std::size_t mm = static_cast<std::size_t>(spec.n_stations) * spec.n_stations;
    if (spec.rho.size() != mm) {
      throw DataError("synth: gaussian copula needs an n_stations^2 rho matrix");
    }
    for (int i = 0; i < spec.n_stations; ++i) {
      if (std::fabs(spec.rho[i * spec.n_stations + i] - 1.0) > 1e-12) {
        throw DataError("synth: rho must have unit diagonal");
      }
      for (int j = 0; j < i; ++j) {
        double a = spec.rho[i * spec.n_stations + j];
        double b = spec.rho[j * spec.n_stations + i];
        if (std::fabs(a - b) > 1e-12 || std::fabs(a) > 1.0) {
          throw DataError("synth: rho must be symmetric with entries in [-1,1]");
        }
      }
    }
  }
  // The cell survival at the base level is c(t,s); it cannot exceed 1.
  // Exactly 1 is legal (the whole cell distribution is the tail branch).
  double peak_shape = 0.0;
  for (int i = 0; i <= 100; ++i) {
    peak_shape = std::max(peak_shape, trend_shape(spec, i / 100.0));
  }
  double wmax = 0.0;
  for (int j = 0; j < spec.n_stations; ++j) {
    wmax = std::max(wmax, station_weight(spec, j));
  }
  double cmax = wmax * peak_shape / (weight_sum(spec) * trend_shape_integral(spec));
  if (cmax > 1.0) {
    throw DataError("synth: trend surface peaks above cell mass 1; "
                    "the tail representation breaks down");
  }
}

double true_trend(const SynthSpec& spec, double t, int station) {
  return station_weight(spec, station) * trend_shape(spec, t) /
         (weight_sum(spec) * trend_shape_integral(spec));
}

double true_tail(const SynthSpec& spec, double x) {
  if (x < spec.location) return 1.0;
  if (gamma_is_zero(spec.gamma)) {
    return std::exp(-(x - spec.location) / spec.scale);
  }
  double base = 1.0 + spec.gamma * (x - spec.location) / spec.scale;
  if (base <= 0.0) return 0.0;  // beyond the finite endpoint for gamma < 0
  return std::pow(base, -1.0 / spec.gamma);
}

double true_tail_quantile(const SynthSpec& spec, double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("true_tail_quantile: p must lie in (0, 1]");
  }
  if (gamma_is_zero(spec.gamma)) {
    return spec.location + spec.scale * std::log(1.0 / p);
  }
  return spec.location + spec.scale * (std::pow(p, -spec.gamma) - 1.0) / spec.gamma;
}

ObservationPanel simulate_panel(const SynthSpec& spec) {
  validate_spec(spec);
  const int n = spec.n_days;
  const int m = spec.n_stations;

  // Station layout: deterministic scatter in the lon/lat box.
  std::vector<StationRecord> stations;
  stations.reserve(m);
  std::uint64_t layout = substream_seed(spec.seed, kLayoutStream);
  for (int j = 0; j < m; ++j) {
    StationRecord rec;
    char id[16];
    std::snprintf(id, sizeof(id), "S%03d", j + 1);
    rec.id = id;
    rec.name = std::string("synthetic-") + id;
    rec.longitude_deg = spec.box_lon_min +
                        (spec.box_lon_max - spec.box_lon_min) * uniform_open01(layout);
    rec.latitude_deg = spec.box_lat_min +
                       (spec.box_lat_max - spec.box_lat_min) * uniform_open01(layout);
    rec.altitude_m = 0.0;
    stations.push_back(std::move(rec));
  }

  std::vector<double> chol;
  if (spec.dependence == DependenceKind::gaussian_copula) {
    chol = spec.rho;
    if (!cholesky_factor(chol, m)) {
      throw DataError("synth: rho matrix is not positive definite");
    }
  }

  const Date start{2000, 1, 1};
  const long long start_serial = start.serial();
  std::vector<Date> dates(n);
  for (int i = 0; i < n; ++i) {
    std::chrono::sys_days sd{std::chrono::days{start_serial + i}};
    std::chrono::year_month_day ymd{sd};
    dates[i] = Date{static_cast<int>(ymd.year()),
                    static_cast<int>(static_cast<unsigned>(ymd.month())),
                    static_cast<int>(static_cast<unsigned>(ymd.day()))};
  }

  std::vector<double> values(static_cast<std::size_t>(n) * m);
  std::vector<double> xi(m), z(m);
  for (int i = 0; i < n; ++i) {
    std::uint64_t stream = substream_seed(spec.seed, static_cast<std::uint64_t>(i));
    double t = static_cast<double>(i + 1) / static_cast<double>(n);

    double shared = 0.0;
    if (spec.dependence == DependenceKind::comonotone) {
      shared = uniform_open01(stream);
    } else if (spec.dependence == DependenceKind::gaussian_copula) {
      for (int j = 0; j < m; ++j) {
        xi[j] = std_normal_quantile(uniform_open01(stream));
      }
      for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (int l = 0; l <= j; ++l) s += chol[j * m + l] * xi[l];
        z[j] = s;
      }
    }

    for (int j = 0; j < m; ++j) {
      double v;
      switch (spec.dependence) {
        case DependenceKind::independent:
          v = uniform_open01(stream);
          break;
        case DependenceKind::comonotone:
          v = shared;
          break;
        case DependenceKind::gaussian_copula:
        default:
          v = std_normal_cdf(z[j]);  // survival level; largest values hit the tail
          break;
      }
      double c = true_trend(spec, t, j);
      values[static_cast<std::size_t>(i) * m + j] = cell_inverse(spec, c, v);
    }
  }

  ObservationPanel panel(std::move(stations), std::move(dates), std::move(values));
  return project_coordinates(panel);
}

namespace {

/** P(X1 > z, X2 > z) for standard bivariate normal with correlation rho,
 *  by Simpson quadrature of phi(x) * (1 - Phi((z - rho x)/sqrt(1-rho^2))). */
double bivariate_upper_orthant(double z, double rho) {
  if (rho >= 1.0 - 1e-14) return 1.0 - std_normal_cdf(z);
  if (rho <= -1.0 + 1e-14) {
    return std::max(0.0, 1.0 - 2.0 * std_normal_cdf(z));
  }
  const double denom = std::sqrt(1.0 - rho * rho);
  const double hi = std::max(z, 0.0) + 10.0;
  const int steps = 4000;  // Simpson needs an even count
  const double h = (hi - z) / steps;
  auto f = [&](double x) {
    return std_normal_pdf(x) * (1.0 - std_normal_cdf((z - rho * x) / denom));
  };
  double sum = f(z) + f(hi);
  for (int i = 1; i < steps; ++i) {
    sum += f(z + i * h) * ((i % 2) ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

}  // namespace

double true_pair_L(const SynthSpec& spec, int station_i, int station_j,
                   double threshold_fraction) {
  if (station_i < 0 || station_j < 0 || station_i >= spec.n_stations ||
      station_j >= spec.n_stations || station_i == station_j) {
    throw std::invalid_argument("true_pair_L: invalid station pair");
  }
  switch (spec.dependence) {
    case DependenceKind::comonotone:
      return 1.0;
    case DependenceKind::independent:
      return threshold_fraction > 0.0 ? 2.0 - threshold_fraction : 2.0;
    case DependenceKind::gaussian_copula:
      break;
  }
  double rho = spec.rho[station_i * spec.n_stations + station_j];
  if (rho >= 1.0 - 1e-14) return 1.0;
  if (threshold_fraction <= 0.0) return 2.0;  // Gaussian copulas are tail independent
  double q = threshold_fraction;
  double z = std_normal_quantile(1.0 - q);
  double both = bivariate_upper_orthant(z, rho);
  return (2.0 * q - both) / q;
}

SynthSpec parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open synth spec '" + path + "'");

  SynthSpec spec;
  double rho_equi = -2.0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      bool blank = line.find_first_not_of(" \t\r\n") == std::string::npos;
      if (blank) continue;
      throw DataError("synth spec line " + std::to_string(line_no) +
                      ": expected key = value");
    }
    auto strip = [](std::string s) {
      std::size_t b = s.find_first_not_of(" \t\r\n");
      if (b == std::string::npos) return std::string();
      std::size_t e = s.find_last_not_of(" \t\r\n");
      return s.substr(b, e - b + 1);
    };
    std::string key = strip(line.substr(0, eq));
    std::string value = strip(line.substr(eq + 1));
    auto as_double = [&](const std::string& v) {
      try {
        return std::stod(v);
      } catch (const std::exception&) {
        throw DataError("synth spec line " + std::to_string(line_no) +
                        ": bad number '" + v + "'");
      }
    };

    if (key == "n_days") spec.n_days = static_cast<int>(as_double(value));
    else if (key == "n_stations") spec.n_stations = static_cast<int>(as_double(value));
    else if (key == "gamma") spec.gamma = as_double(value);
    else if (key == "location") spec.location = as_double(value);
    else if (key == "scale") spec.scale = as_double(value);
    else if (key == "trend") {
      if (value == "constant") spec.trend = TrendFamily::constant;
      else if (value == "linear") spec.trend = TrendFamily::linear;
      else if (value == "sinusoid") spec.trend = TrendFamily::sinusoid;
      else if (value == "station_weights") spec.trend = TrendFamily::station_weights;
      else throw DataError("synth spec: unknown trend family '" + value + "'");
    } else if (key == "trend_a") spec.trend_a = as_double(value);
    else if (key == "trend_b") spec.trend_b = as_double(value);
    else if (key == "station_weights") {
      spec.station_weights.clear();
      std::stringstream ss(value);
      std::string tok;
      while (std::getline(ss, tok, ',')) spec.station_weights.push_back(as_double(strip(tok)));
    } else if (key == "dependence") {
      if (value == "independent") spec.dependence = DependenceKind::independent;
      else if (value == "comonotone") spec.dependence = DependenceKind::comonotone;
      else if (value == "gaussian_copula") spec.dependence = DependenceKind::gaussian_copula;
      else throw DataError("synth spec: unknown dependence kind '" + value + "'");
    } else if (key == "rho") {
      rho_equi = as_double(value);
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(std::stoull(value));
    } else if (key == "box_lon_min") spec.box_lon_min = as_double(value);
    else if (key == "box_lon_max") spec.box_lon_max = as_double(value);
    else if (key == "box_lat_min") spec.box_lat_min = as_double(value);
    else if (key == "box_lat_max") spec.box_lat_max = as_double(value);
    else throw DataError("synth spec: unknown key '" + key + "'");
  }

  if (spec.dependence == DependenceKind::gaussian_copula) {
    if (rho_equi <= -1.0 || rho_equi >= 1.0) {
      throw DataError("synth spec: gaussian_copula needs rho in (-1, 1)");
    }
    int m = spec.n_stations;
    spec.rho.assign(static_cast<std::size_t>(m) * m, rho_equi);
    for (int j = 0; j < m; ++j) spec.rho[j * m + j] = 1.0;
  }
  validate_spec(spec);
  return spec;
}

}  // namespace stpot
