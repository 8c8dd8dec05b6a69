#include "stpot/panel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "stpot/error.hpp"

namespace stpot {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kEarthRadiusKm = 6371.0;
constexpr double kPi = 3.14159265358979323846;

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, delim)) out.push_back(trim(field));
  if (!line.empty() && line.back() == delim) out.push_back("");
  return out;
}

char sniff_delimiter(const std::string& header) {
  if (header.find(';') != std::string::npos) return ';';
  if (header.find('\t') != std::string::npos) return '\t';
  return ',';
}

double parse_double(const std::string& s, const std::string& context) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw DataError("could not parse number '" + s + "' in " + context);
  }
  return v;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool in_season(const Date& d, Season season) {
  switch (season) {
    case Season::all:
      return true;
    case Season::cold:
      return d.month >= 11 || d.month <= 3;
    case Season::warm:
      return d.month >= 5 && d.month <= 9;
  }
  return true;
}

}  // namespace

Season season_from_string(const std::string& name) {
  if (name == "all") return Season::all;
  if (name == "cold") return Season::cold;
  if (name == "warm") return Season::warm;
  throw DataError("unknown season '" + name + "' (expected all, cold or warm)");
}

std::string season_to_string(Season season) {
  switch (season) {
    case Season::all: return "all";
    case Season::cold: return "cold";
    case Season::warm: return "warm";
  }
  return "all";
}

long long Date::serial() const {
  std::chrono::year_month_day ymd{std::chrono::year{year},
                                  std::chrono::month{static_cast<unsigned>(month)},
                                  std::chrono::day{static_cast<unsigned>(day)}};
  return std::chrono::sys_days{ymd}.time_since_epoch().count();
}

bool Date::valid() const {
  if (month < 1 || month > 12 || day < 1 || day > 31) return false;
  std::chrono::year_month_day ymd{std::chrono::year{year},
                                  std::chrono::month{static_cast<unsigned>(month)},
                                  std::chrono::day{static_cast<unsigned>(day)}};
  return ymd.ok();
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

Date Date::parse(const std::string& text) {
  Date d;
  char extra = 0;
  if (std::sscanf(text.c_str(), "%d-%d-%d%c", &d.year, &d.month, &d.day, &extra) != 3 ||
      !d.valid()) {
    throw DataError("invalid date '" + text + "' (expected YYYY-MM-DD)");
  }
  return d;
}

ObservationPanel::ObservationPanel(std::vector<StationRecord> stations,
                                   std::vector<Date> dates,
                                   std::vector<double> values, Season season)
    : stations_(std::move(stations)),
      dates_(std::move(dates)),
      values_(std::move(values)),
      season_(season) {
  if (values_.size() != dates_.size() * stations_.size()) {
    throw DataError("panel value matrix does not match dates x stations");
  }
}

bool ObservationPanel::is_missing(int day, int station) const {
  return std::isnan(value(day, station));
}

long long ObservationPanel::n_nonmissing() const {
  long long count = 0;
  for (double v : values_) {
    if (!std::isnan(v)) ++count;
  }
  return count;
}

void ObservationPanel::set_planar_km(std::vector<std::array<double, 2>> coords) {
  if (coords.size() != stations_.size()) {
    throw DataError("planar coordinate count does not match station count");
  }
  planar_km_ = std::move(coords);
}

int ObservationPanel::station_index(const std::string& id) const {
  for (std::size_t j = 0; j < stations_.size(); ++j) {
    if (stations_[j].id == id) return static_cast<int>(j);
  }
  return -1;
}

std::vector<StationRecord> load_stations(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw DataError("station catalog is empty");
  char delim = sniff_delimiter(header);

  std::vector<StationRecord> out;
  std::unordered_set<std::string> seen;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split(line, delim);
    if (fields.size() < 5) {
      throw DataError("station catalog line " + std::to_string(line_no) +
                      ": expected id, name, longitude, latitude, altitude");
    }
    StationRecord rec;
    rec.id = fields[0];
    rec.name = fields[1];
    rec.longitude_deg = parse_double(fields[2], "station " + rec.id + " longitude");
    rec.latitude_deg = parse_double(fields[3], "station " + rec.id + " latitude");
    rec.altitude_m = parse_double(fields[4], "station " + rec.id + " altitude");
    if (rec.id.empty()) {
      throw DataError("station catalog line " + std::to_string(line_no) + ": empty id");
    }
    if (!seen.insert(rec.id).second) {
      throw DataError("duplicate station id '" + rec.id + "' in catalog");
    }
    if (rec.longitude_deg < -180.0 || rec.longitude_deg > 180.0 ||
        rec.latitude_deg < -90.0 || rec.latitude_deg > 90.0) {
      throw DataError("station '" + rec.id + "' has coordinates outside " +
                      "[-180,180] x [-90,90]");
    }
    out.push_back(std::move(rec));
  }
  if (out.empty()) throw DataError("station catalog has no stations");
  return out;
}

std::vector<StationRecord> load_stations_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open station catalog '" + path + "'");
  return load_stations(in);
}

ObservationPanel load_observations(std::istream& in,
                                   const std::vector<StationRecord>& stations) {
  std::unordered_map<std::string, int> index;
  for (std::size_t j = 0; j < stations.size(); ++j) {
    index.emplace(stations[j].id, static_cast<int>(j));
  }

  std::string header;
  if (!std::getline(in, header)) throw DataError("observation file is empty");
  char delim = sniff_delimiter(header);

  struct Cell {
    long long date_serial;
    int station;
    double value;
  };
  std::vector<Cell> cells;
  std::map<long long, Date> dates_by_serial;

  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split(line, delim);
    if (fields.size() < 3) {
      throw DataError("observation line " + std::to_string(line_no) +
                      ": expected station_id, date, value");
    }
    auto it = index.find(fields[0]);
    if (it == index.end()) {
      throw DataError("observation line " + std::to_string(line_no) +
                      ": unknown station id '" + fields[0] + "'");
    }
    Date date = Date::parse(fields[1]);

    double v = kNaN;
    if (!fields[2].empty() && fields[2] != "NA") {
      v = parse_double(fields[2], "observation line " + std::to_string(line_no));
      if (v < 0.0) {
        throw DataError("observation line " + std::to_string(line_no) +
                        ": negative value " + fields[2]);
      }
    }
    if (fields.size() >= 4 && !fields[3].empty()) {
      double flag = parse_double(fields[3], "quality flag, line " + std::to_string(line_no));
      if (flag != 0.0) v = kNaN;
    }

    long long serial = date.serial();
    dates_by_serial.emplace(serial, date);
    cells.push_back({serial, it->second, v});
  }
  if (cells.empty()) throw DataError("observation file has no data rows");

  std::vector<Date> dates;
  std::unordered_map<long long, int> day_of;
  dates.reserve(dates_by_serial.size());
  for (const auto& [serial, date] : dates_by_serial) {
    day_of.emplace(serial, static_cast<int>(dates.size()));
    dates.push_back(date);
  }

  const std::size_t m = stations.size();
  std::vector<double> values(dates.size() * m, kNaN);
  std::vector<bool> filled(dates.size() * m, false);
  for (const Cell& cell : cells) {
    std::size_t slot = static_cast<std::size_t>(day_of[cell.date_serial]) * m +
                       static_cast<std::size_t>(cell.station);
    if (filled[slot]) {
      throw DataError("duplicate observation for station '" +
                      stations[cell.station].id + "' on " +
                      dates_by_serial[cell.date_serial].to_string());
    }
    filled[slot] = true;
    values[slot] = cell.value;
  }

  return ObservationPanel(stations, std::move(dates), std::move(values));
}

ObservationPanel load_observations_file(const std::string& path,
                                        const std::vector<StationRecord>& stations) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open observation file '" + path + "'");
  return load_observations(in, stations);
}

ObservationPanel select_season(const ObservationPanel& panel, Season season) {
  if (season == Season::all) return panel;

  std::vector<int> keep;
  for (int i = 0; i < panel.n_days(); ++i) {
    if (in_season(panel.dates()[i], season)) keep.push_back(i);
  }
  if (keep.empty()) {
    throw DataError("no day of the panel falls in season '" +
                    season_to_string(season) + "'");
  }

  const int m = panel.n_stations();
  std::vector<Date> dates;
  dates.reserve(keep.size());
  std::vector<double> values;
  values.reserve(keep.size() * m);
  for (int i : keep) {
    dates.push_back(panel.dates()[i]);
    for (int j = 0; j < m; ++j) values.push_back(panel.value(i, j));
  }
  ObservationPanel out(panel.stations(), std::move(dates), std::move(values), season);
  if (panel.has_planar_coordinates()) out.set_planar_km(panel.planar_km());
  return out;
}

ObservationPanel project_coordinates(const ObservationPanel& panel) {
  const auto& stations = panel.stations();
  if (stations.empty()) throw DataError("cannot project an empty station set");

  double lon0 = 0.0, lat0 = 0.0;
  for (const auto& s : stations) {
    lon0 += s.longitude_deg;
    lat0 += s.latitude_deg;
  }
  lon0 /= static_cast<double>(stations.size());
  lat0 /= static_cast<double>(stations.size());

  const double to_rad = kPi / 180.0;
  const double cos_lat0 = std::cos(lat0 * to_rad);
  std::vector<std::array<double, 2>> coords;
  coords.reserve(stations.size());
  for (const auto& s : stations) {
    double x = kEarthRadiusKm * cos_lat0 * (s.longitude_deg - lon0) * to_rad;
    double y = kEarthRadiusKm * (s.latitude_deg - lat0) * to_rad;
    coords.push_back({x, y});
  }

  ObservationPanel out = panel;
  out.set_planar_km(std::move(coords));
  return out;
}

void write_panel(std::ostream& out, const ObservationPanel& panel,
                 const std::string& config_hash) {
  out << "# stpot panel v1\n";
  out << "# config_hash: " << config_hash << "\n";
  out << "# season: " << season_to_string(panel.season()) << "\n";
  out << "# stations: " << panel.n_stations() << "\n";
  out << "# days: " << panel.n_days() << "\n";
  out << "# projected: " << (panel.has_planar_coordinates() ? 1 : 0) << "\n";
  for (int j = 0; j < panel.n_stations(); ++j) {
    const auto& s = panel.stations()[j];
    out << s.id << '\t' << s.name << '\t' << format_double(s.longitude_deg) << '\t'
        << format_double(s.latitude_deg) << '\t' << format_double(s.altitude_m);
    if (panel.has_planar_coordinates()) {
      out << '\t' << format_double(panel.planar_km()[j][0]) << '\t'
          << format_double(panel.planar_km()[j][1]);
    }
    out << '\n';
  }
  for (int i = 0; i < panel.n_days(); ++i) {
    out << panel.dates()[i].to_string();
    for (int j = 0; j < panel.n_stations(); ++j) {
      out << '\t' << format_double(panel.value(i, j));
    }
    out << '\n';
  }
}

void write_panel_file(const std::string& path, const ObservationPanel& panel,
                      const std::string& config_hash) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write panel cache '" + path + "'");
  write_panel(out, panel, config_hash);
}

ObservationPanel read_panel(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# stpot panel v1", 0) != 0) {
    throw DataError("not a panel cache (missing '# stpot panel v1' header)");
  }
  Season season = Season::all;
  int m = -1, n = -1, projected = 0;
  while (in.peek() == '#') {
    std::getline(in, line);
    std::stringstream ss(line);
    std::string hash_key, value;
    ss >> hash_key >> value;
    if (value == "season:") {
      std::string s;
      ss >> s;
      season = season_from_string(s);
    } else if (value == "stations:") {
      ss >> m;
    } else if (value == "days:") {
      ss >> n;
    } else if (value == "projected:") {
      ss >> projected;
    }
  }
  if (m <= 0 || n < 0) throw DataError("panel cache header lacks station or day counts");

  std::vector<StationRecord> stations;
  std::vector<std::array<double, 2>> coords;
  for (int j = 0; j < m; ++j) {
    if (!std::getline(in, line)) throw DataError("panel cache truncated in station block");
    auto f = split(line, '\t');
    std::size_t expect = projected ? 7 : 5;
    if (f.size() != expect) {
      throw DataError("panel cache station line has " + std::to_string(f.size()) +
                      " fields, expected " + std::to_string(expect));
    }
    StationRecord rec;
    rec.id = f[0];
    rec.name = f[1];
    rec.longitude_deg = parse_double(f[2], "cached station " + rec.id);
    rec.latitude_deg = parse_double(f[3], "cached station " + rec.id);
    rec.altitude_m = parse_double(f[4], "cached station " + rec.id);
    if (projected) {
      coords.push_back({parse_double(f[5], "cached station " + rec.id),
                        parse_double(f[6], "cached station " + rec.id)});
    }
    stations.push_back(std::move(rec));
  }

  std::vector<Date> dates;
  dates.reserve(n);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n) * m);
  for (int i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw DataError("panel cache truncated in value block");
    auto f = split(line, '\t');
    if (static_cast<int>(f.size()) != m + 1) {
      throw DataError("panel cache value line has " + std::to_string(f.size()) +
                      " fields, expected " + std::to_string(m + 1));
    }
    dates.push_back(Date::parse(f[0]));
    for (int j = 1; j <= m; ++j) {
      values.push_back(f[j] == "NA" ? kNaN : parse_double(f[j], "cached value"));
    }
  }

  ObservationPanel panel(std::move(stations), std::move(dates), std::move(values), season);
  if (projected) panel.set_planar_km(std::move(coords));
  return panel;
}

ObservationPanel read_panel_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open panel cache '" + path +
                    "' (run the ingest stage first)");
  }
  return read_panel(in);
}

}  // namespace stpot
