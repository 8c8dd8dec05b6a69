#ifndef STPOT_PANEL_HPP
#define STPOT_PANEL_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace stpot {

struct StationRecord {
  std::string id;
  std::string name;
  double longitude_deg = 0.0;
  double latitude_deg = 0.0;
  double altitude_m = 0.0;
};

enum class Season { all, cold, warm };

Season season_from_string(const std::string& name);
std::string season_to_string(Season season);

/** Calendar date with day arithmetic on the proleptic Gregorian calendar. */
struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  /** Days since 1970-01-01; the basis for calendar distances. */
  long long serial() const;
  bool valid() const;
  std::string to_string() const;
  static Date parse(const std::string& text);

  friend bool operator==(const Date&, const Date&) = default;
};

/** Daily values on a fixed station set.  Rows are days in increasing date
 *  order, columns are stations; missing observations are stored as NaN.
 *  Instances are immutable after assembly and safe to share across threads. */
class ObservationPanel {
 public:
  ObservationPanel() = default;
  ObservationPanel(std::vector<StationRecord> stations, std::vector<Date> dates,
                   std::vector<double> values, Season season = Season::all);

  int n_days() const { return static_cast<int>(dates_.size()); }
  int n_stations() const { return static_cast<int>(stations_.size()); }

  double value(int day, int station) const {
    return values_[static_cast<std::size_t>(day) * stations_.size() + station];
  }
  bool is_missing(int day, int station) const;

  const std::vector<StationRecord>& stations() const { return stations_; }
  const std::vector<Date>& dates() const { return dates_; }
  const std::vector<double>& values() const { return values_; }
  Season season() const { return season_; }

  /** Number of non-missing cells; the pooled sample size for tail fits. */
  long long n_nonmissing() const;

  bool has_planar_coordinates() const { return !planar_km_.empty(); }
  /** Planar station coordinates (x east, y north) in km; set by
   *  project_coordinates. */
  const std::vector<std::array<double, 2>>& planar_km() const { return planar_km_; }
  void set_planar_km(std::vector<std::array<double, 2>> coords);

  int station_index(const std::string& id) const;  // -1 when absent

 private:
  std::vector<StationRecord> stations_;
  std::vector<Date> dates_;
  std::vector<double> values_;  // n_days x n_stations, row major
  Season season_ = Season::all;
  std::vector<std::array<double, 2>> planar_km_;
};

/** Reads a station catalog (CSV with header: id, name, longitude, latitude,
 *  altitude).  Comma or semicolon delimited.  Duplicate ids and coordinates
 *  outside [-180,180] x [-90,90] raise DataError naming the offender. */
std::vector<StationRecord> load_stations(std::istream& in);
std::vector<StationRecord> load_stations_file(const std::string& path);

/** Long-format observations (CSV with header: station_id, date, value_mm and
 *  an optional quality flag; nonzero flag means missing).  Values must be
 *  >= 0 or empty.  Unknown station ids, invalid dates, negative values and
 *  duplicate (station, date) cells raise DataError. */
ObservationPanel load_observations(std::istream& in,
                                   const std::vector<StationRecord>& stations);
ObservationPanel load_observations_file(const std::string& path,
                                        const std::vector<StationRecord>& stations);

/** Restricts the panel to one season.  Cold keeps November through March,
 *  warm keeps May through September; days are re-indexed consecutively so the
 *  time axis [0, 1] has no gaps.  Selecting a season twice is the identity.
 *  Raises DataError if no day falls in the season. */
ObservationPanel select_season(const ObservationPanel& panel, Season season);

/** Equirectangular projection about the station centroid:
 *  x = R cos(lat0) dlon, y = R dlat (radians), R = 6371 km.  Returns a copy
 *  of the panel with planar coordinates attached. */
ObservationPanel project_coordinates(const ObservationPanel& panel);

/** Panel cache: columnar text dump with explicit NA sentinel; values are
 *  printed with enough digits for exact double round trips. */
void write_panel(std::ostream& out, const ObservationPanel& panel,
                 const std::string& config_hash);
void write_panel_file(const std::string& path, const ObservationPanel& panel,
                      const std::string& config_hash);
ObservationPanel read_panel(std::istream& in);
ObservationPanel read_panel_file(const std::string& path);

}  // namespace stpot

#endif
