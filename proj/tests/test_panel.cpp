#include "stpot/panel.hpp"

#include <cmath>
#include <sstream>

#include <doctest.h>

#include "stpot/error.hpp"

using namespace stpot;

namespace {

std::vector<StationRecord> two_stations() {
  return {{"A", "alpha", 7.0, 52.0, 10.0}, {"B", "beta", 8.0, 52.0, 20.0}};
}

ObservationPanel year_panel(int year) {
  std::vector<StationRecord> stations = {{"A", "alpha", 7.0, 52.0, 0.0}};
  std::vector<Date> dates;
  // Manual day increment keeps this test free of the library's own date math.
  static const int mdays[13] = {0, 31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  int y = year, mo = 1, da = 1;
  auto leap = [](int yy) {
    return (yy % 4 == 0 && yy % 100 != 0) || yy % 400 == 0;
  };
  std::vector<double> values;
  while (y == year) {
    dates.push_back(Date{y, mo, da});
    values.push_back(1.0);
    int lim = mdays[mo] + ((mo == 2 && leap(y)) ? 1 : 0);
    if (++da > lim) {
      da = 1;
      if (++mo > 12) {
        mo = 1;
        ++y;
      }
    }
  }
  return ObservationPanel(stations, dates, values);
}

}  // namespace

TEST_SUITE("panel") {
  TEST_CASE("date serial anchors and round trips") {
    CHECK(Date{1970, 1, 1}.serial() == 0);
    CHECK(Date{1970, 1, 2}.serial() == 1);
    CHECK(Date{2000, 1, 1}.serial() == 10957);
    CHECK(Date{1969, 12, 31}.serial() == -1);

    Date d = Date::parse("2004-02-29");
    CHECK(d == Date{2004, 2, 29});
    CHECK(d.to_string() == "2004-02-29");
    CHECK(d.valid());
    CHECK_FALSE(Date{2001, 2, 29}.valid());
    CHECK_FALSE(Date{2001, 13, 1}.valid());
    CHECK_THROWS_AS(Date::parse("2001-02-30"), DataError);
    CHECK_THROWS_AS(Date::parse("not-a-date"), DataError);
  }

  TEST_CASE("station catalog parsing and validation") {
    std::istringstream ok(
        "id,name,longitude,latitude,altitude\n"
        "A,alpha,7.0,52.0,10\n"
        "B,beta,8.25,52.5,20\n");
    auto stations = load_stations(ok);
    REQUIRE(stations.size() == 2);
    CHECK(stations[0].id == "A");
    CHECK(stations[1].longitude_deg == doctest::Approx(8.25));

    std::istringstream dup(
        "id,name,longitude,latitude,altitude\nA,a,7,52,0\nA,b,8,52,0\n");
    CHECK_THROWS_AS(load_stations(dup), DataError);

    std::istringstream bad_coord(
        "id,name,longitude,latitude,altitude\nA,a,7,95,0\n");
    CHECK_THROWS_AS(load_stations(bad_coord), DataError);

    std::istringstream semicolons(
        "id;name;longitude;latitude;altitude\nA;alpha;7.0;52.0;10\n");
    auto semi = load_stations(semicolons);
    REQUIRE(semi.size() == 1);
    CHECK(semi[0].latitude_deg == doctest::Approx(52.0));
  }

  TEST_CASE("long-format observations assemble into a day-by-station matrix") {
    std::istringstream obs(
        "station_id,date,value_mm\n"
        "A,2000-01-02,5.5\n"
        "B,2000-01-01,2.0\n"
        "A,2000-01-01,1.0\n");
    auto panel = load_observations(obs, two_stations());
    REQUIRE(panel.n_days() == 2);
    REQUIRE(panel.n_stations() == 2);
    CHECK(panel.dates()[0] == Date{2000, 1, 1});
    CHECK(panel.value(0, 0) == doctest::Approx(1.0));
    CHECK(panel.value(0, 1) == doctest::Approx(2.0));
    CHECK(panel.value(1, 0) == doctest::Approx(5.5));
    CHECK(panel.is_missing(1, 1));
    CHECK(panel.n_nonmissing() == 3);
    CHECK(panel.station_index("B") == 1);
    CHECK(panel.station_index("nope") == -1);
  }

  TEST_CASE("observation validation: negatives, duplicates, unknown ids") {
    auto parse = [](const std::string& body) {
      std::istringstream in("station_id,date,value_mm\n" + body);
      return load_observations(in, two_stations());
    };
    CHECK_THROWS_AS(parse("A,2000-01-01,-1.0\n"), DataError);
    CHECK_THROWS_AS(parse("A,2000-01-01,1\nA,2000-01-01,2\n"), DataError);
    CHECK_THROWS_AS(parse("C,2000-01-01,1\n"), DataError);

    // Empty and NA values are missing; a nonzero quality flag masks the value.
    std::istringstream in(
        "station_id,date,value_mm,quality\n"
        "A,2000-01-01,1.0,0\n"
        "B,2000-01-01,2.0,9\n"
        "A,2000-01-02,NA,0\n"
        "B,2000-01-02,,0\n");
    auto panel = load_observations(in, two_stations());
    CHECK(panel.value(0, 0) == doctest::Approx(1.0));
    CHECK(panel.is_missing(0, 1));
    CHECK(panel.is_missing(1, 0));
    CHECK(panel.is_missing(1, 1));
  }

  TEST_CASE("season selection keeps the right months") {
    auto panel = year_panel(2001);  // not a leap year
    REQUIRE(panel.n_days() == 365);

    auto cold = select_season(panel, Season::cold);
    CHECK(cold.n_days() == 151);  // Jan+Feb+Mar+Nov+Dec = 31+28+31+30+31
    CHECK(cold.season() == Season::cold);
    for (const auto& d : cold.dates()) {
      CHECK((d.month >= 11 || d.month <= 3));
    }

    auto warm = select_season(panel, Season::warm);
    CHECK(warm.n_days() == 153);  // May..Sep = 31+30+31+31+30
    for (const auto& d : warm.dates()) {
      CHECK((d.month >= 5 && d.month <= 9));
    }

    // Idempotent, and 'all' is the identity.
    CHECK(select_season(cold, Season::cold).n_days() == 151);
    CHECK(select_season(panel, Season::all).n_days() == 365);

    CHECK(season_from_string("cold") == Season::cold);
    CHECK(season_to_string(Season::warm) == "warm");
    CHECK_THROWS_AS(season_from_string("spring"), DataError);
  }

  TEST_CASE("planar projection matches the equirectangular formulas") {
    std::vector<StationRecord> stations = two_stations();  // 1 deg apart at 52N
    std::vector<Date> dates = {Date{2000, 1, 1}};
    std::vector<double> values = {1.0, 2.0};
    auto panel = project_coordinates(ObservationPanel(stations, dates, values));
    REQUIRE(panel.has_planar_coordinates());

    const double deg = 3.14159265358979323846 / 180.0;
    double expect_dx = 6371.0 * std::cos(52.0 * deg) * deg;  // about 68.46 km
    double dx = panel.planar_km()[1][0] - panel.planar_km()[0][0];
    double dy = panel.planar_km()[1][1] - panel.planar_km()[0][1];
    CHECK(dx == doctest::Approx(expect_dx).epsilon(1e-12));
    CHECK(dx == doctest::Approx(68.458).epsilon(1e-3));
    CHECK(dy == doctest::Approx(0.0));

    // One degree of latitude is R * pi / 180 everywhere.
    std::vector<StationRecord> ns = {{"A", "a", 7.0, 52.0, 0.0},
                                     {"B", "b", 7.0, 53.0, 0.0}};
    auto panel2 = project_coordinates(
        ObservationPanel(ns, dates, std::vector<double>{1.0, 2.0}));
    double dy2 = panel2.planar_km()[1][1] - panel2.planar_km()[0][1];
    CHECK(dy2 == doctest::Approx(6371.0 * deg).epsilon(1e-12));
    CHECK(dy2 == doctest::Approx(111.195).epsilon(1e-3));
  }

  TEST_CASE("panel cache round trips exactly") {
    std::istringstream obs(
        "station_id,date,value_mm\n"
        "A,2000-01-02,5.5\n"
        "B,2000-01-01,0.123456789012345678\n"
        "A,2000-01-01,1e-7\n");
    auto panel = project_coordinates(load_observations(obs, two_stations()));

    std::ostringstream out;
    write_panel(out, panel, "deadbeefdeadbeef");
    std::istringstream in(out.str());
    auto back = read_panel(in);

    REQUIRE(back.n_days() == panel.n_days());
    REQUIRE(back.n_stations() == panel.n_stations());
    CHECK(back.season() == panel.season());
    CHECK(back.dates() == panel.dates());
    REQUIRE(back.has_planar_coordinates());
    for (int j = 0; j < panel.n_stations(); ++j) {
      CHECK(back.stations()[j].id == panel.stations()[j].id);
      CHECK(back.stations()[j].longitude_deg == panel.stations()[j].longitude_deg);
      CHECK(back.planar_km()[j][0] == panel.planar_km()[j][0]);
      CHECK(back.planar_km()[j][1] == panel.planar_km()[j][1]);
    }
    for (int i = 0; i < panel.n_days(); ++i) {
      for (int j = 0; j < panel.n_stations(); ++j) {
        if (panel.is_missing(i, j)) {
          CHECK(back.is_missing(i, j));
        } else {
          CHECK(back.value(i, j) == panel.value(i, j));  // bit-exact
        }
      }
    }

    // A second serialization is byte identical.
    std::ostringstream again;
    write_panel(again, back, "deadbeefdeadbeef");
    CHECK(again.str() == out.str());
  }
}
