#include "stpot/decluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stpot/error.hpp"

namespace stpot {

std::vector<double> field_maxima(const ObservationPanel& panel) {
  std::vector<double> maxima(panel.n_days(), -std::numeric_limits<double>::infinity());
  for (int i = 0; i < panel.n_days(); ++i) {
    for (int j = 0; j < panel.n_stations(); ++j) {
      double v = panel.value(i, j);
      if (!std::isnan(v) && v > maxima[i]) maxima[i] = v;
    }
  }
  return maxima;
}

DeclusterResult decluster(const ObservationPanel& panel, int lag_days, int target) {
  if (lag_days < 0) throw std::invalid_argument("decluster: lag_days must be >= 0");
  if (target < 0) throw std::invalid_argument("decluster: target must be >= 0");

  const std::vector<double> maxima = field_maxima(panel);
  std::vector<int> order;
  order.reserve(maxima.size());
  for (int i = 0; i < static_cast<int>(maxima.size()); ++i) {
    if (std::isfinite(maxima[i])) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (maxima[a] != maxima[b]) return maxima[a] > maxima[b];
    return a < b;  // ties go to the earlier day
  });

  std::vector<long long> serials(panel.n_days());
  for (int i = 0; i < panel.n_days(); ++i) serials[i] = panel.dates()[i].serial();

  DeclusterResult result;
  result.lag_days = lag_days;
  std::vector<long long> kept;  // sorted serial numbers of retained days
  for (int day : order) {
    if (target > 0 && static_cast<int>(kept.size()) >= target) break;
    auto it = std::lower_bound(kept.begin(), kept.end(), serials[day]);
    bool admissible = true;
    if (it != kept.end() && *it - serials[day] <= lag_days) admissible = false;
    if (it != kept.begin() && serials[day] - *(it - 1) <= lag_days) admissible = false;
    if (admissible) {
      kept.insert(it, serials[day]);
      result.retained_days.push_back(day);
    }
  }
  std::sort(result.retained_days.begin(), result.retained_days.end());
  return result;
}

ObservationPanel apply_decluster(const ObservationPanel& panel,
                                 const DeclusterResult& result) {
  const int m = panel.n_stations();
  std::vector<Date> dates;
  dates.reserve(result.retained_days.size());
  std::vector<double> values;
  values.reserve(result.retained_days.size() * m);
  for (int i : result.retained_days) {
    if (i < 0 || i >= panel.n_days()) {
      throw std::invalid_argument("apply_decluster: day index out of range");
    }
    dates.push_back(panel.dates()[i]);
    for (int j = 0; j < m; ++j) values.push_back(panel.value(i, j));
  }
  ObservationPanel out(panel.stations(), std::move(dates), std::move(values),
                       panel.season());
  if (panel.has_planar_coordinates()) out.set_planar_km(panel.planar_km());
  return out;
}

}  // namespace stpot
