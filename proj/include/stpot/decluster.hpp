#ifndef STPOT_DECLUSTER_HPP
#define STPOT_DECLUSTER_HPP

#include <vector>

#include "stpot/panel.hpp"

namespace stpot {

/** Per-day maximum across stations; days with no observation get -inf. */
std::vector<double> field_maxima(const ObservationPanel& panel);

struct DeclusterResult {
  /** Retained day row indices in increasing order. */
  std::vector<int> retained_days;
  int lag_days = 0;
};

/** Greedy storm separation: visit days by decreasing field maximum (ties
 *  resolved toward the earlier day) and retain a day iff its calendar
 *  distance to every retained day exceeds lag_days.  Days with no
 *  observation are never retained.  target = 0 keeps every admissible day;
 *  otherwise selection stops once `target` days are retained. */
DeclusterResult decluster(const ObservationPanel& panel, int lag_days,
                          int target = 0);

/** Materializes the retained days as a new panel (dates preserved, days
 *  re-indexed consecutively). */
ObservationPanel apply_decluster(const ObservationPanel& panel,
                                 const DeclusterResult& result);

}  // namespace stpot

#endif
