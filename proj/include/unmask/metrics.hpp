#pragma once

#include <span>
#include <vector>

#include "unmask/gridmap.hpp"
#include "unmask/lds.hpp"

namespace unmask {

// Nearest-neighbor spread within one step's cell set. A singleton set has no
// neighbor; both fields are then the infinity sentinel ("not applicable").
struct SpreadStats {
  double min_nn = 0.0;
  double mean_nn = 0.0;
};

SpreadStats intra_step_spread(std::span<const Coord> cells);

// Mean over `cells` of the Euclidean distance to the nearest revealed cell.
// Throws std::invalid_argument when `revealed` is empty.
double distance_to_revealed(std::span<const Coord> cells, std::span<const Coord> revealed);

// Exact star discrepancy of points in the unit square, by enumerating
// anchored boxes with corners on the point coordinates (and 1). O(k^3);
// limited to 512 points.
double star_discrepancy(std::span<const lds::HaltonPoint2D> points);

// Per-step diagnostics recorded along a sampling trace. Non-applicable
// distances hold non-finite sentinels (infinity for singleton spread, NaN
// for step 1's distance-to-revealed).
struct StepMetrics {
  int step_index = 0;
  double entropy_sum = 0.0;
  double intra_min_nn = 0.0;
  double intra_mean_nn = 0.0;
  double mean_dist_to_revealed = 0.0;
  int tokens_revealed_cumulative = 0;
};

}  // namespace unmask
