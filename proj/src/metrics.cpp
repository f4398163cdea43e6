#include "unmask/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "unmask/errors.hpp"

namespace unmask {

namespace {

double cell_distance(Coord a, Coord b) {
  const double dr = a.row - b.row;
  const double dc = a.col - b.col;
  return std::sqrt(dr * dr + dc * dc);
}

}  // namespace

SpreadStats intra_step_spread(std::span<const Coord> cells) {
  if (cells.empty()) {
    throw std::invalid_argument("intra_step_spread: empty cell set");
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (cells.size() == 1) {
    return SpreadStats{inf, inf};
  }
  double min_nn = inf;
  double sum_nn = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    double nearest = inf;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (i == j) continue;
      nearest = std::min(nearest, cell_distance(cells[i], cells[j]));
    }
    min_nn = std::min(min_nn, nearest);
    sum_nn += nearest;
  }
  return SpreadStats{min_nn, sum_nn / static_cast<double>(cells.size())};
}

double distance_to_revealed(std::span<const Coord> cells, std::span<const Coord> revealed) {
  if (revealed.empty()) {
    throw std::invalid_argument("distance_to_revealed: revealed set is empty");
  }
  if (cells.empty()) {
    throw std::invalid_argument("distance_to_revealed: empty cell set");
  }
  double sum = 0.0;
  for (const Coord& c : cells) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const Coord& r : revealed) {
      nearest = std::min(nearest, cell_distance(c, r));
    }
    sum += nearest;
  }
  return sum / static_cast<double>(cells.size());
}

double star_discrepancy(std::span<const lds::HaltonPoint2D> points) {
  if (points.empty()) {
    throw std::invalid_argument("star_discrepancy: empty point set");
  }
  if (points.size() > 512) {
    throw ResourceLimitError("star_discrepancy: exact algorithm limited to 512 points");
  }
  for (const auto& p : points) {
    if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0)) {
      throw std::invalid_argument("star_discrepancy: points must lie in the unit square");
    }
  }

  // Candidate corners: the box-count function only jumps at point
  // coordinates, so the supremum is attained against corners built from
  // them (plus 1). Overfull boxes close at a coordinate (count with <=),
  // underfull boxes open toward the next one (count with <).
  std::vector<double> xs, ys;
  xs.reserve(points.size() + 1);
  ys.reserve(points.size() + 1);
  for (const auto& p : points) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  xs.push_back(1.0);
  ys.push_back(1.0);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

  const double count = static_cast<double>(points.size());
  double best = 0.0;
  for (const double a : xs) {
    for (const double b : ys) {
      int strict = 0;
      int weak = 0;
      for (const auto& p : points) {
        const bool in_x_weak = p.x <= a;
        const bool in_y_weak = p.y <= b;
        if (in_x_weak && in_y_weak) {
          ++weak;
          if (p.x < a && p.y < b) ++strict;
        }
      }
      const double volume = a * b;
      best = std::max(best, volume - static_cast<double>(strict) / count);
      best = std::max(best, static_cast<double>(weak) / count - volume);
    }
  }
  return best;
}

}  // namespace unmask
