#include "unmask/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "unmask/rng.hpp"

namespace unmask {

StepSizePlan step_size_plan(int token_count, int step_count, PlanShape shape) {
  if (token_count < 1) {
    throw std::invalid_argument("step_size_plan: token count must be >= 1");
  }
  if (step_count < 1 || step_count > token_count) {
    throw std::invalid_argument("step_size_plan: need 1 <= steps <= token count, got steps=" +
                                std::to_string(step_count) + " tokens=" +
                                std::to_string(token_count));
  }

  StepSizePlan plan;
  plan.total = token_count;
  plan.counts.reserve(static_cast<std::size_t>(step_count));

  if (shape == PlanShape::Linear) {
    const int base = token_count / step_count;
    const int remainder = token_count % step_count;
    for (int s = 0; s < step_count; ++s) {
      plan.counts.push_back(base + (s >= step_count - remainder ? 1 : 0));
    }
    return plan;
  }

  // Cumulative unmasked target after step s follows 1 - cos(pi/2 * s/S),
  // clamped so every step reveals at least one token and later steps keep
  // room for theirs. Sorting ascending removes rare rounding wiggles while
  // preserving the total.
  int prev = 0;
  for (int s = 1; s <= step_count; ++s) {
    const double kept =
        std::cos(std::numbers::pi / 2.0 * static_cast<double>(s) / static_cast<double>(step_count));
    const auto raw = static_cast<int>(token_count - std::llround(token_count * kept));
    const int lo = prev + 1;
    const int hi = token_count - (step_count - s);
    const int cum = std::clamp(raw, lo, hi);
    plan.counts.push_back(cum - prev);
    prev = cum;
  }
  std::sort(plan.counts.begin(), plan.counts.end());
  return plan;
}

void validate_partition(const Schedule& schedule) {
  validate(schedule.grid);
  const int n = schedule.grid.cell_count();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  int covered = 0;
  for (const auto& step : schedule.steps) {
    if (step.empty()) {
      throw std::invalid_argument("Schedule: empty step");
    }
    for (const Coord& c : step) {
      if (!schedule.grid.contains(c)) {
        throw std::invalid_argument("Schedule: cell out of bounds");
      }
      auto& flag = seen[static_cast<std::size_t>(schedule.grid.rank(c))];
      if (flag) {
        throw std::invalid_argument("Schedule: duplicate cell (" + std::to_string(c.row) + "," +
                                    std::to_string(c.col) + ")");
      }
      flag = 1;
      ++covered;
    }
  }
  if (covered != n) {
    throw std::invalid_argument("Schedule: covers " + std::to_string(covered) + " of " +
                                std::to_string(n) + " cells");
  }
}

Schedule schedule_from_order(const GridSpec& grid, std::span<const Coord> order,
                             const StepSizePlan& plan) {
  validate(grid);
  if (plan.total != grid.cell_count() ||
      std::accumulate(plan.counts.begin(), plan.counts.end(), 0) != grid.cell_count() ||
      static_cast<int>(order.size()) != grid.cell_count()) {
    throw std::invalid_argument("schedule_from_order: plan/order size mismatch with grid");
  }
  Schedule schedule{grid, {}};
  schedule.steps.reserve(plan.counts.size());
  std::size_t pos = 0;
  for (const int count : plan.counts) {
    schedule.steps.emplace_back(order.begin() + pos, order.begin() + pos + count);
    pos += static_cast<std::size_t>(count);
  }
  return schedule;
}

Schedule halton_schedule(const GridSpec& grid, const StepSizePlan& plan, NumericMode mode) {
  const TokenOrder order = halton_token_order(grid, mode);
  return schedule_from_order(grid, order.coords, plan);
}

Schedule random_schedule(const GridSpec& grid, const StepSizePlan& plan, std::uint64_t seed) {
  validate(grid);
  std::vector<Coord> cells;
  cells.reserve(static_cast<std::size_t>(grid.cell_count()));
  for (int r = 0; r < grid.cell_count(); ++r) cells.push_back(grid.coord_at(r));

  std::mt19937_64 engine(seed);
  for (std::size_t i = cells.size(); i > 1; --i) {
    std::swap(cells[i - 1], cells[rng::uniform_index(engine, i)]);
  }
  return schedule_from_order(grid, cells, plan);
}

Schedule raster_schedule(const GridSpec& grid, const StepSizePlan& plan) {
  validate(grid);
  std::vector<Coord> cells;
  cells.reserve(static_cast<std::size_t>(grid.cell_count()));
  for (int r = 0; r < grid.cell_count(); ++r) cells.push_back(grid.coord_at(r));
  return schedule_from_order(grid, cells, plan);
}

std::vector<Coord> confidence_select(std::span<const Coord> cells,
                                     std::span<const std::vector<double>> marginals,
                                     std::span<const int> sampled_values, int k,
                                     const ConfidenceConfig& config, double step_fraction,
                                     std::mt19937_64& gumbel_rng) {
  if (cells.size() != marginals.size() || cells.size() != sampled_values.size()) {
    throw std::invalid_argument("confidence_select: input spans must be aligned");
  }
  if (k < 0 || static_cast<std::size_t>(k) > cells.size()) {
    throw std::invalid_argument("confidence_select: k exceeds masked count");
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    double sum = 0.0;
    for (const double p : marginals[i]) sum += p;
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("confidence_select: marginal not normalized");
    }
    if (sampled_values[i] < 0 || static_cast<std::size_t>(sampled_values[i]) >= marginals[i].size()) {
      throw std::invalid_argument("confidence_select: sampled value out of range");
    }
  }

  const double scale = std::max(0.0, config.gumbel_scale_initial * (1.0 - step_fraction));

  struct Scored {
    double score;
    std::size_t index;
  };
  std::vector<Scored> scored;
  scored.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    double score = std::log(marginals[i][static_cast<std::size_t>(sampled_values[i])]);
    if (scale > 0.0) {
      score += rng::standard_gumbel(gumbel_rng) * scale;
    }
    scored.push_back(Scored{score, i});
  }
  // Ties break by position in `cells`, which callers pass row-major.
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.index < b.index;
  });

  std::vector<Coord> selected;
  selected.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) selected.push_back(cells[scored[static_cast<std::size_t>(i)].index]);
  std::sort(selected.begin(), selected.end());
  return selected;
}

}  // namespace unmask
