#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "unmask/gridmap.hpp"

namespace unmask {

// Per-step token counts; sums to the grid's cell count, every entry >= 1.
struct StepSizePlan {
  std::vector<int> counts;
  int total = 0;

  int steps() const { return static_cast<int>(counts.size()); }
  bool operator==(const StepSizePlan&) const = default;
};

enum class PlanShape { Cosine, Linear };

// Cosine reveals few tokens first and ramps up (mask-schedule convention);
// Linear yields near-equal counts. Throws std::invalid_argument unless
// 1 <= step_count <= token_count.
StepSizePlan step_size_plan(int token_count, int step_count, PlanShape shape);

// An ordered partition of the grid cells into unmasking steps.
struct Schedule {
  GridSpec grid;
  std::vector<std::vector<Coord>> steps;

  bool operator==(const Schedule&) const = default;
};

// Throws std::invalid_argument unless steps are pairwise disjoint, cover the
// grid completely, and every step is non-empty.
void validate_partition(const Schedule& schedule);

// Slices an explicit cell order by the plan's counts.
Schedule schedule_from_order(const GridSpec& grid, std::span<const Coord> order,
                             const StepSizePlan& plan);

// Fixed-order schedules. Halton is deterministic and seed-free; random is a
// seeded uniform permutation; raster is the row-major clustered baseline.
Schedule halton_schedule(const GridSpec& grid, const StepSizePlan& plan,
                         NumericMode mode = NumericMode::Float);
Schedule random_schedule(const GridSpec& grid, const StepSizePlan& plan, std::uint64_t seed);
Schedule raster_schedule(const GridSpec& grid, const StepSizePlan& plan);

enum class GumbelDecay { Linear };

struct ConfidenceConfig {
  // Gumbel noise scale at the start of generation; decays linearly to 0.
  // Zero makes selection a deterministic top-k by log-probability.
  double gumbel_scale_initial = 4.5;
  // Temperature applied to marginals when sampling token values; recorded
  // here so a config fully describes a confidence run (selection itself
  // only reads sampled-value log-probabilities).
  double softmax_temperature = 1.0;
  GumbelDecay decay = GumbelDecay::Linear;
};

// Picks k of the masked cells by noisy confidence:
//   score(cell) = log p(sampled value) + g * gumbel_scale_initial * (1 - step_fraction)
// with g a standard Gumbel draw per cell. Ties break by row-major cell
// order. Returns the selected cells sorted row-major. The sampled values
// are inputs only; selection never alters them.
std::vector<Coord> confidence_select(std::span<const Coord> cells,
                                     std::span<const std::vector<double>> marginals,
                                     std::span<const int> sampled_values, int k,
                                     const ConfidenceConfig& config, double step_fraction,
                                     std::mt19937_64& gumbel_rng);

}  // namespace unmask
