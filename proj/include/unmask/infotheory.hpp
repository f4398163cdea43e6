#pragma once

#include <span>
#include <vector>

#include "unmask/schedulers.hpp"
#include "unmask/toymodel.hpp"

namespace unmask {

// Shannon entropy in nats of a normalized categorical distribution
// (0 * log 0 = 0). Throws std::invalid_argument on non-normalized input.
double entropy(std::span<const double> dist);

// KL(p || q) in nats. Requires matching support sizes and q > 0 wherever
// p > 0.
double kl_divergence(std::span<const double> p, std::span<const double> q);

// Divergence between a step's exact conditional joint and the product of
// its per-cell conditional marginals, for one realized revealed prefix.
// kl equals marginal_entropy_sum - joint_entropy up to rounding.
struct StepDivergence {
  int step_index = 0;
  double kl_joint_vs_product = 0.0;
  double marginal_entropy_sum = 0.0;
  double joint_entropy = 0.0;
};

StepDivergence step_mi(const ToyJointModel& model, const MaskState& state,
                       std::span<const Coord> cells, int step_index = 0);

// Sum over steps of the joint-vs-product KL, in expectation over revealed
// prefixes drawn from the true joint. Exact (enumeration); throws
// ResourceLimitError when intractable.
double aggregate_mi(const ToyJointModel& model, const Schedule& schedule);

// Same sum for one realized trajectory (a complete row-major assignment),
// conditioning every step on that trajectory's prefix values.
double trajectory_mi(const ToyJointModel& model, const Schedule& schedule,
                     std::span<const int> final_values);

}  // namespace unmask
