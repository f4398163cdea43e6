#pragma once

#include <numbers>
#include <span>
#include <vector>

#include "unmask/gridmap.hpp"

namespace unmask {

// Distance-decaying categorical Markov random field over a token grid:
//   p(x) propto exp(coupling * sum over pairs within neighbor_radius of
//                   weight(d) * [x_i == x_j]),  weight(d) = exp(-(d-1)/length_scale)
// so adjacent cells (d = 1) interact at unit weight and correlation decays
// strictly with Euclidean distance. Conditionals are exactly computable by
// enumeration (small state spaces) or by row-chain elimination (interactions
// spanning at most adjacent rows).
struct ToyJointModel {
  GridSpec grid;
  int vocab_size = 2;
  double coupling = 1.0;                             // beta >= 0
  double length_scale = 1.0;                         // lambda > 0
  double neighbor_radius = std::numbers::sqrt2;      // pairs with d <= radius interact
};

void validate(const ToyJointModel& model);

struct PairPotential {
  int a = 0;  // row-major cell ranks, a < b
  int b = 0;
  double weight = 0.0;
};

double pair_weight(const ToyJointModel& model, double distance);
std::vector<PairPotential> interaction_pairs(const ToyJointModel& model);

// Partial assignment: revealed token values plus the complementary masked set.
class MaskState {
 public:
  static MaskState all_masked(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  bool is_masked(Coord c) const;
  int value_at(Coord c) const;  // -1 when masked
  void reveal(Coord c, int value);

  int masked_count() const { return masked_count_; }
  int revealed_count() const { return grid_.cell_count() - masked_count_; }
  std::vector<Coord> masked_cells() const;    // row-major
  std::vector<Coord> revealed_cells() const;  // row-major

  // Row-major cell values, -1 for masked.
  const std::vector<int>& raw_values() const { return values_; }

 private:
  GridSpec grid_;
  std::vector<int> values_;
  int masked_count_ = 0;
};

// Exact joint distribution over all vocab^(H*W) assignments. Assignments are
// indexed in mixed-radix row-major order with the first cell as the most
// significant digit. Throws ResourceLimitError beyond the enumeration budget.
struct JointTable {
  ToyJointModel model;
  std::vector<double> probabilities;
};

JointTable joint_table(const ToyJointModel& model);

// Exact conditional distributions given the revealed values, marginalizing
// all other masked cells. `cell` (or every entry of `cells`) must be masked.
std::vector<double> exact_conditional_marginal(const ToyJointModel& model, const MaskState& state,
                                               Coord cell);

// All masked-cell marginals in row-major order; equivalent to calling
// exact_conditional_marginal per cell but amortizes the sweep.
std::vector<std::vector<double>> exact_conditional_marginals(const ToyJointModel& model,
                                                             const MaskState& state);

// Exact conditional joint over `cells`, indexed mixed-radix with cells[0] as
// the most significant digit.
std::vector<double> exact_conditional_joint(const ToyJointModel& model, const MaskState& state,
                                            std::span<const Coord> cells);

namespace detail {

// The two exact strategies, exposed for cross-validation. Enumeration sums
// over all assignments of masked cells; the row-chain engine runs
// forward-backward over per-row configurations and requires every
// interaction to span at most adjacent rows.
std::vector<std::vector<double>> conditional_marginals_enumeration(const ToyJointModel& model,
                                                                   const MaskState& state);
std::vector<std::vector<double>> conditional_marginals_rowchain(const ToyJointModel& model,
                                                                const MaskState& state);
bool rowchain_applicable(const ToyJointModel& model);

}  // namespace detail

}  // namespace unmask
