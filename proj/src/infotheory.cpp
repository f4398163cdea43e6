#include "unmask/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "unmask/errors.hpp"

namespace unmask {

double entropy(std::span<const double> dist) {
  if (dist.empty()) {
    throw std::invalid_argument("entropy: empty distribution");
  }
  double sum = 0.0;
  for (const double p : dist) {
    if (p < -1e-12 || !std::isfinite(p)) {
      throw std::invalid_argument("entropy: entries must be nonnegative");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("entropy: distribution sums to " + std::to_string(sum));
  }
  double h = 0.0;
  for (const double p : dist) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("kl_divergence: support mismatch");
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      if (q[i] <= 0.0) {
        throw std::invalid_argument("kl_divergence: q must be positive wherever p is");
      }
      kl += p[i] * std::log(p[i] / q[i]);
    }
  }
  return kl;
}

StepDivergence step_mi(const ToyJointModel& model, const MaskState& state,
                       std::span<const Coord> cells, int step_index) {
  const std::vector<double> joint = exact_conditional_joint(model, state, cells);

  const auto masked = state.masked_cells();
  const auto all_marginals = exact_conditional_marginals(model, state);
  std::vector<std::vector<double>> marginals;
  marginals.reserve(cells.size());
  for (const Coord& c : cells) {
    const auto it = std::find(masked.begin(), masked.end(), c);
    marginals.push_back(all_marginals[static_cast<std::size_t>(it - masked.begin())]);
  }

  // Product distribution in the same mixed-radix layout as the joint
  // (cells[0] most significant).
  std::vector<double> product{1.0};
  for (const auto& marginal : marginals) {
    std::vector<double> next(product.size() * marginal.size());
    for (std::size_t i = 0; i < product.size(); ++i) {
      for (std::size_t v = 0; v < marginal.size(); ++v) {
        next[i * marginal.size() + v] = product[i] * marginal[v];
      }
    }
    product = std::move(next);
  }

  StepDivergence result;
  result.step_index = step_index;
  result.kl_joint_vs_product = kl_divergence(joint, product);
  result.joint_entropy = entropy(joint);
  result.marginal_entropy_sum = 0.0;
  for (const auto& marginal : marginals) result.marginal_entropy_sum += entropy(marginal);
  return result;
}

namespace {

// Expected step KL over prefix realizations, sharing the prefix-weight pass.
double expected_schedule_kl(const ToyJointModel& model, const Schedule& schedule) {
  const JointTable table = joint_table(model);
  const int n = model.grid.cell_count();
  const auto vocab = static_cast<std::size_t>(model.vocab_size);

  std::vector<std::size_t> power(static_cast<std::size_t>(n) + 1, 1);
  for (int i = 1; i <= n; ++i) power[static_cast<std::size_t>(i)] = power[static_cast<std::size_t>(i - 1)] * vocab;
  const auto digit_of = [&](std::size_t index, int rank) {
    return index / power[static_cast<std::size_t>(n - 1 - rank)] % vocab;
  };

  double total = 0.0;
  std::vector<int> prefix_ranks;
  for (std::size_t s = 0; s < schedule.steps.size(); ++s) {
    const auto& step = schedule.steps[s];
    if (prefix_ranks.empty()) {
      const MaskState state = MaskState::all_masked(model.grid);
      total += step_mi(model, state, step, static_cast<int>(s) + 1).kl_joint_vs_product;
    } else {
      std::vector<double> weights(power[prefix_ranks.size()], 0.0);
      for (std::size_t idx = 0; idx < table.probabilities.size(); ++idx) {
        std::size_t key = 0;
        for (const int rank : prefix_ranks) key = key * vocab + digit_of(idx, rank);
        weights[key] += table.probabilities[idx];
      }
      for (std::size_t key = 0; key < weights.size(); ++key) {
        if (weights[key] <= 0.0) continue;
        MaskState state = MaskState::all_masked(model.grid);
        std::size_t rem = key;
        for (std::size_t i = prefix_ranks.size(); i-- > 0;) {
          state.reveal(model.grid.coord_at(prefix_ranks[i]), static_cast<int>(rem % vocab));
          rem /= vocab;
        }
        total +=
            weights[key] * step_mi(model, state, step, static_cast<int>(s) + 1).kl_joint_vs_product;
      }
    }
    for (const Coord& c : step) prefix_ranks.push_back(model.grid.rank(c));
  }
  return total;
}

}  // namespace

double aggregate_mi(const ToyJointModel& model, const Schedule& schedule) {
  validate(model);
  validate_partition(schedule);
  if (!(schedule.grid == model.grid)) {
    throw std::invalid_argument("aggregate_mi: schedule grid does not match model grid");
  }
  return expected_schedule_kl(model, schedule);
}

double trajectory_mi(const ToyJointModel& model, const Schedule& schedule,
                     std::span<const int> final_values) {
  validate(model);
  validate_partition(schedule);
  if (!(schedule.grid == model.grid)) {
    throw std::invalid_argument("trajectory_mi: schedule grid does not match model grid");
  }
  if (static_cast<int>(final_values.size()) != model.grid.cell_count()) {
    throw std::invalid_argument("trajectory_mi: final_values size mismatch");
  }
  for (const int v : final_values) {
    if (v < 0 || v >= model.vocab_size) {
      throw std::invalid_argument("trajectory_mi: token value out of range");
    }
  }

  double total = 0.0;
  MaskState state = MaskState::all_masked(model.grid);
  for (std::size_t s = 0; s < schedule.steps.size(); ++s) {
    const auto& step = schedule.steps[s];
    total += step_mi(model, state, step, static_cast<int>(s) + 1).kl_joint_vs_product;
    for (const Coord& c : step) {
      state.reveal(c, final_values[static_cast<std::size_t>(model.grid.rank(c))]);
    }
  }
  return total;
}

}  // namespace unmask
