#include "unmask/toymodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include "unmask/errors.hpp"

namespace unmask {

namespace {

constexpr double kEnumerationBudget = 1e7;
constexpr std::size_t kMaxRowConfigs = 1024;
constexpr double kRadiusSlack = 1e-9;

double cell_distance(Coord a, Coord b) {
  const double dr = a.row - b.row;
  const double dc = a.col - b.col;
  return std::sqrt(dr * dr + dc * dc);
}

// V^count as double (saturating), for tractability guards.
double pow_count(int vocab, int count) {
  double v = 1.0;
  for (int i = 0; i < count; ++i) {
    v *= vocab;
    if (v > 1e18) return 1e18;
  }
  return v;
}

}  // namespace

void validate(const ToyJointModel& model) {
  validate(model.grid);
  if (model.vocab_size < 2) {
    throw std::invalid_argument("ToyJointModel: vocab_size must be >= 2");
  }
  if (model.coupling < 0.0) {
    throw std::invalid_argument("ToyJointModel: coupling must be >= 0");
  }
  if (!(model.length_scale > 0.0)) {
    throw std::invalid_argument("ToyJointModel: length_scale must be > 0");
  }
  if (model.neighbor_radius < 0.0) {
    throw std::invalid_argument("ToyJointModel: neighbor_radius must be >= 0");
  }
}

double pair_weight(const ToyJointModel& model, double distance) {
  return std::exp(-(distance - 1.0) / model.length_scale);
}

std::vector<PairPotential> interaction_pairs(const ToyJointModel& model) {
  const int n = model.grid.cell_count();
  std::vector<PairPotential> pairs;
  for (int a = 0; a < n; ++a) {
    const Coord ca = model.grid.coord_at(a);
    for (int b = a + 1; b < n; ++b) {
      const Coord cb = model.grid.coord_at(b);
      const double d = cell_distance(ca, cb);
      if (d <= model.neighbor_radius + kRadiusSlack) {
        pairs.push_back(PairPotential{a, b, pair_weight(model, d)});
      }
    }
  }
  return pairs;
}

MaskState MaskState::all_masked(const GridSpec& grid) {
  validate(grid);
  MaskState state;
  state.grid_ = grid;
  state.values_.assign(static_cast<std::size_t>(grid.cell_count()), -1);
  state.masked_count_ = grid.cell_count();
  return state;
}

bool MaskState::is_masked(Coord c) const {
  if (!grid_.contains(c)) {
    throw std::invalid_argument("MaskState: cell out of bounds");
  }
  return values_[static_cast<std::size_t>(grid_.rank(c))] < 0;
}

int MaskState::value_at(Coord c) const {
  if (!grid_.contains(c)) {
    throw std::invalid_argument("MaskState: cell out of bounds");
  }
  return values_[static_cast<std::size_t>(grid_.rank(c))];
}

void MaskState::reveal(Coord c, int value) {
  if (!grid_.contains(c)) {
    throw std::invalid_argument("MaskState: cell out of bounds");
  }
  if (value < 0) {
    throw std::invalid_argument("MaskState: token value must be >= 0");
  }
  auto& slot = values_[static_cast<std::size_t>(grid_.rank(c))];
  if (slot >= 0) {
    throw std::invalid_argument("MaskState: cell already revealed");
  }
  slot = value;
  --masked_count_;
}

std::vector<Coord> MaskState::masked_cells() const {
  std::vector<Coord> cells;
  cells.reserve(static_cast<std::size_t>(masked_count_));
  for (int r = 0; r < grid_.cell_count(); ++r) {
    if (values_[static_cast<std::size_t>(r)] < 0) cells.push_back(grid_.coord_at(r));
  }
  return cells;
}

std::vector<Coord> MaskState::revealed_cells() const {
  std::vector<Coord> cells;
  for (int r = 0; r < grid_.cell_count(); ++r) {
    if (values_[static_cast<std::size_t>(r)] >= 0) cells.push_back(grid_.coord_at(r));
  }
  return cells;
}

namespace {

// Iterates every assignment of the masked cells in mixed-radix row-major
// order (first masked cell most significant) and hands the visitor the full
// value vector plus the assignment's unnormalized weight.
void for_each_masked_assignment(const ToyJointModel& model, const MaskState& state,
                                const std::vector<PairPotential>& pairs,
                                const std::function<void(const std::vector<int>&, double)>& visit) {
  const int vocab = model.vocab_size;
  std::vector<int> values = state.raw_values();
  std::vector<int> masked_ranks;
  for (int r = 0; r < model.grid.cell_count(); ++r) {
    if (values[static_cast<std::size_t>(r)] < 0) masked_ranks.push_back(r);
  }
  for (const int r : masked_ranks) values[static_cast<std::size_t>(r)] = 0;

  const auto energy = [&]() {
    double e = 0.0;
    for (const PairPotential& p : pairs) {
      if (values[static_cast<std::size_t>(p.a)] == values[static_cast<std::size_t>(p.b)]) {
        e += p.weight;
      }
    }
    return e;
  };

  while (true) {
    visit(values, std::exp(model.coupling * energy()));
    // odometer increment, least significant digit last
    int k = static_cast<int>(masked_ranks.size()) - 1;
    for (; k >= 0; --k) {
      auto& v = values[static_cast<std::size_t>(masked_ranks[static_cast<std::size_t>(k)])];
      if (++v < vocab) break;
      v = 0;
    }
    if (k < 0) break;
  }
}

void require_state_matches(const ToyJointModel& model, const MaskState& state) {
  if (!(state.grid() == model.grid)) {
    throw std::invalid_argument("MaskState grid does not match model grid");
  }
}

}  // namespace

JointTable joint_table(const ToyJointModel& model) {
  validate(model);
  const int n = model.grid.cell_count();
  const double size = pow_count(model.vocab_size, n);
  if (size > kEnumerationBudget) {
    throw ResourceLimitError("joint_table: state space " + std::to_string(size) +
                             " exceeds enumeration budget");
  }

  const auto pairs = interaction_pairs(model);
  JointTable table{model, {}};
  table.probabilities.reserve(static_cast<std::size_t>(size));

  const MaskState state = MaskState::all_masked(model.grid);
  double total = 0.0;
  for_each_masked_assignment(model, state, pairs, [&](const std::vector<int>&, double w) {
    table.probabilities.push_back(w);
    total += w;
  });
  for (double& p : table.probabilities) p /= total;
  return table;
}

namespace detail {

std::vector<std::vector<double>> conditional_marginals_enumeration(const ToyJointModel& model,
                                                                   const MaskState& state) {
  const int vocab = model.vocab_size;
  const auto pairs = interaction_pairs(model);
  std::vector<int> masked_ranks;
  for (int r = 0; r < model.grid.cell_count(); ++r) {
    if (state.raw_values()[static_cast<std::size_t>(r)] < 0) masked_ranks.push_back(r);
  }

  std::vector<std::vector<double>> accum(masked_ranks.size(),
                                         std::vector<double>(static_cast<std::size_t>(vocab), 0.0));
  for_each_masked_assignment(model, state, pairs, [&](const std::vector<int>& values, double w) {
    for (std::size_t k = 0; k < masked_ranks.size(); ++k) {
      accum[k][static_cast<std::size_t>(values[static_cast<std::size_t>(masked_ranks[k])])] += w;
    }
  });
  for (auto& dist : accum) {
    double sum = 0.0;
    for (const double v : dist) sum += v;
    for (double& v : dist) v /= sum;
  }
  return accum;
}

bool rowchain_applicable(const ToyJointModel& model) {
  if (pow_count(model.vocab_size, model.grid.width) > static_cast<double>(kMaxRowConfigs)) {
    return false;
  }
  // Every interaction must stay within a row or span adjacent rows.
  for (const PairPotential& p : interaction_pairs(model)) {
    if (std::abs(model.grid.coord_at(p.a).row - model.grid.coord_at(p.b).row) > 1) return false;
  }
  return true;
}

// Forward-backward over per-row configurations. Rows are translates of each
// other, so a single within-row factor and a single adjacent-row transfer
// matrix describe the whole grid; evidence enters as per-row config masks.
std::vector<std::vector<double>> conditional_marginals_rowchain(const ToyJointModel& model,
                                                                const MaskState& state) {
  const int width = model.grid.width;
  const int height = model.grid.height;
  const int vocab = model.vocab_size;
  const auto configs =
      static_cast<std::size_t>(pow_count(vocab, width));

  std::vector<std::uint8_t> digits(configs * static_cast<std::size_t>(width));
  for (std::size_t c = 0; c < configs; ++c) {
    std::size_t rem = c;
    for (int j = width - 1; j >= 0; --j) {
      digits[c * static_cast<std::size_t>(width) + static_cast<std::size_t>(j)] =
          static_cast<std::uint8_t>(rem % static_cast<std::size_t>(vocab));
      rem /= static_cast<std::size_t>(vocab);
    }
  }
  const auto digit = [&](std::size_t config, int col) {
    return digits[config * static_cast<std::size_t>(width) + static_cast<std::size_t>(col)];
  };

  // Pair offsets from the generic pair list, keyed by row delta.
  struct Offset {
    int col_a, col_b;
    double weight;
  };
  std::vector<Offset> within, between;
  for (const PairPotential& p : interaction_pairs(model)) {
    const Coord a = model.grid.coord_at(p.a);
    const Coord b = model.grid.coord_at(p.b);
    if (a.row == b.row && a.row == 0) within.push_back(Offset{a.col, b.col, p.weight});
    if (b.row == a.row + 1 && a.row == 0) between.push_back(Offset{a.col, b.col, p.weight});
    if (a.row == b.row + 1 && b.row == 0) between.push_back(Offset{b.col, a.col, p.weight});
  }

  std::vector<double> phi(configs);
  for (std::size_t c = 0; c < configs; ++c) {
    double e = 0.0;
    for (const Offset& o : within) {
      if (digit(c, o.col_a) == digit(c, o.col_b)) e += o.weight;
    }
    phi[c] = std::exp(model.coupling * e);
  }

  std::vector<double> transfer;
  if (height > 1) {
    transfer.resize(configs * configs);
    for (std::size_t top = 0; top < configs; ++top) {
      for (std::size_t bottom = 0; bottom < configs; ++bottom) {
        double e = 0.0;
        for (const Offset& o : between) {
          if (digit(top, o.col_a) == digit(bottom, o.col_b)) e += o.weight;
        }
        transfer[top * configs + bottom] = std::exp(model.coupling * e);
      }
    }
  }

  // Evidence: a row config is admissible iff it matches every revealed cell.
  std::vector<std::vector<double>> psi(static_cast<std::size_t>(height));
  for (int r = 0; r < height; ++r) {
    auto& mask = psi[static_cast<std::size_t>(r)];
    mask.assign(configs, 0.0);
    for (std::size_t c = 0; c < configs; ++c) {
      bool ok = true;
      for (int j = 0; j < width && ok; ++j) {
        const int v = state.value_at(Coord{r, j});
        if (v >= 0 && digit(c, j) != v) ok = false;
      }
      if (ok) mask[c] = phi[c];
    }
  }

  const auto rescale = [](std::vector<double>& v) {
    double sum = 0.0;
    for (const double x : v) sum += x;
    if (sum <= 0.0) {
      throw InternalError("rowchain: inadmissible evidence");
    }
    for (double& x : v) x /= sum;
  };

  std::vector<std::vector<double>> alpha(static_cast<std::size_t>(height)),
      beta(static_cast<std::size_t>(height));
  alpha[0] = psi[0];
  rescale(alpha[0]);
  for (int r = 1; r < height; ++r) {
    auto& cur = alpha[static_cast<std::size_t>(r)];
    cur.assign(configs, 0.0);
    const auto& prev = alpha[static_cast<std::size_t>(r - 1)];
    for (std::size_t top = 0; top < configs; ++top) {
      if (prev[top] == 0.0) continue;
      const double* row = &transfer[top * configs];
      for (std::size_t bottom = 0; bottom < configs; ++bottom) {
        cur[bottom] += prev[top] * row[bottom];
      }
    }
    for (std::size_t c = 0; c < configs; ++c) cur[c] *= psi[static_cast<std::size_t>(r)][c];
    rescale(cur);
  }

  beta[static_cast<std::size_t>(height - 1)].assign(configs, 1.0);
  for (int r = height - 2; r >= 0; --r) {
    auto& cur = beta[static_cast<std::size_t>(r)];
    cur.assign(configs, 0.0);
    const auto& next = beta[static_cast<std::size_t>(r + 1)];
    const auto& mask_next = psi[static_cast<std::size_t>(r + 1)];
    for (std::size_t top = 0; top < configs; ++top) {
      const double* row = &transfer[top * configs];
      double acc = 0.0;
      for (std::size_t bottom = 0; bottom < configs; ++bottom) {
        acc += row[bottom] * mask_next[bottom] * next[bottom];
      }
      cur[top] = acc;
    }
    rescale(cur);
  }

  std::vector<std::vector<double>> result;
  for (int r = 0; r < height; ++r) {
    std::vector<double> posterior(configs);
    double total = 0.0;
    for (std::size_t c = 0; c < configs; ++c) {
      posterior[c] =
          alpha[static_cast<std::size_t>(r)][c] * beta[static_cast<std::size_t>(r)][c];
      total += posterior[c];
    }
    for (int j = 0; j < width; ++j) {
      if (state.value_at(Coord{r, j}) >= 0) continue;
      std::vector<double> dist(static_cast<std::size_t>(vocab), 0.0);
      for (std::size_t c = 0; c < configs; ++c) {
        dist[digit(c, j)] += posterior[c];
      }
      for (double& p : dist) p /= total;
      result.push_back(std::move(dist));
    }
  }
  return result;
}

}  // namespace detail

std::vector<std::vector<double>> exact_conditional_marginals(const ToyJointModel& model,
                                                             const MaskState& state) {
  validate(model);
  require_state_matches(model, state);
  const int m = state.masked_count();
  if (m == 0) return {};

  if (model.coupling == 0.0 || interaction_pairs(model).empty()) {
    const std::vector<double> uniform(static_cast<std::size_t>(model.vocab_size),
                                      1.0 / model.vocab_size);
    return std::vector<std::vector<double>>(static_cast<std::size_t>(m), uniform);
  }

  const double enum_cost = pow_count(model.vocab_size, m);
  if (enum_cost <= 4096.0) {
    return detail::conditional_marginals_enumeration(model, state);
  }
  if (detail::rowchain_applicable(model)) {
    return detail::conditional_marginals_rowchain(model, state);
  }
  if (enum_cost <= kEnumerationBudget) {
    return detail::conditional_marginals_enumeration(model, state);
  }
  throw ResourceLimitError("exact_conditional_marginals: state space too large for exact inference");
}

std::vector<double> exact_conditional_marginal(const ToyJointModel& model, const MaskState& state,
                                               Coord cell) {
  validate(model);
  require_state_matches(model, state);
  if (!state.is_masked(cell)) {
    throw std::invalid_argument("exact_conditional_marginal: cell already revealed");
  }
  const auto masked = state.masked_cells();
  const auto marginals = exact_conditional_marginals(model, state);
  for (std::size_t i = 0; i < masked.size(); ++i) {
    if (masked[i] == cell) return marginals[i];
  }
  throw InternalError("exact_conditional_marginal: masked cell not found");
}

std::vector<double> exact_conditional_joint(const ToyJointModel& model, const MaskState& state,
                                            std::span<const Coord> cells) {
  validate(model);
  require_state_matches(model, state);
  if (cells.empty()) {
    throw std::invalid_argument("exact_conditional_joint: cell set must be non-empty");
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!state.is_masked(cells[i])) {
      throw std::invalid_argument("exact_conditional_joint: cell already revealed");
    }
    for (std::size_t j = i + 1; j < cells.size(); ++j) {
      if (cells[i] == cells[j]) {
        throw std::invalid_argument("exact_conditional_joint: duplicate cell");
      }
    }
  }
  const double enum_cost = pow_count(model.vocab_size, state.masked_count());
  if (enum_cost > kEnumerationBudget) {
    throw ResourceLimitError("exact_conditional_joint: state space too large");
  }

  const int vocab = model.vocab_size;
  const auto pairs = interaction_pairs(model);
  std::vector<double> out(
      static_cast<std::size_t>(pow_count(vocab, static_cast<int>(cells.size()))), 0.0);
  for_each_masked_assignment(model, state, pairs, [&](const std::vector<int>& values, double w) {
    std::size_t index = 0;
    for (const Coord& c : cells) {
      index = index * static_cast<std::size_t>(vocab) +
              static_cast<std::size_t>(values[static_cast<std::size_t>(model.grid.rank(c))]);
    }
    out[index] += w;
  });
  double total = 0.0;
  for (const double v : out) total += v;
  for (double& v : out) v /= total;
  return out;
}

}  // namespace unmask
