#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "test_support.hpp"
#include "unmask/errors.hpp"
#include "unmask/rng.hpp"
#include "unmask/toymodel.hpp"

using namespace unmask;

namespace {

constexpr double kE = 2.718281828459045;

ToyJointModel model_for(const GridSpec& grid, int vocab = 2, double beta = 1.0,
                        double lambda = 1.0, double radius = std::numbers::sqrt2) {
  return ToyJointModel{grid, vocab, beta, lambda, radius};
}

}  // namespace

TEST_SUITE_BEGIN("toymodel");

TEST_CASE("pair weights decay strictly with distance, unit weight adjacent") {
  const ToyJointModel model = model_for(GridSpec{3, 3});
  CHECK(pair_weight(model, 1.0) == doctest::Approx(1.0));
  CHECK(pair_weight(model, std::numbers::sqrt2) < pair_weight(model, 1.0));
  CHECK(pair_weight(model, 2.0) < pair_weight(model, std::numbers::sqrt2));

  CHECK(interaction_pairs(model_for(GridSpec{2, 2})).size() == 6);  // 4 edges + 2 diagonals
  CHECK(interaction_pairs(model_for(GridSpec{2, 2}, 2, 1.0, 1.0, 1.0)).size() == 4);
}

TEST_CASE("joint table: zero coupling is uniform") {
  const JointTable table = joint_table(model_for(GridSpec{2, 2}, 3, 0.0));
  REQUIRE(table.probabilities.size() == 81);
  for (const double p : table.probabilities) {
    CHECK(p == doctest::Approx(1.0 / 81.0).epsilon(1e-12));
  }
}

TEST_CASE("joint table: hand-normalizable two-cell model") {
  // adjacent pair at unit weight: equal assignments carry weight e, the
  // others 1, so p(equal) = e/(2e+2) and p(unequal) = 1/(2e+2)
  const JointTable table = joint_table(model_for(GridSpec{1, 2}, 2, 1.0, 1.0, 1.0));
  REQUIRE(table.probabilities.size() == 4);
  CHECK(table.probabilities[0] == doctest::Approx(kE / (2.0 * kE + 2.0)).epsilon(1e-12));  // 00
  CHECK(table.probabilities[1] == doctest::Approx(1.0 / (2.0 * kE + 2.0)).epsilon(1e-12));  // 01
  CHECK(table.probabilities[2] == doctest::Approx(1.0 / (2.0 * kE + 2.0)).epsilon(1e-12));  // 10
  CHECK(table.probabilities[3] == doctest::Approx(kE / (2.0 * kE + 2.0)).epsilon(1e-12));  // 11
}

TEST_CASE("joint table normalizes and guards its budget") {
  for (const auto& model :
       {model_for(GridSpec{2, 2}), model_for(GridSpec{3, 3}, 3, 0.7, 2.0), model_for(GridSpec{1, 5})}) {
    const JointTable table = joint_table(model);
    double sum = 0.0;
    for (const double p : table.probabilities) sum += p;
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
  CHECK_THROWS_AS(joint_table(model_for(GridSpec{3, 3}, 10)), ResourceLimitError);
}

TEST_CASE("conditional marginals: uniform cases and the two-cell value") {
  const MaskState masked2x2 = MaskState::all_masked(GridSpec{2, 2});
  for (const auto& dist : exact_conditional_marginals(model_for(GridSpec{2, 2}, 4, 0.0), masked2x2)) {
    for (const double p : dist) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));
  }

  // fully masked symmetric model: marginals uniform by label symmetry
  for (const auto& dist : exact_conditional_marginals(model_for(GridSpec{2, 2}), masked2x2)) {
    for (const double p : dist) CHECK(p == doctest::Approx(0.5).epsilon(1e-12));
  }

  MaskState state = MaskState::all_masked(GridSpec{1, 2});
  state.reveal(Coord{0, 0}, 0);
  const auto dist = exact_conditional_marginal(model_for(GridSpec{1, 2}, 2, 1.0, 1.0, 1.0), state,
                                               Coord{0, 1});
  CHECK(dist[0] == doctest::Approx(kE / (kE + 1.0)).epsilon(1e-12));
  CHECK(dist[1] == doctest::Approx(1.0 / (kE + 1.0)).epsilon(1e-12));
}

TEST_CASE("conditional joint: singleton equals marginal, independence factorizes") {
  const ToyJointModel model = model_for(GridSpec{2, 2});
  MaskState state = MaskState::all_masked(model.grid);
  state.reveal(Coord{1, 1}, 1);

  const std::vector<Coord> single{Coord{0, 0}};
  CHECK(exact_conditional_joint(model, state, single) ==
        exact_conditional_marginal(model, state, Coord{0, 0}));

  const ToyJointModel free = model_for(GridSpec{2, 2}, 3, 0.0);
  const MaskState fresh = MaskState::all_masked(free.grid);
  const std::vector<Coord> pair{Coord{0, 0}, Coord{0, 1}};
  for (const double p : exact_conditional_joint(free, fresh, pair)) {
    CHECK(p == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  }

  // coupled adjacent pair is not a product of its marginals
  const MaskState masked = MaskState::all_masked(model.grid);
  const auto joint = exact_conditional_joint(model, masked, pair);
  const auto ma = exact_conditional_marginal(model, masked, pair[0]);
  const auto mb = exact_conditional_marginal(model, masked, pair[1]);
  std::vector<double> product{ma[0] * mb[0], ma[0] * mb[1], ma[1] * mb[0], ma[1] * mb[1]};
  CHECK(testsupport::oracle_kl(joint, product) > 0.01);
}

TEST_CASE("conditional joint marginalizes back to the marginals") {
  const ToyJointModel model = model_for(GridSpec{3, 3}, 2, 1.2, 0.8);
  MaskState state = MaskState::all_masked(model.grid);
  state.reveal(Coord{0, 1}, 1);
  state.reveal(Coord{2, 2}, 0);

  const std::vector<Coord> pair{Coord{1, 0}, Coord{1, 2}};
  const auto joint = exact_conditional_joint(model, state, pair);
  const auto first = exact_conditional_marginal(model, state, pair[0]);
  const auto second = exact_conditional_marginal(model, state, pair[1]);
  for (int v = 0; v < 2; ++v) {
    const auto vz = static_cast<std::size_t>(v);
    CHECK(std::abs(joint[vz * 2] + joint[vz * 2 + 1] - first[vz]) <= 1e-12);
    CHECK(std::abs(joint[vz] + joint[2 + vz] - second[vz]) <= 1e-12);
  }
}

TEST_CASE("chain rule: product of singleton conditionals rebuilds the joint") {
  const ToyJointModel model = model_for(GridSpec{2, 2});
  const JointTable table = joint_table(model);

  const std::vector<std::vector<Coord>> orders{
      {{0, 0}, {0, 1}, {1, 0}, {1, 1}},
      {{1, 1}, {0, 0}, {1, 0}, {0, 1}},
  };
  for (const auto& order : orders) {
    for (std::size_t idx = 0; idx < table.probabilities.size(); ++idx) {
      std::vector<int> values(4, 0);
      std::size_t rem = idx;
      for (int k = 3; k >= 0; --k) {
        values[static_cast<std::size_t>(k)] = static_cast<int>(rem % 2);
        rem /= 2;
      }
      double product = 1.0;
      MaskState state = MaskState::all_masked(model.grid);
      for (const Coord& c : order) {
        const int v = values[static_cast<std::size_t>(model.grid.rank(c))];
        product *= exact_conditional_marginal(model, state, c)[static_cast<std::size_t>(v)];
        state.reveal(c, v);
      }
      CHECK(std::abs(product - table.probabilities[idx]) <= 1e-12);
    }
  }
}

TEST_CASE("row-chain inference agrees with enumeration") {
  std::mt19937_64 engine(7);
  for (const auto& model : {model_for(GridSpec{3, 4}, 2, 1.3, 0.8), model_for(GridSpec{2, 5}),
                            model_for(GridSpec{4, 2}, 3, 0.6, 1.5)}) {
    REQUIRE(detail::rowchain_applicable(model));
    for (int trial = 0; trial < 6; ++trial) {
      MaskState state = MaskState::all_masked(model.grid);
      for (int r = 0; r < model.grid.cell_count(); ++r) {
        if (rng::canonical(engine) < 0.4) {
          state.reveal(model.grid.coord_at(r),
                       static_cast<int>(rng::uniform_index(
                           engine, static_cast<std::size_t>(model.vocab_size))));
        }
      }
      if (state.masked_count() == 0) continue;
      const auto by_chain = detail::conditional_marginals_rowchain(model, state);
      const auto by_enum = detail::conditional_marginals_enumeration(model, state);
      REQUIRE(by_chain.size() == by_enum.size());
      for (std::size_t i = 0; i < by_chain.size(); ++i) {
        for (std::size_t v = 0; v < by_chain[i].size(); ++v) {
          CHECK(std::abs(by_chain[i][v] - by_enum[i][v]) <= 1e-10);
        }
      }
    }
  }
}

TEST_CASE("conditional entropy grows with distance along chains") {
  for (const int length : {4, 5}) {
    const ToyJointModel model = model_for(GridSpec{1, length}, 2, 1.0, 1.0, 1.0);
    for (int anchor = 0; anchor < length; ++anchor) {
      for (int value = 0; value < 2; ++value) {
        MaskState state = MaskState::all_masked(model.grid);
        state.reveal(Coord{0, anchor}, value);
        double last_h = -1.0;
        for (int gap = 1; gap < length; ++gap) {
          for (const int col : {anchor - gap, anchor + gap}) {
            if (col < 0 || col >= length) continue;
            const double h = testsupport::oracle_entropy(
                exact_conditional_marginal(model, state, Coord{0, col}));
            CHECK(h >= last_h - 1e-12);
            last_h = std::max(last_h, h);
          }
        }
      }
    }
  }
}

TEST_CASE("conditional entropy vs distance: center anchor and rank correlation") {
  // center anchor on 3x3: edge-adjacent cells are strictly more certain
  // than corner cells
  const ToyJointModel model3 = model_for(GridSpec{3, 3});
  MaskState center = MaskState::all_masked(model3.grid);
  center.reveal(Coord{1, 1}, 0);
  double worst_edge = 0.0, best_corner = 1e9;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      if (r == 1 && c == 1) continue;
      const double h =
          testsupport::oracle_entropy(exact_conditional_marginal(model3, center, Coord{r, c}));
      if ((r + c) % 2 == 1) {
        worst_edge = std::max(worst_edge, h);
      } else {
        best_corner = std::min(best_corner, h);
      }
    }
  }
  CHECK(worst_edge < best_corner);

  // across all anchor pairs the trend is a strong positive rank correlation
  // (boundary topology rules out exact global monotonicity)
  for (const GridSpec grid : {GridSpec{3, 3}, GridSpec{4, 4}}) {
    const ToyJointModel model = model_for(grid);
    std::vector<double> distances, entropies;
    for (int j = 0; j < grid.cell_count(); ++j) {
      for (int value = 0; value < 2; ++value) {
        MaskState state = MaskState::all_masked(grid);
        state.reveal(grid.coord_at(j), value);
        const auto masked = state.masked_cells();
        const auto marginals = exact_conditional_marginals(model, state);
        for (std::size_t i = 0; i < masked.size(); ++i) {
          distances.push_back(testsupport::euclid(masked[i], grid.coord_at(j)));
          entropies.push_back(testsupport::oracle_entropy(marginals[i]));
        }
      }
    }
    CHECK(testsupport::spearman(distances, entropies) >= 0.5);
  }
}

TEST_CASE("argument validation") {
  const ToyJointModel model = model_for(GridSpec{2, 2});
  MaskState state = MaskState::all_masked(model.grid);
  state.reveal(Coord{0, 0}, 1);

  CHECK_THROWS_AS(exact_conditional_marginal(model, state, Coord{0, 0}), std::invalid_argument);
  const std::vector<Coord> revealed_cell{Coord{0, 0}};
  CHECK_THROWS_AS(exact_conditional_joint(model, state, revealed_cell), std::invalid_argument);
  const std::vector<Coord> duplicated{Coord{0, 1}, Coord{0, 1}};
  CHECK_THROWS_AS(exact_conditional_joint(model, state, duplicated), std::invalid_argument);
  CHECK_THROWS_AS(state.reveal(Coord{0, 0}, 0), std::invalid_argument);
  CHECK_THROWS_AS(validate(ToyJointModel{GridSpec{2, 2}, 1}), std::invalid_argument);
  CHECK_THROWS_AS(validate(ToyJointModel{GridSpec{2, 2}, 2, -0.5}), std::invalid_argument);
}

TEST_SUITE_END();
