#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "test_support.hpp"
#include "unmask/rng.hpp"
#include "unmask/schedulers.hpp"

using namespace unmask;

TEST_SUITE_BEGIN("schedulers");

TEST_CASE("step size plans") {
  CHECK(step_size_plan(4, 4, PlanShape::Linear).counts == std::vector<int>{1, 1, 1, 1});
  CHECK(step_size_plan(10, 1, PlanShape::Linear).counts == std::vector<int>{10});
  CHECK(step_size_plan(10, 1, PlanShape::Cosine).counts == std::vector<int>{10});
  CHECK(step_size_plan(10, 3, PlanShape::Linear).counts == std::vector<int>{3, 3, 4});

  const StepSizePlan plan = step_size_plan(1024, 32, PlanShape::Cosine);
  CHECK(std::accumulate(plan.counts.begin(), plan.counts.end(), 0) == 1024);
  CHECK(*std::min_element(plan.counts.begin(), plan.counts.end()) >= 1);
  CHECK(std::is_sorted(plan.counts.begin(), plan.counts.end()));
  CHECK(plan.counts.front() < plan.counts.back());

  CHECK_THROWS_AS(step_size_plan(16, 20, PlanShape::Cosine), std::invalid_argument);
  CHECK_THROWS_AS(step_size_plan(16, 0, PlanShape::Linear), std::invalid_argument);
  CHECK_THROWS_AS(step_size_plan(0, 1, PlanShape::Linear), std::invalid_argument);
}

TEST_CASE("halton schedule slices the halton order") {
  const GridSpec grid{2, 2};
  const Schedule singletons = halton_schedule(grid, step_size_plan(4, 4, PlanShape::Linear));
  CHECK(singletons.steps == std::vector<std::vector<Coord>>{
                                {{0, 1}}, {{1, 0}}, {{0, 0}}, {{1, 1}}});

  const Schedule one_step = halton_schedule(grid, step_size_plan(4, 1, PlanShape::Linear));
  REQUIRE(one_step.steps.size() == 1);
  CHECK(one_step.steps[0].size() == 4);

  const GridSpec big{32, 32};
  const Schedule sliced = halton_schedule(big, step_size_plan(1024, 32, PlanShape::Linear));
  CHECK_NOTHROW(validate_partition(sliced));

  CHECK(halton_schedule(grid, step_size_plan(4, 2, PlanShape::Linear)) ==
        halton_schedule(grid, step_size_plan(4, 2, PlanShape::Linear)));
}

TEST_CASE("random schedule is seeded and uniform over first cells") {
  const GridSpec grid{4, 4};
  const StepSizePlan plan = step_size_plan(16, 4, PlanShape::Linear);
  CHECK(random_schedule(grid, plan, 42) == random_schedule(grid, plan, 42));
  CHECK_FALSE(random_schedule(grid, plan, 42) == random_schedule(grid, plan, 43));

  const Schedule single = random_schedule(grid, step_size_plan(16, 1, PlanShape::Linear), 7);
  REQUIRE(single.steps.size() == 1);
  CHECK(single.steps[0].size() == 16);

  std::vector<int> first_cell_counts(16, 0);
  for (std::uint64_t seed = 0; seed < 10'000; ++seed) {
    const Schedule s = random_schedule(grid, plan, seed);
    ++first_cell_counts[static_cast<std::size_t>(grid.rank(s.steps[0][0]))];
  }
  for (const int count : first_cell_counts) {
    CHECK(std::abs(count / 10'000.0 - 1.0 / 16.0) <= 0.01);
  }
}

TEST_CASE("partition property over random grids and plans") {
  std::mt19937_64 engine(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const int h = 1 + static_cast<int>(rng::uniform_index(engine, 16));
    const int w = 1 + static_cast<int>(rng::uniform_index(engine, 16));
    const GridSpec grid{h, w};
    const int n = grid.cell_count();
    const int steps = 1 + static_cast<int>(rng::uniform_index(engine, static_cast<std::size_t>(n)));
    const PlanShape shape = trial % 2 == 0 ? PlanShape::Cosine : PlanShape::Linear;
    const StepSizePlan plan = step_size_plan(n, steps, shape);

    const Schedule schedules[] = {
        halton_schedule(grid, plan),
        random_schedule(grid, plan, engine()),
        raster_schedule(grid, plan),
    };
    for (const Schedule& schedule : schedules) {
      CHECK_NOTHROW(validate_partition(schedule));
      REQUIRE(schedule.steps.size() == plan.counts.size());
      for (std::size_t s = 0; s < schedule.steps.size(); ++s) {
        CHECK(static_cast<int>(schedule.steps[s].size()) == plan.counts[s]);
      }
    }
  }
}

TEST_CASE("zero-noise confidence selection is top-k by log probability") {
  std::mt19937_64 gumbel(1);
  const ConfidenceConfig zero_noise{0.0, 1.0, GumbelDecay::Linear};

  const std::vector<Coord> cells{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  const std::vector<std::vector<double>> marginals{
      {0.6, 0.4}, {0.1, 0.9}, {0.5, 0.5}, {0.75, 0.25}};
  const std::vector<int> sampled{0, 1, 0, 0};
  // log-probabilities: 0.6, 0.9, 0.5, 0.75 -> unique max at (0,1)
  const auto top1 = confidence_select(cells, marginals, sampled, 1, zero_noise, 0.0, gumbel);
  CHECK(top1 == std::vector<Coord>{{0, 1}});

  const auto top2 = confidence_select(cells, marginals, sampled, 2, zero_noise, 0.0, gumbel);
  CHECK(top2 == std::vector<Coord>{{0, 1}, {1, 1}});

  // all confidences equal: ties break by row-major order
  const std::vector<std::vector<double>> flat(4, std::vector<double>{0.5, 0.5});
  const std::vector<int> flat_sampled{0, 1, 0, 1};
  const auto tied = confidence_select(cells, flat, flat_sampled, 2, zero_noise, 0.0, gumbel);
  CHECK(tied == std::vector<Coord>{{0, 0}, {0, 1}});
}

TEST_CASE("zero-noise selection matches a brute-force sort") {
  std::mt19937_64 engine(99);
  std::mt19937_64 gumbel(1);
  const ConfidenceConfig zero_noise{0.0, 1.0, GumbelDecay::Linear};
  for (int trial = 0; trial < 25; ++trial) {
    const int count = 3 + static_cast<int>(rng::uniform_index(engine, 20));
    std::vector<Coord> cells;
    std::vector<std::vector<double>> marginals;
    std::vector<int> sampled;
    for (int i = 0; i < count; ++i) {
      cells.push_back(Coord{i / 8, i % 8});
      const double p = 0.05 + 0.9 * rng::canonical(engine);
      marginals.push_back({p, 1.0 - p});
      sampled.push_back(static_cast<int>(rng::uniform_index(engine, 2)));
    }
    const int k = 1 + static_cast<int>(rng::uniform_index(engine, static_cast<std::size_t>(count)));

    std::vector<std::size_t> idx(cells.size());
    std::iota(idx.begin(), idx.end(), 0u);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return marginals[a][static_cast<std::size_t>(sampled[a])] >
             marginals[b][static_cast<std::size_t>(sampled[b])];
    });
    std::vector<Coord> expected;
    for (int i = 0; i < k; ++i) expected.push_back(cells[idx[static_cast<std::size_t>(i)]]);
    std::sort(expected.begin(), expected.end());

    CHECK(confidence_select(cells, marginals, sampled, k, zero_noise, 0.4, gumbel) == expected);
  }
}

TEST_CASE("gumbel noise flips selections at the logistic rate") {
  // two cells with log-probs 0 and -1; P(noisier pick) = 1/(1+exp(1/scale))
  const double scale = 4.5;
  const ConfidenceConfig config{scale, 1.0, GumbelDecay::Linear};
  const std::vector<Coord> cells{{0, 0}, {0, 1}};
  const std::vector<std::vector<double>> marginals{{1.0, 0.0}, {std::exp(-1.0), 1.0 - std::exp(-1.0)}};
  const std::vector<int> sampled{0, 0};

  std::mt19937_64 gumbel(555);
  int lower_picked = 0;
  const int trials = 10'000;
  for (int t = 0; t < trials; ++t) {
    const auto picked = confidence_select(cells, marginals, sampled, 1, config, 0.0, gumbel);
    if (picked[0] == Coord{0, 1}) ++lower_picked;
  }
  const double expected = 1.0 / (1.0 + std::exp(1.0 / scale));
  CHECK(std::abs(lower_picked / static_cast<double>(trials) - expected) <= 0.02);
}

TEST_CASE("confidence selection rejects bad input") {
  std::mt19937_64 gumbel(1);
  const ConfidenceConfig config{0.0, 1.0, GumbelDecay::Linear};
  const std::vector<Coord> cells{{0, 0}};
  const std::vector<std::vector<double>> marginals{{0.5, 0.5}};
  const std::vector<int> sampled{0};
  CHECK_THROWS_AS(confidence_select(cells, marginals, sampled, 2, config, 0.0, gumbel),
                  std::invalid_argument);
  const std::vector<std::vector<double>> bad{{0.7, 0.7}};
  CHECK_THROWS_AS(confidence_select(cells, bad, sampled, 1, config, 0.0, gumbel),
                  std::invalid_argument);
}

TEST_SUITE_END();
