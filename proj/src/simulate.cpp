#include "unmask/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "unmask/errors.hpp"
#include "unmask/infotheory.hpp"
#include "unmask/rng.hpp"

namespace unmask {

namespace {

constexpr std::uint64_t kValueStream = 0;
constexpr std::uint64_t kGumbelStream = 1;
constexpr std::uint64_t kPermutationStream = 2;

void check_marginal(const std::vector<double>& dist, int vocab, Coord cell) {
  if (static_cast<int>(dist.size()) != vocab) {
    throw PredictorContractError("predictor returned distribution of wrong size", cell.row,
                                 cell.col);
  }
  double sum = 0.0;
  for (const double p : dist) {
    if (!std::isfinite(p) || p < 0.0) {
      throw PredictorContractError("predictor returned invalid probability", cell.row, cell.col);
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw PredictorContractError("predictor distribution sums to " + std::to_string(sum), cell.row,
                                 cell.col);
  }
}

// p^(1/T), renormalized; log-space for stability. T == 1 passes through
// untouched so faithful sampling stays exact.
std::vector<double> tempered(const std::vector<double>& p, double temperature) {
  if (temperature == 1.0) return p;
  double max_log = -std::numeric_limits<double>::infinity();
  std::vector<double> logs(p.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      logs[i] = std::log(p[i]) / temperature;
      max_log = std::max(max_log, logs[i]);
    }
  }
  std::vector<double> q(p.size(), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (std::isfinite(logs[i])) {
      q[i] = std::exp(logs[i] - max_log);
      sum += q[i];
    }
  }
  for (double& v : q) v /= sum;
  return q;
}

SamplingTrace run_core(const MarginalPredictor& predictor, const Schedule* fixed,
                       const ConfidenceConfig* confidence, const GridSpec& grid,
                       const StepSizePlan& plan, std::uint64_t seed, double value_temperature) {
  validate(grid);
  if (!(value_temperature > 0.0)) {
    throw std::invalid_argument("run_sampling: value_temperature must be positive");
  }
  if (plan.total != grid.cell_count()) {
    throw std::invalid_argument("run_sampling: plan does not match grid cell count");
  }
  if (fixed != nullptr) {
    validate_partition(*fixed);
  }

  std::mt19937_64 value_rng = rng::make_engine(seed, kValueStream);
  std::mt19937_64 gumbel_rng = rng::make_engine(seed, kGumbelStream);

  MaskState state = MaskState::all_masked(grid);
  SamplingTrace trace;
  trace.grid = grid;
  const int total_steps = plan.steps();
  trace.steps.reserve(static_cast<std::size_t>(total_steps));

  std::vector<Coord> revealed_so_far;
  revealed_so_far.reserve(static_cast<std::size_t>(grid.cell_count()));

  for (int s = 1; s <= total_steps; ++s) {
    const std::vector<Coord> masked = state.masked_cells();
    const auto marginals = predictor.marginals(state);
    if (marginals.size() != masked.size()) {
      throw PredictorContractError("predictor returned " + std::to_string(marginals.size()) +
                                       " distributions for " + std::to_string(masked.size()) +
                                       " masked cells",
                                   -1, -1);
    }

    std::vector<int> sampled(masked.size(), 0);
    std::vector<double> entropies(masked.size(), 0.0);
    for (std::size_t i = 0; i < masked.size(); ++i) {
      check_marginal(marginals[i], predictor.vocab_size(), masked[i]);
      const std::vector<double> q = tempered(marginals[i], value_temperature);
      sampled[i] = static_cast<int>(rng::sample_categorical(q, value_rng));
      entropies[i] = entropy(marginals[i]);
    }

    std::vector<Coord> chosen;
    if (fixed != nullptr) {
      chosen = fixed->steps[static_cast<std::size_t>(s - 1)];
    } else {
      const double step_fraction = static_cast<double>(s - 1) / static_cast<double>(total_steps);
      chosen = confidence_select(masked, marginals, sampled,
                                 plan.counts[static_cast<std::size_t>(s - 1)], *confidence,
                                 step_fraction, gumbel_rng);
    }

    std::vector<std::size_t> index_of_rank(static_cast<std::size_t>(grid.cell_count()), 0);
    for (std::size_t i = 0; i < masked.size(); ++i) {
      index_of_rank[static_cast<std::size_t>(grid.rank(masked[i]))] = i;
    }

    StepRecord record;
    record.step_index = s;
    record.revealed_cells = chosen;
    record.sampled_values.reserve(chosen.size());
    record.cell_entropies.reserve(chosen.size());
    double entropy_sum = 0.0;
    for (const Coord& c : chosen) {
      if (!state.is_masked(c)) {
        throw InternalError("run_sampling: cell revealed twice");
      }
      const std::size_t i = index_of_rank[static_cast<std::size_t>(grid.rank(c))];
      record.sampled_values.push_back(sampled[i]);
      record.cell_entropies.push_back(entropies[i]);
      entropy_sum += entropies[i];
    }

    const SpreadStats spread = intra_step_spread(chosen);
    record.metrics.step_index = s;
    record.metrics.entropy_sum = entropy_sum;
    record.metrics.intra_min_nn = spread.min_nn;
    record.metrics.intra_mean_nn = spread.mean_nn;
    record.metrics.mean_dist_to_revealed =
        revealed_so_far.empty() ? std::numeric_limits<double>::quiet_NaN()
                                : distance_to_revealed(chosen, revealed_so_far);

    for (std::size_t i = 0; i < chosen.size(); ++i) {
      state.reveal(chosen[i], record.sampled_values[i]);
      revealed_so_far.push_back(chosen[i]);
    }
    record.metrics.tokens_revealed_cumulative = static_cast<int>(revealed_so_far.size());
    trace.steps.push_back(std::move(record));
  }

  if (state.masked_count() != 0) {
    throw InternalError("run_sampling: grid not fully revealed");
  }
  trace.final_values = state.raw_values();
  return trace;
}

}  // namespace

ExactOraclePredictor::ExactOraclePredictor(ToyJointModel model) : model_(std::move(model)) {
  validate(model_);
}

std::vector<std::vector<double>> ExactOraclePredictor::marginals(const MaskState& state) const {
  return exact_conditional_marginals(model_, state);
}

Schedule SamplingTrace::realized_schedule() const {
  Schedule schedule{grid, {}};
  schedule.steps.reserve(steps.size());
  for (const StepRecord& record : steps) {
    schedule.steps.push_back(record.revealed_cells);
  }
  return schedule;
}

SamplingTrace run_sampling(const MarginalPredictor& predictor, const SchedulerSpec& scheduler,
                           const GridSpec& grid, const StepSizePlan& plan, std::uint64_t seed,
                           double value_temperature) {
  switch (scheduler.kind) {
    case SchedulerKind::Halton: {
      const Schedule schedule = halton_schedule(grid, plan);
      return run_core(predictor, &schedule, nullptr, grid, plan, seed, value_temperature);
    }
    case SchedulerKind::Raster: {
      const Schedule schedule = raster_schedule(grid, plan);
      return run_core(predictor, &schedule, nullptr, grid, plan, seed, value_temperature);
    }
    case SchedulerKind::Random: {
      const Schedule schedule =
          random_schedule(grid, plan, rng::derive_seed(seed, kPermutationStream));
      return run_core(predictor, &schedule, nullptr, grid, plan, seed, value_temperature);
    }
    case SchedulerKind::Confidence:
      return run_core(predictor, nullptr, &scheduler.confidence, grid, plan, seed,
                      value_temperature);
  }
  throw InternalError("run_sampling: unknown scheduler kind");
}

SamplingTrace run_sampling(const MarginalPredictor& predictor, const Schedule& schedule,
                           std::uint64_t seed, double value_temperature) {
  StepSizePlan plan;
  plan.total = schedule.grid.cell_count();
  plan.counts.reserve(schedule.steps.size());
  for (const auto& step : schedule.steps) {
    plan.counts.push_back(static_cast<int>(step.size()));
  }
  return run_core(predictor, &schedule, nullptr, schedule.grid, plan, seed, value_temperature);
}

EntropyMap entropy_map(const MarginalPredictor& predictor, const MaskState& state) {
  const std::vector<Coord> masked = state.masked_cells();
  const auto marginals = predictor.marginals(state);
  if (marginals.size() != masked.size()) {
    throw PredictorContractError("predictor returned wrong number of distributions", -1, -1);
  }

  EntropyMap map;
  map.grid = state.grid();
  map.values.assign(static_cast<std::size_t>(state.grid().cell_count()),
                    EntropyMap::kRevealedSentinel);
  for (std::size_t i = 0; i < masked.size(); ++i) {
    check_marginal(marginals[i], predictor.vocab_size(), masked[i]);
    map.values[static_cast<std::size_t>(state.grid().rank(masked[i]))] = entropy(marginals[i]);
  }
  return map;
}

}  // namespace unmask
