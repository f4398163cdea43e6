#pragma once

#include <cstdint>
#include <vector>

#include "unmask/metrics.hpp"
#include "unmask/schedulers.hpp"
#include "unmask/toymodel.hpp"

namespace unmask {

// Anything that can estimate per-cell conditional token distributions. The
// exact MRF oracle below plays the role a trained network plays at scale.
class MarginalPredictor {
 public:
  virtual ~MarginalPredictor() = default;

  virtual int vocab_size() const = 0;

  // One normalized distribution per masked cell, aligned with
  // state.masked_cells() (row-major order).
  virtual std::vector<std::vector<double>> marginals(const MaskState& state) const = 0;
};

class ExactOraclePredictor final : public MarginalPredictor {
 public:
  explicit ExactOraclePredictor(ToyJointModel model);

  int vocab_size() const override { return model_.vocab_size; }
  std::vector<std::vector<double>> marginals(const MaskState& state) const override;
  const ToyJointModel& model() const { return model_; }

 private:
  ToyJointModel model_;
};

enum class SchedulerKind { Halton, Random, Confidence, Raster };

struct SchedulerSpec {
  SchedulerKind kind = SchedulerKind::Halton;
  ConfidenceConfig confidence;  // used when kind == Confidence
};

struct StepRecord {
  int step_index = 0;                  // 1-based
  std::vector<Coord> revealed_cells;   // commit order (row-major within the step)
  std::vector<int> sampled_values;     // aligned with revealed_cells
  std::vector<double> cell_entropies;  // marginal entropy of each cell at selection time
  StepMetrics metrics;
};

struct SamplingTrace {
  GridSpec grid;
  std::vector<StepRecord> steps;
  std::vector<int> final_values;  // row-major, fully assigned

  // The step partition this run actually used (fixed for halton/random/
  // raster, realized for confidence).
  Schedule realized_schedule() const;
};

// MaskGIT-style iterative unmasking: per step, query the predictor, sample a
// provisional value for every masked cell (marginal tempered by
// 1/value_temperature), commit the step's cells, repeat. Fixed-order
// schedulers commit their precomputed cells; the confidence scheduler picks
// top-k by noisy confidence among the provisional samples. All randomness
// derives from `seed` through three independent substreams (values, Gumbel
// selection noise, random-scheduler permutation), so selection noise never
// perturbs value sampling.
SamplingTrace run_sampling(const MarginalPredictor& predictor, const SchedulerSpec& scheduler,
                           const GridSpec& grid, const StepSizePlan& plan, std::uint64_t seed,
                           double value_temperature = 1.0);

// Replays a fixed schedule (e.g. a trace's realized partition) with the same
// seed; value draws reproduce because they depend only on the masked-set
// evolution and the value substream.
SamplingTrace run_sampling(const MarginalPredictor& predictor, const Schedule& schedule,
                           std::uint64_t seed, double value_temperature = 1.0);

// Per-cell marginal entropies for the masked cells; revealed cells hold the
// sentinel -1.
struct EntropyMap {
  GridSpec grid;
  std::vector<double> values;

  static constexpr double kRevealedSentinel = -1.0;
};

EntropyMap entropy_map(const MarginalPredictor& predictor, const MaskState& state);

}  // namespace unmask
