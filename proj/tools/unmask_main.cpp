// Command-line front end: generate schedules, compare schedulers on the toy
// model, and emit entropy-map frames. All randomized outputs take an
// explicit --seed; without one a generated seed is printed so the run stays
// reproducible.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "unmask/errors.hpp"
#include "unmask/infotheory.hpp"
#include "unmask/schedule_io.hpp"
#include "unmask/schedulers.hpp"
#include "unmask/simulate.hpp"

namespace {

using namespace unmask;

struct Options {
  std::string grid_text;
  int steps = 0;
  std::vector<std::string> schedulers{"halton"};
  std::optional<std::uint64_t> seed;
  int vocab = 2;
  double beta = 1.0;
  double lambda = 1.0;
  double radius = std::numbers::sqrt2;
  std::string plan = "cosine";
  double gumbel_scale = 4.5;
  double temperature = 1.0;
  bool exact = false;
  std::string numeric = "float";
  std::string out_dir = ".";
};

GridSpec parse_grid(const std::string& text) {
  const auto sep = text.find('x');
  if (sep == std::string::npos) {
    throw std::invalid_argument("--grid must look like HxW, got '" + text + "'");
  }
  const auto parse_int = [&](std::string_view part) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (ec != std::errc() || ptr != part.data() + part.size()) {
      throw std::invalid_argument("--grid must look like HxW, got '" + text + "'");
    }
    return value;
  };
  GridSpec grid{parse_int(std::string_view(text).substr(0, sep)),
                parse_int(std::string_view(text).substr(sep + 1))};
  validate(grid);
  return grid;
}

PlanShape parse_plan(const std::string& name) {
  if (name == "cosine") return PlanShape::Cosine;
  if (name == "linear") return PlanShape::Linear;
  throw std::invalid_argument("--plan must be cosine or linear");
}

NumericMode parse_numeric(const std::string& name) {
  if (name == "float") return NumericMode::Float;
  if (name == "rational") return NumericMode::Rational;
  throw std::invalid_argument("--numeric must be float or rational");
}

SchedulerKind parse_scheduler(const std::string& name) {
  if (name == "halton") return SchedulerKind::Halton;
  if (name == "random") return SchedulerKind::Random;
  if (name == "confidence") return SchedulerKind::Confidence;
  if (name == "raster" || name == "clustered") return SchedulerKind::Raster;
  throw std::invalid_argument("unknown scheduler '" + name +
                              "' (expected halton, random, confidence, or raster)");
}

bool scheduler_uses_seed(SchedulerKind kind) {
  return kind == SchedulerKind::Random || kind == SchedulerKind::Confidence;
}

std::uint64_t ensure_seed(Options& opts) {
  if (!opts.seed.has_value()) {
    std::random_device device;
    const std::uint64_t generated =
        (static_cast<std::uint64_t>(device()) << 32) ^ static_cast<std::uint64_t>(device());
    std::cout << "generated seed: " << generated << "\n";
    opts.seed = generated;
  }
  return *opts.seed;
}

ToyJointModel make_model(const Options& opts, const GridSpec& grid) {
  ToyJointModel model{grid, opts.vocab, opts.beta, opts.lambda, opts.radius};
  validate(model);
  return model;
}

SchedulerSpec make_spec(const Options& opts, SchedulerKind kind) {
  SchedulerSpec spec;
  spec.kind = kind;
  spec.confidence.gumbel_scale_initial = opts.gumbel_scale;
  spec.confidence.softmax_temperature = opts.temperature;
  return spec;
}

std::filesystem::path prepare_out_dir(const Options& opts) {
  std::filesystem::path dir(opts.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void add_common_flags(CLI::App* cmd, Options& opts, bool scheduler_list) {
  cmd->add_option("--grid", opts.grid_text, "token grid as HxW, e.g. 32x32")->required();
  cmd->add_option("--steps", opts.steps, "number of unmasking steps")->required();
  if (scheduler_list) {
    cmd->add_option("--scheduler", opts.schedulers,
                    "schedulers to compare (halton, random, confidence, raster)")
        ->delimiter(',');
  } else {
    cmd->add_option("--scheduler", opts.schedulers,
                    "scheduler (halton, random, confidence, raster)")
        ->expected(1);
  }
  cmd->add_option("--seed", opts.seed, "seed for all randomized behavior");
  cmd->add_option("--vocab", opts.vocab, "toy-model vocabulary size");
  cmd->add_option("--beta", opts.beta, "toy-model coupling strength");
  cmd->add_option("--lambda", opts.lambda, "toy-model correlation length scale");
  cmd->add_option("--radius", opts.radius, "toy-model interaction radius");
  cmd->add_option("--plan", opts.plan, "step-size shape: cosine or linear");
  cmd->add_option("--gumbel-scale", opts.gumbel_scale,
                  "initial Gumbel noise scale for the confidence scheduler");
  cmd->add_option("--temperature", opts.temperature, "value-sampling softmax temperature");
  cmd->add_option("--numeric", opts.numeric, "halton discretization backend: float or rational");
  cmd->add_option("--out", opts.out_dir, "output directory");
}

int cmd_schedule(Options& opts) {
  const GridSpec grid = parse_grid(opts.grid_text);
  const StepSizePlan plan = step_size_plan(grid.cell_count(), opts.steps, parse_plan(opts.plan));
  const SchedulerKind kind = parse_scheduler(opts.schedulers.at(0));

  Schedule schedule;
  ScheduleFileMeta meta;
  meta.scheduler = opts.schedulers.at(0) == "clustered" ? "raster" : opts.schedulers.at(0);
  meta.params["plan"] = opts.plan;

  switch (kind) {
    case SchedulerKind::Halton:
      meta.params["numeric"] = opts.numeric;
      schedule = halton_schedule(grid, plan, parse_numeric(opts.numeric));
      break;
    case SchedulerKind::Raster:
      schedule = raster_schedule(grid, plan);
      break;
    case SchedulerKind::Random:
      meta.seed = ensure_seed(opts);
      schedule = random_schedule(grid, plan, *meta.seed);
      break;
    case SchedulerKind::Confidence: {
      meta.seed = ensure_seed(opts);
      meta.params["vocab"] = opts.vocab;
      meta.params["beta"] = opts.beta;
      meta.params["lambda"] = opts.lambda;
      meta.params["radius"] = opts.radius;
      meta.params["gumbel_scale"] = opts.gumbel_scale;
      meta.params["temperature"] = opts.temperature;
      const ExactOraclePredictor predictor(make_model(opts, grid));
      const SamplingTrace trace = run_sampling(predictor, make_spec(opts, kind), grid, plan,
                                               *meta.seed, opts.temperature);
      schedule = trace.realized_schedule();
      break;
    }
  }

  const auto path = prepare_out_dir(opts) / "schedule.json";
  write_schedule_file(path, schedule, meta);
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

int cmd_compare(Options& opts) {
  const GridSpec grid = parse_grid(opts.grid_text);
  const StepSizePlan plan = step_size_plan(grid.cell_count(), opts.steps, parse_plan(opts.plan));
  const ToyJointModel model = make_model(opts, grid);
  const ExactOraclePredictor predictor(model);

  bool needs_seed = false;
  for (const auto& name : opts.schedulers) {
    needs_seed = needs_seed || scheduler_uses_seed(parse_scheduler(name));
  }
  const std::uint64_t seed = needs_seed ? ensure_seed(opts) : opts.seed.value_or(0);

  std::vector<MetricsRow> rows;
  std::string summary;
  for (const auto& name : opts.schedulers) {
    const SchedulerKind kind = parse_scheduler(name);
    const std::string label = name == "clustered" ? "raster" : name;
    const SamplingTrace trace =
        run_sampling(predictor, make_spec(opts, kind), grid, plan, seed, opts.temperature);

    std::vector<std::optional<double>> step_kl(trace.steps.size());
    if (opts.exact) {
      MaskState state = MaskState::all_masked(grid);
      for (std::size_t s = 0; s < trace.steps.size(); ++s) {
        const StepRecord& record = trace.steps[s];
        step_kl[s] = step_mi(model, state, record.revealed_cells, record.step_index)
                         .kl_joint_vs_product;
        for (std::size_t i = 0; i < record.revealed_cells.size(); ++i) {
          state.reveal(record.revealed_cells[i], record.sampled_values[i]);
        }
      }
      const double aggregate = aggregate_mi(model, trace.realized_schedule());
      summary += "scheduler=" + label + " aggregate_mi_nats=" + format_double(aggregate) + "\n";
    }

    for (std::size_t s = 0; s < trace.steps.size(); ++s) {
      const StepMetrics& m = trace.steps[s].metrics;
      rows.push_back(MetricsRow{m.step_index, label, m.entropy_sum, m.intra_min_nn,
                                m.intra_mean_nn, m.mean_dist_to_revealed, step_kl[s]});
    }
  }

  const auto dir = prepare_out_dir(opts);
  write_text_atomic(dir / "metrics.csv", metrics_csv(rows));
  std::cout << "wrote " << (dir / "metrics.csv").string() << "\n";
  if (opts.exact) {
    write_text_atomic(dir / "summary.txt", summary);
    std::cout << summary;
  }
  return 0;
}

int cmd_entropy_maps(Options& opts) {
  const GridSpec grid = parse_grid(opts.grid_text);
  const StepSizePlan plan = step_size_plan(grid.cell_count(), opts.steps, parse_plan(opts.plan));
  const ToyJointModel model = make_model(opts, grid);
  const ExactOraclePredictor predictor(model);
  const SchedulerKind kind = parse_scheduler(opts.schedulers.at(0));
  const std::uint64_t seed = scheduler_uses_seed(kind) ? ensure_seed(opts) : opts.seed.value_or(0);

  const SamplingTrace trace =
      run_sampling(predictor, make_spec(opts, kind), grid, plan, seed, opts.temperature);

  const auto dir = prepare_out_dir(opts);
  const int pad = static_cast<int>(std::to_string(trace.steps.size()).size());

  std::string csv = "step,row,col,revealed,entropy_nats\n";
  MaskState state = MaskState::all_masked(grid);
  for (const StepRecord& record : trace.steps) {
    for (std::size_t i = 0; i < record.revealed_cells.size(); ++i) {
      state.reveal(record.revealed_cells[i], record.sampled_values[i]);
    }
    const EntropyMap map = entropy_map(predictor, state);

    char name[64];
    std::snprintf(name, sizeof(name), "entropy_step_%0*d.pgm", pad, record.step_index);
    write_pgm(dir / name, map, model.vocab_size);

    for (int rank = 0; rank < grid.cell_count(); ++rank) {
      const Coord c = grid.coord_at(rank);
      const double v = map.values[static_cast<std::size_t>(rank)];
      const bool revealed = v == EntropyMap::kRevealedSentinel;
      csv += std::to_string(record.step_index) + "," + std::to_string(c.row) + "," +
             std::to_string(c.col) + "," + (revealed ? "1," : "0,") +
             (revealed ? "" : format_double(v)) + "\n";
    }
  }
  write_text_atomic(dir / "entropies.csv", csv);
  std::cout << "wrote " << trace.steps.size() << " frames to " << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"token-unmasking schedulers and exact mutual-information diagnostics"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read defaults from a config file");
  app.allow_config_extras(false);

  Options schedule_opts, compare_opts, maps_opts;
  compare_opts.schedulers = {"halton", "random", "confidence"};

  CLI::App* schedule_cmd = app.add_subcommand("schedule", "write a schedule file");
  add_common_flags(schedule_cmd, schedule_opts, false);

  CLI::App* compare_cmd = app.add_subcommand("compare", "per-step metrics CSV for schedulers");
  add_common_flags(compare_cmd, compare_opts, true);
  compare_cmd->add_flag("--exact", compare_opts.exact,
                        "also compute per-step KL and aggregate MI (small grids only)");

  CLI::App* maps_cmd = app.add_subcommand("entropy-maps", "per-step entropy map PGM frames");
  add_common_flags(maps_cmd, maps_opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (schedule_cmd->parsed()) return cmd_schedule(schedule_opts);
    if (compare_cmd->parsed()) return cmd_compare(compare_opts);
    if (maps_cmd->parsed()) return cmd_entropy_maps(maps_opts);
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceLimitError& e) {
    std::cerr << "resource limit: " << e.what() << " (try a smaller grid or vocabulary)\n";
    return 3;
  } catch (const PredictorContractError& e) {
    std::cerr << "predictor contract violation at cell (" << e.row << "," << e.col
              << "): " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
