#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "unmask/schedulers.hpp"
#include "unmask/simulate.hpp"

namespace unmask {

// Header fields of the schedule file. The on-disk format is a single JSON
// object: {version, height, width, steps, scheduler, seed?, params,
// body: [[[row, col], ...], ...]} with integer cells.
struct ScheduleFileMeta {
  int version = 1;
  std::string scheduler;
  std::optional<std::uint64_t> seed;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
};

void write_schedule_file(const std::filesystem::path& path, const Schedule& schedule,
                         const ScheduleFileMeta& meta);

// Parses and validates (partition check included). Throws
// std::invalid_argument on malformed content.
std::pair<Schedule, ScheduleFileMeta> read_schedule_file(const std::filesystem::path& path);

// One per-step CSV row. Non-finite distances and missing KL values are
// emitted as empty fields.
struct MetricsRow {
  int step = 0;
  std::string scheduler;
  double entropy_sum_nats = 0.0;
  double intra_min_nn = 0.0;
  double intra_mean_nn = 0.0;
  double mean_dist_revealed = 0.0;
  std::optional<double> kl_step_nats;
};

inline constexpr const char* kMetricsCsvHeader =
    "step,scheduler,entropy_sum_nats,intra_min_nn,intra_mean_nn,mean_dist_revealed,kl_step_nats";

std::string metrics_csv(std::span<const MetricsRow> rows);

// Shortest round-trip decimal form; deterministic for identical inputs.
std::string format_double(double value);

// Writes via a temp file in the same directory plus rename.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);
void write_binary_atomic(const std::filesystem::path& path, std::span<const char> content);

// Binary portable graymap of an entropy map: masked cells scale linearly
// from 0 (zero entropy) to 254 (log vocab_size); revealed cells hold 255.
std::string pgm_bytes(const EntropyMap& map, int vocab_size);
void write_pgm(const std::filesystem::path& path, const EntropyMap& map, int vocab_size);

}  // namespace unmask
