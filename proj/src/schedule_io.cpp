#include "unmask/schedule_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "unmask/errors.hpp"

namespace unmask {

namespace {

std::string csv_field(double value) {
  if (!std::isfinite(value)) return "";  // sentinel for "not applicable"
  return format_double(value);
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

void write_text_atomic(const std::filesystem::path& path, std::string_view content) {
  write_binary_atomic(path, std::span<const char>(content.data(), content.size()));
}

void write_binary_atomic(const std::filesystem::path& path, std::span<const char> content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::invalid_argument("cannot open for writing: " + tmp.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw InternalError("short write: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

void write_schedule_file(const std::filesystem::path& path, const Schedule& schedule,
                         const ScheduleFileMeta& meta) {
  validate_partition(schedule);
  nlohmann::ordered_json doc;
  doc["version"] = meta.version;
  doc["height"] = schedule.grid.height;
  doc["width"] = schedule.grid.width;
  doc["steps"] = schedule.steps.size();
  doc["scheduler"] = meta.scheduler;
  if (meta.seed.has_value()) {
    doc["seed"] = *meta.seed;
  }
  doc["params"] = meta.params;

  nlohmann::ordered_json body = nlohmann::ordered_json::array();
  for (const auto& step : schedule.steps) {
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const Coord& c : step) {
      cells.push_back(nlohmann::ordered_json::array({c.row, c.col}));
    }
    body.push_back(std::move(cells));
  }
  doc["body"] = std::move(body);

  write_text_atomic(path, doc.dump(2) + "\n");
}

std::pair<Schedule, ScheduleFileMeta> read_schedule_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open schedule file: " + path.string());
  }
  nlohmann::ordered_json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("schedule file is not valid JSON: " + std::string(e.what()));
  }

  try {
    ScheduleFileMeta meta;
    meta.version = doc.at("version").get<int>();
    if (meta.version != 1) {
      throw std::invalid_argument("unsupported schedule file version");
    }
    meta.scheduler = doc.at("scheduler").get<std::string>();
    if (doc.contains("seed")) {
      meta.seed = doc.at("seed").get<std::uint64_t>();
    }
    if (doc.contains("params")) {
      meta.params = doc.at("params");
    }

    Schedule schedule;
    schedule.grid = GridSpec{doc.at("height").get<int>(), doc.at("width").get<int>()};
    const auto& body = doc.at("body");
    const auto declared_steps = doc.at("steps").get<std::size_t>();
    if (!body.is_array() || body.size() != declared_steps) {
      throw std::invalid_argument("schedule body does not match declared step count");
    }
    for (const auto& step : body) {
      std::vector<Coord> cells;
      for (const auto& cell : step) {
        if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number_integer() ||
            !cell[1].is_number_integer()) {
          throw std::invalid_argument("schedule body cells must be [row, col] integer pairs");
        }
        cells.push_back(Coord{cell[0].get<int>(), cell[1].get<int>()});
      }
      schedule.steps.push_back(std::move(cells));
    }
    validate_partition(schedule);
    return {std::move(schedule), std::move(meta)};
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("malformed schedule file: " + std::string(e.what()));
  }
}

std::string metrics_csv(std::span<const MetricsRow> rows) {
  std::string out = kMetricsCsvHeader;
  out += "\n";
  for (const MetricsRow& row : rows) {
    out += std::to_string(row.step);
    out += ",";
    out += row.scheduler;
    out += ",";
    out += csv_field(row.entropy_sum_nats);
    out += ",";
    out += csv_field(row.intra_min_nn);
    out += ",";
    out += csv_field(row.intra_mean_nn);
    out += ",";
    out += csv_field(row.mean_dist_revealed);
    out += ",";
    if (row.kl_step_nats.has_value()) {
      out += csv_field(*row.kl_step_nats);
    }
    out += "\n";
  }
  return out;
}

std::string pgm_bytes(const EntropyMap& map, int vocab_size) {
  validate(map.grid);
  if (vocab_size < 2) {
    throw std::invalid_argument("pgm_bytes: vocab_size must be >= 2");
  }
  const double max_entropy = std::log(static_cast<double>(vocab_size));
  std::string out = "P5\n" + std::to_string(map.grid.width) + " " +
                    std::to_string(map.grid.height) + "\n255\n";
  for (const double v : map.values) {
    unsigned char gray;
    if (v == EntropyMap::kRevealedSentinel) {
      gray = 255;
    } else {
      const double scaled = std::clamp(v / max_entropy, 0.0, 1.0) * 254.0;
      gray = static_cast<unsigned char>(std::lround(scaled));
    }
    out.push_back(static_cast<char>(gray));
  }
  return out;
}

void write_pgm(const std::filesystem::path& path, const EntropyMap& map, int vocab_size) {
  const std::string bytes = pgm_bytes(map, vocab_size);
  write_binary_atomic(path, std::span<const char>(bytes.data(), bytes.size()));
}

}  // namespace unmask
