#include "catlock/record_io.hpp"

#include <fstream>
#include <sstream>

#include "catlock/errors.hpp"

namespace catlock {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kUnits =
    "t and event times in effective oscillation periods; positions in units of the ground-state width sqrt(2) Delta_x";

ordered_json header_json(const TrajectoryRecord& r) {
  ordered_json h;
  h["schema"] = kTrajectorySchema;
  h["schema_version"] = kTrajectorySchemaVersion;
  h["units"] = kUnits;
  h["seed"] = r.seed;
  h["initial_parity"] = r.initial_parity;
  h["filter_resets"] = r.filter_resets;
  h["config"] = r.config;
  ordered_json events = ordered_json::array();
  for (const TrajectoryEvent& e : r.events) {
    ordered_json ev;
    ev["kind"] = e.kind;
    ev["t"] = e.t;
    events.push_back(ev);
  }
  h["events"] = events;
  return h;
}

ordered_json row_json(const TrajectoryRow& r) {
  ordered_json j;
  j["t"] = r.t;
  j["x_true"] = r.x_true;
  j["x_est"] = r.x_est;
  j["parity_true"] = r.parity_true;
  j["parity_est"] = r.parity_est;
  j["n_true"] = r.n_true;
  j["n_est"] = r.n_est;
  j["mode"] = r.mode;
  j["mult"] = r.mult;
  j["x2_true"] = r.x2_true;
  j["x2_est"] = r.x2_est;
  j["purity"] = r.purity;
  j["window"] = r.window;
  return j;
}

template <typename T>
T field(const ordered_json& j, const char* name, std::size_t line) {
  auto it = j.find(name);
  if (it == j.end()) throw RecordIoError("line " + std::to_string(line) + ": missing field '" + name + "'");
  try {
    return it->template get<T>();
  } catch (const json::exception&) {
    throw RecordIoError("line " + std::to_string(line) + ": field '" + name + "' has the wrong type");
  }
}

}  // namespace

std::string to_ndjson(const TrajectoryRecord& record) {
  std::string out = header_json(record).dump();
  out += '\n';
  for (const TrajectoryRow& r : record.rows) {
    out += row_json(r).dump();
    out += '\n';
  }
  return out;
}

TrajectoryRecord from_ndjson(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  TrajectoryRecord record;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw RecordIoError("line " + std::to_string(number) + ": not a JSON object");
    if (!have_header) {
      if (field<std::string>(j, "schema", number) != kTrajectorySchema) {
        throw RecordIoError("not a trajectory record (schema '" + field<std::string>(j, "schema", number) + "')");
      }
      const int version = field<int>(j, "schema_version", number);
      if (version != kTrajectorySchemaVersion) {
        throw RecordIoError("unsupported schema_version " + std::to_string(version) + " (supported: " +
                            std::to_string(kTrajectorySchemaVersion) + ")");
      }
      record.seed = field<std::uint64_t>(j, "seed", number);
      record.initial_parity = field<std::string>(j, "initial_parity", number);
      record.filter_resets = field<int>(j, "filter_resets", number);
      record.config = j.at("config");
      for (const auto& e : j.at("events")) {
        record.events.push_back({field<std::string>(e, "kind", number), field<double>(e, "t", number)});
      }
      have_header = true;
      continue;
    }
    TrajectoryRow r;
    r.t = field<double>(j, "t", number);
    r.x_true = field<double>(j, "x_true", number);
    r.x_est = field<double>(j, "x_est", number);
    r.parity_true = field<double>(j, "parity_true", number);
    r.parity_est = field<double>(j, "parity_est", number);
    r.n_true = field<double>(j, "n_true", number);
    r.n_est = field<double>(j, "n_est", number);
    r.mode = field<std::string>(j, "mode", number);
    r.mult = field<double>(j, "mult", number);
    r.x2_true = field<double>(j, "x2_true", number);
    r.x2_est = field<double>(j, "x2_est", number);
    r.purity = field<double>(j, "purity", number);
    r.window = field<bool>(j, "window", number);
    record.rows.push_back(std::move(r));
  }
  if (!have_header) throw RecordIoError("empty record file (no header line)");
  return record;
}

void write_records(const TrajectoryRecord& record, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RecordIoError("cannot open '" + path + "' for writing");
  out << to_ndjson(record);
  out.flush();
  if (!out) throw RecordIoError("write to '" + path + "' failed");
}

TrajectoryRecord read_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RecordIoError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return from_ndjson(buffer.str());
  } catch (const RecordIoError& e) {
    throw RecordIoError(path + ": " + e.what());
  }
}

}  // namespace catlock
