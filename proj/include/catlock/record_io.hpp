#pragma once

#include <string>

#include "catlock/orchestrator.hpp"

namespace catlock {

inline constexpr const char* kTrajectorySchema = "catlock.trajectory";
inline constexpr int kTrajectorySchemaVersion = 1;

/// Row fields, in file order.
inline constexpr const char* kRowFields[] = {"t",      "x_true", "x_est", "parity_true", "parity_est", "n_true",
                                             "n_est",  "mode",   "mult",  "x2_true",     "x2_est",     "purity",
                                             "window"};

/// Newline-delimited JSON: one header line, then one line per row.
std::string to_ndjson(const TrajectoryRecord& record);
/// Throws RecordIoError on malformed input or an unsupported schema version.
TrajectoryRecord from_ndjson(const std::string& text);

/// Errors carry the path.
void write_records(const TrajectoryRecord& record, const std::string& path);
TrajectoryRecord read_records(const std::string& path);

}  // namespace catlock
