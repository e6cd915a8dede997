#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "benard/config.hpp"
#include "benard/integrators.hpp"
#include "benard/noise.hpp"

namespace benard {

/// Shortest round-trip decimal form (stable across runs on one platform).
std::string format_number(double v);

/// Row-flushed CSV file; a partially written file is still well formed.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& cells);

 private:
  std::ofstream out_;
};

/// t, H_norm_sq, V_norm_sq, sup_monitor, int_monitor
void write_summary_csv(const std::string& path, const TrajectoryRecord& rec);
/// t, mode_id, value (mode_id = state index, velocity modes first)
void write_control_csv(const std::string& path, const ControlPath& h);
void write_snapshots(const std::string& path, const TrajectoryRecord& rec);

/// git blob object id ("blob <size>\0" + bytes, SHA-1) in hex.
std::string content_hash(const std::string& bytes);

struct ManifestInfo {
  std::string command;
  std::string config_path;
  std::string config_text;
  std::uint64_t seed = 0;
  int threads = 0;
};
/// Written before any result file; enough to re-run the experiment.
void write_manifest(const std::string& dir, const ManifestInfo& info, const RunConfig& cfg);
void append_manifest(const std::string& dir, const std::string& line);

}  // namespace benard
