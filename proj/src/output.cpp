#include "benard/output.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <openssl/sha.h>

#include <filesystem>

#include "benard/basis_io.hpp"

namespace benard {

std::string format_number(double v) { return fmt::format("{}", v); }

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::trunc) {
  if (!out_) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  out_ << fmt::format("{}\n", fmt::join(cells, ","));
  out_.flush();
}

void CsvWriter::row(const std::vector<double>& cells) {
  std::vector<std::string> s;
  s.reserve(cells.size());
  for (double v : cells) s.push_back(format_number(v));
  row(s);
}

void write_summary_csv(const std::string& path, const TrajectoryRecord& rec) {
  CsvWriter csv(path, {"t", "H_norm_sq", "V_norm_sq", "sup_monitor", "int_monitor"});
  for (int i = 0; i < rec.size(); ++i)
    csv.row(std::vector<double>{rec.times[i], rec.h_sq[i], rec.v_sq[i], rec.sup_h_sq[i], rec.int_v_sq[i]});
}

void write_control_csv(const std::string& path, const ControlPath& h) {
  CsvWriter csv(path, {"t", "mode_id", "value"});
  for (int k = 0; k < h.steps(); ++k)
    for (int j = 0; j < h.state_size(); ++j)
      csv.row({format_number(k * h.dt()), std::to_string(j), format_number(h.values(k, j))});
}

void write_snapshots(const std::string& path, const TrajectoryRecord& rec) {
  Snapshots s;
  s.velocity_size = rec.velocity_size;
  s.temperature_size = rec.states.empty() ? 0 : static_cast<int>(rec.states[0].size()) - rec.velocity_size;
  s.times = rec.times;
  s.states = rec.states;
  save_snapshots(s, path);
}

std::string content_hash(const std::string& bytes) {
  const std::string blob = fmt::format("blob {}", bytes.size()) + std::string(1, '\0') + bytes;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), digest);
  std::string hex;
  for (unsigned char c : digest) hex += fmt::format("{:02x}", c);
  return hex;
}

void write_manifest(const std::string& dir, const ManifestInfo& info, const RunConfig& cfg) {
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / "manifest.txt", std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write manifest in '{}'", dir));
  out << "command = " << info.command << "\n";
  out << "config_path = " << info.config_path << "\n";
  out << "config_hash = " << content_hash(info.config_text) << "\n";
  out << "seed = " << info.seed << "\n";
  out << "threads = " << info.threads << "\n";
  out << "rerun = benard " << info.command << " --config " << info.config_path << " --seed "
      << info.seed << " --out " << dir << "\n";
  out << "[config]\n";
  for (const auto& [k, v] : cfg.echo) out << k << " = " << v << "\n";
  out << "[results]\n";
  out.flush();
}

void append_manifest(const std::string& dir, const std::string& line) {
  std::ofstream out(std::filesystem::path(dir) / "manifest.txt", std::ios::app);
  out << line << "\n";
}

}  // namespace benard
