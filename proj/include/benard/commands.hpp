#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace benard {

struct CommandOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;  // overrides the config
  int threads = 0;                    // 0: OpenMP default
  std::string out_dir;                // overrides output.dir
  std::string basis_cache;            // optional BNRD basis cache
};

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSelftest = 3;

int cmd_simulate(const CommandOptions& opt);
int cmd_skeleton(const CommandOptions& opt);
int cmd_mam(const CommandOptions& opt);
int cmd_weakconv(const CommandOptions& opt);
int cmd_compactness(const CommandOptions& opt);
int cmd_increments(const CommandOptions& opt);
int cmd_mcldp(const CommandOptions& opt);
int cmd_diagnostics(const CommandOptions& opt);
/// Built-in free-slip checks; prints one line per check to `report`.
int cmd_selftest(const CommandOptions& opt, std::ostream& report);

}  // namespace benard
