#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace shopsim {

// Entry point behind tools/shopsim.cpp; exposed so tests can drive the CLI
// in-process. Exit codes: 0 ok, 1 config error, 2 tick exhaustion, 64 usage.
int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

struct EpisodeValidation {
  bool ok = false;
  long gate_violations = 0;
  long ticks_checked = 0;
  std::vector<std::string> problems;
};

// Machine-checks a finished episode directory: artifact presence and schema,
// plus the one-gate-per-tick invariant over gates.jsonl.
EpisodeValidation validate_episode_dir(const std::filesystem::path& dir);

struct ReplayReport {
  long decisions = 0;
  long agreements = 0;
  std::vector<std::string> lines;
  std::vector<std::string> warnings;
};

// Re-runs the deterministic policy over every logged decision context and
// diffs it against the logged actions.
ReplayReport replay_episode_dir(const std::filesystem::path& dir);

}  // namespace shopsim
