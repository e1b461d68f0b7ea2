#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rissim/scenario.hpp"
#include "rissim/simulation.hpp"

namespace rissim {

/// What `sweep` iterates over.
struct SweepSpec {
  std::vector<Case> cases;
  std::vector<double> peak_demand_mbps;
  std::vector<int> element_counts;
  std::vector<int> psr_bits;
  int realizations = 1000;
};

/// A scenario plus the experiment settings that surround it. Run i uses
/// seed scenario.seed + i.
struct ExperimentConfig {
  Scenario scenario;
  int runs = 10;
  SweepSpec sweep;
};

/// Defaults matching configs/paper_default.cfg.
ExperimentConfig default_experiment();

/// Parses the YAML config format. Absent keys keep their defaults, unknown
/// keys are rejected. Throws ConfigError naming the offending key; the
/// resulting scenario is validated.
ExperimentConfig parse_config(std::string_view text, std::string_view source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Checks the sweep lists; returns problems as "key: message" strings.
std::vector<std::string> sweep_issues(const SweepSpec& sweep);

}  // namespace rissim
