#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rissim/config.hpp"
#include "rissim/metrics.hpp"
#include "rissim/simulation.hpp"

namespace rissim {

/// Command-line overrides layered on top of a loaded config.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<int> episodes;
  std::optional<double> peak_demand_mbps;
  std::optional<std::vector<Case>> cases;
  std::optional<std::vector<double>> sweep_peaks;
};

void apply_overrides(ExperimentConfig& config, const Overrides& overrides);

/// Worker count from RIS_SIM_WORKERS, else the hardware thread count; >= 1.
std::size_t worker_count();

/// Calls fn(i) for i in [0, n) on up to `workers` threads. The first exception
/// thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

/// Trains and evaluates `runs` replicates, replicate i seeded scenario.seed + i.
std::vector<RunMetrics> run_replicates(const Scenario& scenario, Case c, int runs, std::size_t workers);

/// One file to be written into the output directory.
struct OutputFile {
  std::string name;
  std::string content;
};

/// Outputs of `run`: runs.csv, aggregate.json, manifest.json.
std::vector<OutputFile> run_outputs(const ExperimentConfig& config, Case c, std::size_t workers);

/// Outputs of `sweep`: fig3..fig8 series per case, fig7_ris.csv and manifest.json.
/// Throws ConfigError when the sweep lists are invalid.
std::vector<OutputFile> sweep_outputs(const ExperimentConfig& config, std::size_t workers);

/// Writes every file to a temporary name first and renames only once all
/// writes succeeded, so a failure leaves no partial result set behind.
void commit_outputs(const std::filesystem::path& dir, const std::vector<OutputFile>& files);

/// RFC 4180 field quoting.
std::string csv_field(std::string_view text);
/// Shortest round-trip-safe decimal for finite values; "nan"/"inf" otherwise.
std::string format_number(double value);

/// Training-window used for aggregates: the last 10% of episodes (at least 1).
std::size_t final_window(int episodes);

/// Width of the moving average applied to the training reward series.
inline constexpr std::size_t kRewardSmoothing = 50;

}  // namespace rissim
