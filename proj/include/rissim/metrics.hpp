#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rissim/scenario.hpp"

namespace rissim {

/// One decision epoch (hour).
struct HourRecord {
  int hour = 0;
  double total_power = 0.0;      // W
  double mean_throughput = 0.0;  // bit/s per UE
  double ee = 0.0;               // bit/J
  int n_od = 0;
  double r_ex = 0.0;
  double mean_sinr_db = 0.0;  // over UEs holding at least one RB
  double demand = 0.0;        // bit/s offered, whole cell
  std::vector<std::uint8_t> sbs_on;
  std::vector<double> r_in;  // 0 for sleeping SBSs
};

/// Scalar metrics that aggregate across episodes and runs.
enum class Metric : std::size_t {
  total_power,
  mean_throughput,
  ee,
  n_od,
  r_ex,
  r_in,
  mean_sinr_db,
  sbs_on_fraction,
  peak_total_power,
  peak_mean_throughput,
  peak_ee,
  count
};
inline constexpr std::size_t kMetricCount = static_cast<std::size_t>(Metric::count);

std::string_view metric_name(Metric metric) noexcept;

/// Daily means of an episode's hourly records plus the peak-hour values.
struct EpisodeSummary {
  std::array<double, kMetricCount> values{};

  double operator[](Metric m) const noexcept { return values[static_cast<std::size_t>(m)]; }
  double& operator[](Metric m) noexcept { return values[static_cast<std::size_t>(m)]; }
};

EpisodeSummary summarize(std::span<const HourRecord> hours, int peak_hour);

/// Hour with the largest traffic multiplier (first one on ties).
int peak_hour(const TrafficPattern& traffic);

struct RunMetrics {
  std::uint64_t seed = 0;
  std::vector<EpisodeSummary> training;
  // Full hourly series of training episodes, only when requested.
  std::vector<std::vector<HourRecord>> training_hours;
  // Greedy-policy evaluation episodes after training.
  std::vector<std::vector<HourRecord>> evaluation;
  std::vector<EpisodeSummary> evaluation_summary;
};

struct Estimate {
  double mean = 0.0;
  double half_width = 0.0;  // 95% Student-t
};

struct Aggregate {
  std::size_t runs = 0;
  std::size_t window = 0;
  std::array<Estimate, kMetricCount> metrics{};

  const Estimate& operator[](Metric m) const noexcept { return metrics[static_cast<std::size_t>(m)]; }
};

/// Mean and 95% CI half-width of a sample, Student-t with n - 1 degrees of
/// freedom. Needs at least two values.
Estimate mean_ci95(std::span<const double> values);

/// Per run, averages each metric over the final `window` episodes; then the
/// cross-run mean and CI. Throws InvalidArgument for fewer than two runs or
/// a window longer than some run.
Aggregate aggregate(std::span<const std::vector<EpisodeSummary>> runs, std::size_t window);

/// Training-phase and evaluation-phase views.
Aggregate aggregate_training(std::span<const RunMetrics> runs, std::size_t window);
Aggregate aggregate_evaluation(std::span<const RunMetrics> runs);

/// Fraction of evaluation episodes (pooled over runs) in which each SBS is on at `hour`.
std::vector<double> sbs_on_probability(std::span<const RunMetrics> runs, int hour);

/// Trailing moving average; element i averages values[max(0, i-window+1) .. i].
std::vector<double> moving_average(std::span<const double> values, std::size_t window);

struct SinrPoint {
  int elements = 0;
  int psr_bits = 0;  // 0 marks continuous (unquantized) phases
  double mean_sinr_db = 0.0;
  double half_width = 0.0;
};

struct SinrTable {
  std::vector<SinrPoint> points;
  // Per-realization cell-mean SINR in dB for every point, same order, so
  // callers can run paired comparisons.
  std::vector<std::vector<double>> samples;
};

/// Mean UE SINR with the MBS alone serving every UE at p_max_tx, for each
/// (element count, resolution) pair. Every realization redraws all fading;
/// all points share the realizations (common random numbers), a panel with N
/// elements using the first N fading draws. N = 0 is the direct-only baseline.
SinrTable sinr_vs_elements(const Scenario& scenario, std::span<const int> element_counts,
                           std::span<const int> psr_list, int realizations, std::uint64_t seed);

}  // namespace rissim
