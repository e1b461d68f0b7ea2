#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rissim/error.hpp"

namespace rissim {

/// Planar position in meters.
struct Position {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Position& a, const Position& b) noexcept;

enum class BsKind { macro, small };

struct BaseStationSpec {
  int id = 0;
  BsKind kind = BsKind::small;
  Position position;
  double coverage_radius = 0.0;  // m
  double p_fixed = 0.0;          // W, load-independent draw
  double power_slope = 0.0;      // dimensionless
  double p_max_tx = 0.0;         // W
  double p_sleep = 0.0;          // W
  double bandwidth = 0.0;        // Hz
  int num_rbs = 0;

  double rb_bandwidth() const noexcept { return bandwidth / num_rbs; }
};

/// Reflecting panel laid out as a uniform linear array along the x axis,
/// centered on `position`.
struct RisSpec {
  int id = 0;
  Position position;
  int num_elements = 0;
  int psr_bits = 0;
  std::vector<double> amplitude;  // one reflection coefficient per element
  double element_spacing = 0.0;   // m
};

struct RadioConstants {
  double carrier_wavelength = 0.0857;  // m
  double pathloss_exp_los = 2.5;
  double pathloss_exp_nlos = 3.5;
  double noise_psd = 4e-21;  // W/Hz
  double sinr_threshold = 1.0;
  // Distance-independent loss applied to every BS->UE power gain (reference
  // loss, antenna and receiver losses), in dB.
  double system_loss_db = 0.0;
  // Extra building-penetration loss on direct BS->UE links only, in dB.
  double direct_loss_db = 0.0;
};

/// Which base stations may route their signal through a RIS panel.
enum class RisAssignment { mbs_only, all_bs };

struct TrafficPattern {
  std::array<double, 24> hourly_multiplier{};
  double peak_demand = 0.0;  // bit/s, whole cell at the peak hour
};

struct LearningConfig {
  double lr_initial = 0.95;
  double lr_decay_factor = 0.9;
  int lr_decay_every = 50;
  double lr_floor = 0.05;
  double discount = 0.3;
  double epsilon_initial = 0.9;
  double epsilon_decay_factor = 0.995;
  double epsilon_floor = 0.01;
  int episodes = 1000;
  int eval_episodes = 20;
  double overload_penalty = 0.0;  // bit/J per overloaded BS
  int load_bins = 10;
  std::vector<double> power_levels{0.25, 0.5, 0.75, 1.0};  // fractions of p_max_tx
};

struct Scenario {
  BaseStationSpec mbs;
  std::vector<BaseStationSpec> sbs_list;
  std::vector<RisSpec> ris_list;
  int num_ues = 0;
  RadioConstants radio;
  RisAssignment ris_assignment = RisAssignment::mbs_only;
  TrafficPattern traffic;
  LearningConfig learning;
  std::uint64_t seed = 1;

  /// Base stations are indexed with the MBS at 0 and SBS i at i + 1.
  std::size_t num_bs() const noexcept { return 1 + sbs_list.size(); }
  const BaseStationSpec& bs(std::size_t index) const {
    return index == 0 ? mbs : sbs_list.at(index - 1);
  }
};

/// Built-in scenario matching configs/paper_default.cfg.
Scenario paper_default_scenario();

/// Residential daily load shape (trough early morning, peak late evening).
std::array<double, 24> residential_traffic_shape();

struct ValidationIssue {
  std::string path;
  std::string message;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<ValidationIssue> issues);
  const std::vector<ValidationIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ValidationIssue> issues_;
};

/// Every invariant violation, each with the field path it concerns.
std::vector<ValidationIssue> validation_issues(const Scenario& scenario);

/// Returns `scenario` unchanged, or throws ValidationError listing all violations.
const Scenario& validate(const Scenario& scenario);

/// Per-UE demand at `hour`: base_demand scaled by the hourly multiplier.
double demand_at(const TrafficPattern& traffic, int hour, double base_demand);

/// One random draw of the UE population.
struct WorldInstance {
  std::vector<Position> ue_positions;
  std::vector<double> base_demand;  // bit/s

  std::size_t num_ues() const noexcept { return ue_positions.size(); }
};

/// UEs uniform in the MBS coverage disk; a pure function of (scenario, seed).
WorldInstance instantiate(const Scenario& scenario, std::uint64_t seed);
inline WorldInstance instantiate(const Scenario& scenario) { return instantiate(scenario, scenario.seed); }

/// Demand of every UE at `hour`.
std::vector<double> demands_at(const Scenario& scenario, const WorldInstance& world, int hour);

}  // namespace rissim
