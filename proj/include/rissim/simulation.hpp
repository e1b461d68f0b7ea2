#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "rissim/channel.hpp"
#include "rissim/energy.hpp"
#include "rissim/hrl.hpp"
#include "rissim/metrics.hpp"
#include "rissim/radio.hpp"
#include "rissim/scenario.hpp"

namespace rissim {

/// The four compared configurations.
enum class Case { typical, sleep_only, ris_only, ris_sleep };

struct CaseFlags {
  bool ris_enabled = true;
  bool sleep_enabled = true;
};

enum class AgentKind { hrl, flat_q };

CaseFlags case_flags(Case c) noexcept;
/// The hierarchical agent runs the combined case; the others use flat Q-learning.
AgentKind case_agent(Case c) noexcept;
std::string_view case_name(Case c) noexcept;
std::optional<Case> parse_case(std::string_view name) noexcept;
inline constexpr Case kAllCases[] = {Case::typical, Case::sleep_only, Case::ris_only, Case::ris_sleep};

/// Controls applied for one hour.
struct Decision {
  Goal goal = 0;                         // SBS on/off pattern
  std::vector<std::size_t> power_level;  // index into learning.power_levels, per SBS (ignored when off)
};

struct StepOutcome {
  Association association;
  std::vector<LinkResult> links;
  std::vector<PowerDraw> power;
  EnergySnapshot energy;
  int n_od = 0;
  std::vector<double> sbs_throughput;  // bit/s served by each SBS
  double mean_sinr_db = 0.0;
  double demand = 0.0;
};

/// One world instance under one case's flags. Holds the proportional-fair
/// throughput history, so steps must be issued in time order.
class Environment {
 public:
  Environment(const Scenario& scenario, WorldInstance world, CaseFlags flags);

  const Scenario& scenario() const noexcept { return *scenario_; }
  const WorldInstance& world() const noexcept { return world_; }
  const StaticChannels& statics() const noexcept { return statics_; }
  CaseFlags flags() const noexcept { return flags_; }
  std::size_t num_sbs() const noexcept { return scenario_->sbs_list.size(); }

  /// Load ratio each SBS would carry at `hour` if active: demand of the UEs
  /// inside its disk over its normalizer (peak demand times disk-area share).
  std::vector<double> sbs_load(int hour) const;
  StateKey meta_state(int hour) const;
  StateKey sub_state(std::size_t sbs, int hour) const;

  /// Applies `decision` for `hour`. With sleep disabled every SBS is on
  /// regardless of the goal.
  StepOutcome step(int hour, const Decision& decision, Rng& direct_rng, Rng& ris_rng);

 private:
  const Association& association_for(Goal goal);

  const Scenario* scenario_;
  WorldInstance world_;
  CaseFlags flags_;
  StaticChannels statics_;
  std::vector<double> long_term_gain_;
  std::vector<double> sbs_normalizer_;
  std::vector<std::vector<std::size_t>> sbs_disk_ues_;
  std::vector<double> avg_throughput_;
  std::map<Goal, Association> association_cache_;
  std::array<StateKey, 24> meta_state_{};
  std::array<std::vector<int>, 24> sub_bins_;
};

/// Greedy policy extracted from a trained agent.
struct TrainedPolicy {
  AgentKind kind = AgentKind::hrl;
  CaseFlags flags;
  QStore hrl;
  FlatQTable flat;

  /// Decision with exploration switched off.
  Decision decide(const Environment& env, int hour) const;
};

struct TrainOptions {
  bool record_training_hours = false;
  // Train on this UE layout instead of the one drawn from scenario.seed; the
  // seed then only drives exploration and fading.
  std::optional<WorldInstance> world;
};

struct TrainResult {
  TrainedPolicy policy;
  RunMetrics metrics;
};

/// Runs `learning.episodes` training episodes of 24 hourly epochs on the world
/// drawn from scenario.seed (or options.world). Fully deterministic in its inputs.
TrainResult train(const Scenario& scenario, AgentKind kind, CaseFlags flags, const TrainOptions& options = {});

/// Runs `episodes` greedy episodes on a fresh environment for the same world,
/// with channel draws independent of training.
std::vector<std::vector<HourRecord>> evaluate(const Scenario& scenario, const TrainedPolicy& policy, int episodes);

/// Trains, evaluates for learning.eval_episodes, and fills both metric series.
RunMetrics run_case(const Scenario& scenario, Case c, const TrainOptions& options = {});

}  // namespace rissim
