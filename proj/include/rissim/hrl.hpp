#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rissim/energy.hpp"
#include "rissim/random.hpp"
#include "rissim/scenario.hpp"

namespace rissim {

/// On/off pattern over SBSs, bit i set = SBS i on. Goal index == mask value.
using Goal = std::uint32_t;
/// Mixed-radix encoding of per-SBS load bins (or a single bin for sub-states).
using StateKey = std::uint64_t;

/// floor(min(ratio, 1-) * bins); ratios at or above 1 land in the top bin.
int bin_load(double load_ratio, int bins);

StateKey encode_state(std::span<const int> bins, int load_bins);

inline bool goal_bit(Goal goal, std::size_t sbs) noexcept { return ((goal >> sbs) & 1u) != 0; }
inline Goal all_on(std::size_t num_sbs) noexcept { return num_sbs >= 32 ? ~Goal{0} : (Goal{1} << num_sbs) - 1; }

/// Tabular values of the meta-controller Q(s, g) and of each SBS
/// sub-controller Q_j(s, goal bit, a). Unseen entries read as 0; rows are
/// materialized only when written.
class QStore {
 public:
  QStore() = default;
  QStore(std::size_t num_sbs, std::size_t num_actions);

  std::size_t num_sbs() const noexcept { return num_sbs_; }
  std::size_t num_goals() const noexcept { return num_goals_; }
  std::size_t num_actions() const noexcept { return num_actions_; }

  double meta(StateKey s, Goal g) const;
  double& meta_entry(StateKey s, Goal g);
  double max_meta(StateKey s) const;
  /// Goal with the largest value, lowest index on ties.
  Goal best_goal(StateKey s) const;

  double sub(std::size_t sbs, StateKey s, bool on, std::size_t action) const;
  double& sub_entry(std::size_t sbs, StateKey s, bool on, std::size_t action);
  double max_sub(std::size_t sbs, StateKey s, bool on) const;
  std::size_t best_action(std::size_t sbs, StateKey s, bool on) const;

  std::size_t meta_rows() const noexcept { return meta_.size(); }
  std::size_t sub_rows(std::size_t sbs) const { return sub_.at(sbs).size(); }

  /// Flat key-value text; see write_qstore.
  friend void write_qstore(std::ostream& out, const QStore& store);
  friend QStore read_qstore(std::istream& in);
  friend bool operator==(const QStore&, const QStore&) = default;

 private:
  using Table = std::unordered_map<StateKey, std::vector<double>>;
  static StateKey sub_key(StateKey s, bool on) noexcept { return (s << 1) | (on ? 1u : 0u); }

  std::size_t num_sbs_ = 0;
  std::size_t num_goals_ = 0;
  std::size_t num_actions_ = 0;
  Table meta_;
  std::vector<Table> sub_;
};

/// Text format, one entry per line, sorted, values printed round-trip exact:
///   qstore <num_sbs> <num_actions>
///   meta <state> <goal> <value>
///   sub <sbs> <state> <goal_bit> <action> <value>
void write_qstore(std::ostream& out, const QStore& store);
QStore read_qstore(std::istream& in);

/// Single joint Q-table of the flat baseline: actions are (goal, power level)
/// pairs encoded as goal * num_levels + level.
class FlatQTable {
 public:
  FlatQTable() = default;
  FlatQTable(std::size_t num_sbs, std::size_t num_levels, bool sleep_enabled);

  std::size_t num_levels() const noexcept { return num_levels_; }
  /// Joint actions the case flags allow, ascending.
  const std::vector<std::size_t>& allowed_actions() const noexcept { return allowed_; }
  Goal goal_of(std::size_t action) const noexcept { return static_cast<Goal>(action / num_levels_); }
  std::size_t level_of(std::size_t action) const noexcept { return action % num_levels_; }

  double value(StateKey s, std::size_t action) const;
  double& entry(StateKey s, std::size_t action);
  double max_value(StateKey s) const;
  std::size_t best_action(StateKey s) const;

  std::size_t rows() const noexcept { return table_.size(); }

  friend void write_flat_table(std::ostream& out, const FlatQTable& table);
  friend FlatQTable read_flat_table(std::istream& in);
  friend bool operator==(const FlatQTable&, const FlatQTable&) = default;

 private:
  std::size_t num_sbs_ = 0;
  std::size_t num_levels_ = 0;
  bool sleep_enabled_ = true;
  std::vector<std::size_t> allowed_;
  std::unordered_map<StateKey, std::vector<double>> table_;
};

///   flatq <num_sbs> <num_levels> <sleep_enabled>
///   flat <state> <action> <value>
void write_flat_table(std::ostream& out, const FlatQTable& table);
FlatQTable read_flat_table(std::istream& in);

/// Epsilon-greedy goal: uniform over all 2^|SBS| goals with probability
/// epsilon, otherwise the greedy goal (lowest index on ties).
Goal select_goal(const QStore& store, StateKey s, double epsilon, Rng& rng);

/// Epsilon-greedy power level of an active SBS. Throws InvalidArgument when
/// the SBS is asleep under the current goal.
std::size_t select_action(const QStore& store, std::size_t sbs, StateKey s, bool on, double epsilon, Rng& rng);

/// Epsilon-greedy joint action of the flat baseline.
std::size_t select_flat_action(const FlatQTable& table, StateKey s, double epsilon, Rng& rng);

/// Q(s,g) += alpha (r + gamma max_g' Q(s',g') - Q(s,g)); returns the new value.
double update_meta(QStore& store, StateKey s, Goal g, double reward, StateKey s_next, double alpha, double gamma);

/// Goal-conditioned update of SBS `sbs`; the bootstrap maximizes over actions
/// in the row of the next state and next goal bit.
double update_sub(QStore& store, std::size_t sbs, StateKey s, bool on, std::size_t action, double reward,
                  StateKey s_next, bool on_next, double alpha, double gamma);

double update_flat(FlatQTable& table, StateKey s, std::size_t action, double reward, StateKey s_next, double alpha,
                   double gamma);

/// Own-cell energy efficiency minus the cell-wide overload penalty.
double intrinsic_reward(double own_throughput, double own_input_power, double overload_penalty, int overloaded);

/// Cell-wide penalized objective.
inline double extrinsic_reward(const EnergySnapshot& snap) noexcept { return snap.penalized_objective; }

/// Decaying learning rate and exploration rate.
struct Hyperstate {
  double alpha = 0.0;
  double epsilon = 0.0;
  int episode = 0;

  static Hyperstate initial(const LearningConfig& config);
  /// Called after each finished episode.
  void advance(const LearningConfig& config);
};

}  // namespace rissim
