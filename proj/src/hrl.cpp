#include "rissim/hrl.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

namespace rissim {

int bin_load(double load_ratio, int bins) {
  if (bins < 1) throw InvalidArgument("bin_load: bins must be positive");
  if (!(load_ratio >= 0.0)) throw InvalidArgument("bin_load: load ratio must be non-negative");
  if (load_ratio >= 1.0) return bins - 1;
  return std::min(static_cast<int>(load_ratio * bins), bins - 1);
}

StateKey encode_state(std::span<const int> bins, int load_bins) {
  StateKey key = 0;
  for (auto it = bins.rbegin(); it != bins.rend(); ++it) {
    key = key * static_cast<StateKey>(load_bins) + static_cast<StateKey>(*it);
  }
  return key;
}

namespace {

// Largest entry of a row, lowest index on ties. Empty row means all zeros.
std::size_t argmax(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < row.size(); ++i) {
    if (row[i] > row[best]) best = i;
  }
  return best;
}

double row_max(std::span<const double> row) {
  if (row.empty()) return 0.0;
  return *std::max_element(row.begin(), row.end());
}

const std::vector<double>* find_row(const std::unordered_map<StateKey, std::vector<double>>& table, StateKey key) {
  auto it = table.find(key);
  return it == table.end() ? nullptr : &it->second;
}

std::vector<double>& ensure_row(std::unordered_map<StateKey, std::vector<double>>& table, StateKey key,
                                std::size_t width) {
  auto [it, inserted] = table.try_emplace(key);
  if (inserted) it->second.assign(width, 0.0);
  return it->second;
}

void check_step(double reward, double alpha, double gamma) {
  if (!std::isfinite(reward)) throw InvalidArgument("Q update: reward must be finite");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("Q update: learning rate must lie in (0,1]");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidArgument("Q update: discount must lie in [0,1)");
}

std::string exact(double value) {
  std::ostringstream out;
  out << std::setprecision(17) << value;
  return out.str();
}

template <typename Map>
std::map<StateKey, const std::vector<double>*> sorted(const Map& table) {
  std::map<StateKey, const std::vector<double>*> out;
  for (const auto& [key, row] : table) out.emplace(key, &row);
  return out;
}

[[noreturn]] void parse_failure(std::size_t line, const std::string& what) {
  throw ConfigError("q-table line " + std::to_string(line) + ": " + what);
}

}  // namespace

QStore::QStore(std::size_t num_sbs, std::size_t num_actions)
    : num_sbs_(num_sbs), num_goals_(std::size_t{1} << num_sbs), num_actions_(num_actions), sub_(num_sbs) {
  if (num_actions == 0) throw InvalidArgument("QStore needs at least one action");
}

double QStore::meta(StateKey s, Goal g) const {
  const auto* row = find_row(meta_, s);
  return row == nullptr ? 0.0 : (*row)[g];
}

double& QStore::meta_entry(StateKey s, Goal g) {
  if (g >= num_goals_) throw InvalidArgument("goal index out of range");
  return ensure_row(meta_, s, num_goals_)[g];
}

double QStore::max_meta(StateKey s) const {
  const auto* row = find_row(meta_, s);
  return row == nullptr ? 0.0 : row_max(*row);
}

Goal QStore::best_goal(StateKey s) const {
  const auto* row = find_row(meta_, s);
  return row == nullptr ? Goal{0} : static_cast<Goal>(argmax(*row));
}

double QStore::sub(std::size_t sbs, StateKey s, bool on, std::size_t action) const {
  const auto* row = find_row(sub_.at(sbs), sub_key(s, on));
  return row == nullptr ? 0.0 : (*row)[action];
}

double& QStore::sub_entry(std::size_t sbs, StateKey s, bool on, std::size_t action) {
  if (action >= num_actions_) throw InvalidArgument("action index out of range");
  return ensure_row(sub_.at(sbs), sub_key(s, on), num_actions_)[action];
}

double QStore::max_sub(std::size_t sbs, StateKey s, bool on) const {
  const auto* row = find_row(sub_.at(sbs), sub_key(s, on));
  return row == nullptr ? 0.0 : row_max(*row);
}

std::size_t QStore::best_action(std::size_t sbs, StateKey s, bool on) const {
  const auto* row = find_row(sub_.at(sbs), sub_key(s, on));
  return row == nullptr ? 0 : argmax(*row);
}

void write_qstore(std::ostream& out, const QStore& store) {
  out << "qstore " << store.num_sbs_ << ' ' << store.num_actions_ << '\n';
  for (const auto& [state, row] : sorted(store.meta_)) {
    for (std::size_t g = 0; g < row->size(); ++g) out << "meta " << state << ' ' << g << ' ' << exact((*row)[g]) << '\n';
  }
  for (std::size_t j = 0; j < store.sub_.size(); ++j) {
    for (const auto& [key, row] : sorted(store.sub_[j])) {
      for (std::size_t a = 0; a < row->size(); ++a) {
        out << "sub " << j << ' ' << (key >> 1) << ' ' << (key & 1u) << ' ' << a << ' ' << exact((*row)[a]) << '\n';
      }
    }
  }
}

QStore read_qstore(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  QStore store;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string tag;
    fields >> tag;
    if (tag == "qstore") {
      std::size_t sbs = 0, actions = 0;
      if (!(fields >> sbs >> actions)) parse_failure(line_no, "malformed header");
      store = QStore(sbs, actions);
      have_header = true;
    } else if (!have_header) {
      parse_failure(line_no, "missing qstore header");
    } else if (tag == "meta") {
      StateKey s = 0;
      Goal g = 0;
      double v = 0.0;
      if (!(fields >> s >> g >> v)) parse_failure(line_no, "malformed meta entry");
      store.meta_entry(s, g) = v;
    } else if (tag == "sub") {
      std::size_t j = 0, a = 0;
      StateKey s = 0;
      int bit = 0;
      double v = 0.0;
      if (!(fields >> j >> s >> bit >> a >> v) || j >= store.num_sbs()) parse_failure(line_no, "malformed sub entry");
      store.sub_entry(j, s, bit != 0, a) = v;
    } else {
      parse_failure(line_no, "unknown record '" + tag + "'");
    }
  }
  if (!have_header) throw ConfigError("q-table: missing qstore header");
  return store;
}

FlatQTable::FlatQTable(std::size_t num_sbs, std::size_t num_levels, bool sleep_enabled)
    : num_sbs_(num_sbs), num_levels_(num_levels), sleep_enabled_(sleep_enabled) {
  if (num_levels == 0) throw InvalidArgument("FlatQTable needs at least one power level");
  const std::size_t goals = std::size_t{1} << num_sbs;
  for (std::size_t g = 0; g < goals; ++g) {
    if (!sleep_enabled && g != all_on(num_sbs)) continue;
    for (std::size_t level = 0; level < num_levels; ++level) allowed_.push_back(g * num_levels + level);
  }
}

double FlatQTable::value(StateKey s, std::size_t action) const {
  const auto* row = find_row(table_, s);
  return row == nullptr ? 0.0 : (*row)[action];
}

double& FlatQTable::entry(StateKey s, std::size_t action) {
  const std::size_t width = (std::size_t{1} << num_sbs_) * num_levels_;
  if (action >= width) throw InvalidArgument("joint action out of range");
  return ensure_row(table_, s, width)[action];
}

double FlatQTable::max_value(StateKey s) const {
  const auto* row = find_row(table_, s);
  if (row == nullptr) return 0.0;
  double best = (*row)[allowed_.front()];
  for (auto a : allowed_) best = std::max(best, (*row)[a]);
  return best;
}

std::size_t FlatQTable::best_action(StateKey s) const {
  const auto* row = find_row(table_, s);
  std::size_t best = allowed_.front();
  if (row == nullptr) return best;
  for (auto a : allowed_) {
    if ((*row)[a] > (*row)[best]) best = a;
  }
  return best;
}

void write_flat_table(std::ostream& out, const FlatQTable& table) {
  out << "flatq " << table.num_sbs_ << ' ' << table.num_levels_ << ' ' << (table.sleep_enabled_ ? 1 : 0) << '\n';
  for (const auto& [state, row] : sorted(table.table_)) {
    for (std::size_t a = 0; a < row->size(); ++a) out << "flat " << state << ' ' << a << ' ' << exact((*row)[a]) << '\n';
  }
}

FlatQTable read_flat_table(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  FlatQTable table;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string tag;
    fields >> tag;
    if (tag == "flatq") {
      std::size_t sbs = 0, levels = 0;
      int sleep = 0;
      if (!(fields >> sbs >> levels >> sleep)) parse_failure(line_no, "malformed header");
      table = FlatQTable(sbs, levels, sleep != 0);
      have_header = true;
    } else if (!have_header) {
      parse_failure(line_no, "missing flatq header");
    } else if (tag == "flat") {
      StateKey s = 0;
      std::size_t a = 0;
      double v = 0.0;
      if (!(fields >> s >> a >> v)) parse_failure(line_no, "malformed flat entry");
      table.entry(s, a) = v;
    } else {
      parse_failure(line_no, "unknown record '" + tag + "'");
    }
  }
  if (!have_header) throw ConfigError("q-table: missing flatq header");
  return table;
}

Goal select_goal(const QStore& store, StateKey s, double epsilon, Rng& rng) {
  if (rng.uniform() < epsilon) return static_cast<Goal>(rng.below(store.num_goals()));
  return store.best_goal(s);
}

std::size_t select_action(const QStore& store, std::size_t sbs, StateKey s, bool on, double epsilon, Rng& rng) {
  if (!on) throw InvalidArgument("select_action: SBS " + std::to_string(sbs) + " is asleep under the current goal");
  if (rng.uniform() < epsilon) return static_cast<std::size_t>(rng.below(store.num_actions()));
  return store.best_action(sbs, s, on);
}

std::size_t select_flat_action(const FlatQTable& table, StateKey s, double epsilon, Rng& rng) {
  const auto& allowed = table.allowed_actions();
  if (rng.uniform() < epsilon) return allowed[static_cast<std::size_t>(rng.below(allowed.size()))];
  return table.best_action(s);
}

double update_meta(QStore& store, StateKey s, Goal g, double reward, StateKey s_next, double alpha, double gamma) {
  check_step(reward, alpha, gamma);
  const double target = reward + gamma * store.max_meta(s_next);
  double& q = store.meta_entry(s, g);
  q += alpha * (target - q);
  return q;
}

double update_sub(QStore& store, std::size_t sbs, StateKey s, bool on, std::size_t action, double reward,
                  StateKey s_next, bool on_next, double alpha, double gamma) {
  check_step(reward, alpha, gamma);
  const double target = reward + gamma * store.max_sub(sbs, s_next, on_next);
  double& q = store.sub_entry(sbs, s, on, action);
  q += alpha * (target - q);
  return q;
}

double update_flat(FlatQTable& table, StateKey s, std::size_t action, double reward, StateKey s_next, double alpha,
                   double gamma) {
  check_step(reward, alpha, gamma);
  const double target = reward + gamma * table.max_value(s_next);
  double& q = table.entry(s, action);
  q += alpha * (target - q);
  return q;
}

double intrinsic_reward(double own_throughput, double own_input_power, double overload_penalty, int overloaded) {
  if (!(own_input_power > 0.0)) throw InvalidArgument("intrinsic_reward: input power must be positive");
  return own_throughput / own_input_power - overload_penalty * overloaded;
}

Hyperstate Hyperstate::initial(const LearningConfig& config) {
  return {config.lr_initial, config.epsilon_initial, 0};
}

void Hyperstate::advance(const LearningConfig& config) {
  ++episode;
  epsilon = std::max(config.epsilon_floor, epsilon * config.epsilon_decay_factor);
  if (episode % config.lr_decay_every == 0) alpha = std::max(config.lr_floor, alpha * config.lr_decay_factor);
}

}  // namespace rissim
