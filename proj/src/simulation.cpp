#include "rissim/simulation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>

namespace rissim {

CaseFlags case_flags(Case c) noexcept {
  switch (c) {
    case Case::typical: return {false, false};
    case Case::sleep_only: return {false, true};
    case Case::ris_only: return {true, false};
    case Case::ris_sleep: return {true, true};
  }
  return {};
}

AgentKind case_agent(Case c) noexcept { return c == Case::ris_sleep ? AgentKind::hrl : AgentKind::flat_q; }

std::string_view case_name(Case c) noexcept {
  switch (c) {
    case Case::typical: return "typical";
    case Case::sleep_only: return "sleep_only";
    case Case::ris_only: return "ris_only";
    case Case::ris_sleep: return "ris_sleep";
  }
  return "unknown";
}

std::optional<Case> parse_case(std::string_view name) noexcept {
  for (Case c : kAllCases) {
    if (case_name(c) == name) return c;
  }
  return std::nullopt;
}

Environment::Environment(const Scenario& scenario, WorldInstance world, CaseFlags flags)
    : scenario_(&scenario), world_(std::move(world)), flags_(flags), statics_(scenario, world_) {
  const std::size_t num_bs = scenario.num_bs();
  const std::size_t num_ues = world_.num_ues();

  long_term_gain_.resize(num_bs * num_ues);
  for (std::size_t b = 0; b < num_bs; ++b) {
    for (std::size_t k = 0; k < num_ues; ++k) {
      long_term_gain_[b * num_ues + k] = statics_.expected_gain(b, k, flags.ris_enabled);
    }
  }

  const double mbs_radius = scenario.mbs.coverage_radius;
  for (const auto& sbs : scenario.sbs_list) {
    const double share = (sbs.coverage_radius * sbs.coverage_radius) / (mbs_radius * mbs_radius);
    sbs_normalizer_.push_back(scenario.traffic.peak_demand * share);
    auto& disk = sbs_disk_ues_.emplace_back();
    for (std::size_t k = 0; k < num_ues; ++k) {
      if (distance(sbs.position, world_.ue_positions[k]) <= sbs.coverage_radius) disk.push_back(k);
    }
  }
  avg_throughput_.assign(num_ues, 0.0);

  const int load_bins = scenario.learning.load_bins;
  for (int hour = 0; hour < 24; ++hour) {
    const auto load = sbs_load(hour);
    std::vector<int> bins(load.size());
    for (std::size_t j = 0; j < load.size(); ++j) bins[j] = bin_load(load[j], load_bins);
    meta_state_[static_cast<std::size_t>(hour)] = encode_state(bins, load_bins);
    sub_bins_[static_cast<std::size_t>(hour)] = std::move(bins);
  }
}

std::vector<double> Environment::sbs_load(int hour) const {
  std::vector<double> load(num_sbs(), 0.0);
  for (std::size_t j = 0; j < load.size(); ++j) {
    if (!(sbs_normalizer_[j] > 0.0)) continue;
    double offered = 0.0;
    for (auto k : sbs_disk_ues_[j]) offered += demand_at(scenario_->traffic, hour, world_.base_demand[k]);
    load[j] = offered / sbs_normalizer_[j];
  }
  return load;
}

StateKey Environment::meta_state(int hour) const { return meta_state_.at(static_cast<std::size_t>(hour)); }

StateKey Environment::sub_state(std::size_t sbs, int hour) const {
  return static_cast<StateKey>(sub_bins_.at(static_cast<std::size_t>(hour)).at(sbs));
}

const Association& Environment::association_for(Goal goal) {
  auto it = association_cache_.find(goal);
  if (it != association_cache_.end()) return it->second;
  const std::size_t num_bs = scenario_->num_bs();
  auto active = std::make_unique<bool[]>(num_bs);
  active[0] = true;
  for (std::size_t j = 0; j < num_sbs(); ++j) active[j + 1] = goal_bit(goal, j);
  auto assoc = associate(*scenario_, world_, std::span<const bool>(active.get(), num_bs), long_term_gain_);
  return association_cache_.emplace(goal, std::move(assoc)).first->second;
}

StepOutcome Environment::step(int hour, const Decision& decision, Rng& direct_rng, Rng& ris_rng) {
  const auto& sc = *scenario_;
  const std::size_t num_bs = sc.num_bs();
  const std::size_t num_ues = world_.num_ues();
  const std::size_t num_sbs = this->num_sbs();
  const Goal goal = flags_.sleep_enabled ? decision.goal : all_on(num_sbs);

  std::vector<bool> active(num_bs, true);
  std::vector<double> p_out(num_bs, 0.0);
  p_out[0] = sc.mbs.p_max_tx;
  for (std::size_t j = 0; j < num_sbs; ++j) {
    active[j + 1] = goal_bit(goal, j);
    if (!active[j + 1]) continue;
    const std::size_t level = decision.power_level.at(j);
    p_out[j + 1] = sc.learning.power_levels.at(level) * sc.sbs_list[j].p_max_tx;
  }

  const GainMatrix gains = draw_gains(sc, statics_, flags_.ris_enabled, direct_rng, ris_rng);
  const Association& assoc = association_for(goal);
  const std::vector<double> demand = demands_at(sc, world_, hour);

  std::vector<std::vector<int>> attached(num_bs);
  for (std::size_t k = 0; k < num_ues; ++k) attached[static_cast<std::size_t>(assoc.serving[k])].push_back(static_cast<int>(k));

  // Small cells schedule first; each BS estimates per-RB interference exactly
  // from grids already fixed and assumes full-grid use by the rest.
  RbAllocation allocation;
  allocation.per_bs.resize(num_bs);
  std::vector<bool> allocated(num_bs, false);
  std::vector<std::size_t> order;
  for (std::size_t b = 1; b < num_bs; ++b) order.push_back(b);
  order.push_back(0);

  const double noise_psd = sc.radio.noise_psd;
  for (const std::size_t b : order) {
    if (!active[b]) continue;
    const auto& spec = sc.bs(b);
    const auto num_rbs = static_cast<std::size_t>(spec.num_rbs);
    const double p_rb = p_out[b] / static_cast<double>(num_rbs);
    const double rb_bw = spec.rb_bandwidth();

    std::vector<std::uint32_t> used_by(num_rbs, 0);
    for (std::size_t o = 0; o < num_bs; ++o) {
      if (!allocated[o]) continue;
      const auto& owner = allocation.per_bs[o].rb_owner;
      for (std::size_t r = 0; r < num_rbs && r < owner.size(); ++r) {
        if (owner[r] >= 0) used_by[r] |= std::uint32_t{1} << o;
      }
    }

    const auto& members = attached[b];
    RbRates rates{num_rbs, std::vector<double>(members.size() * num_rbs)};
    for (std::size_t i = 0; i < members.size(); ++i) {
      const auto k = static_cast<std::size_t>(members[i]);
      double pending = 0.0;
      for (std::size_t o = 0; o < num_bs; ++o) {
        if (o == b || !active[o] || allocated[o]) continue;
        pending += p_out[o] / sc.bs(o).num_rbs * gains(o, k);
      }
      const double clean = rb_rate(p_rb, gains(b, k), rb_bw, noise_psd, pending);
      for (std::size_t r = 0; r < num_rbs; ++r) {
        std::uint32_t mask = used_by[r];
        if (mask == 0) {
          rates.values[i * num_rbs + r] = clean;
          continue;
        }
        double interference = pending;
        while (mask != 0) {
          const auto o = static_cast<std::size_t>(std::countr_zero(mask));
          mask &= mask - 1;
          interference += allocation.per_bs[o].power_per_rb * gains(o, k);
        }
        rates.values[i * num_rbs + r] = rb_rate(p_rb, gains(b, k), rb_bw, noise_psd, interference);
      }
    }
    const FillOrder fill = b == 0 ? FillOrder::ascending : FillOrder::descending;
    allocation.per_bs[b] = allocate_rbs(spec, p_out[b], members, demand, rates, avg_throughput_, fill);
    allocated[b] = true;
  }

  StepOutcome out;
  out.links = link_report(allocation, assoc, gains, noise_psd, demand, sc.radio.sinr_threshold);
  out.n_od = overload_count(out.links, demand, num_bs);
  // Consumption follows radiated power: the per-RB power on RBs actually in use.
  out.power.resize(num_bs);
  for (std::size_t b = 0; b < num_bs; ++b) {
    const BsMode mode = active[b] ? BsMode::active : BsMode::sleeping;
    double radiated = 0.0;
    if (active[b]) {
      const auto& alloc = allocation.per_bs[b];
      const auto used = std::count_if(alloc.rb_owner.begin(), alloc.rb_owner.end(), [](int o) { return o >= 0; });
      radiated = std::min(alloc.power_per_rb * static_cast<double>(used), p_out[b]);
    }
    out.power[b] = {bs_power(sc.bs(b), mode, radiated), mode};
  }
  out.energy = snapshot(out.power, out.links, sc.learning.overload_penalty, out.n_od);

  out.sbs_throughput.assign(num_sbs, 0.0);
  double sinr_db_sum = 0.0;
  std::size_t served = 0;
  for (std::size_t k = 0; k < num_ues; ++k) {
    const auto& link = out.links[k];
    avg_throughput_[k] = (1.0 - kPfSmoothing) * avg_throughput_[k] + kPfSmoothing * link.throughput;
    if (link.bs > 0) out.sbs_throughput[static_cast<std::size_t>(link.bs - 1)] += link.throughput;
    if (link.rbs > 0 && link.sinr > 0.0) {
      sinr_db_sum += 10.0 * std::log10(link.sinr);
      ++served;
    }
    out.demand += demand[k];
  }
  out.mean_sinr_db = served > 0 ? sinr_db_sum / static_cast<double>(served) : 0.0;
  out.association = assoc;
  return out;
}

Decision TrainedPolicy::decide(const Environment& env, int hour) const {
  const std::size_t num_sbs = env.num_sbs();
  Decision d;
  d.power_level.assign(num_sbs, 0);
  const StateKey s = env.meta_state(hour);
  if (kind == AgentKind::hrl) {
    d.goal = flags.sleep_enabled ? hrl.best_goal(s) : all_on(num_sbs);
    for (std::size_t j = 0; j < num_sbs; ++j) {
      if (goal_bit(d.goal, j)) d.power_level[j] = hrl.best_action(j, env.sub_state(j, hour), true);
    }
  } else {
    const std::size_t a = flat.best_action(s);
    d.goal = flat.goal_of(a);
    d.power_level.assign(num_sbs, flat.level_of(a));
  }
  return d;
}

namespace {

constexpr std::uint64_t kTrainPhase = 1;
constexpr std::uint64_t kEvalPhase = 2;
constexpr std::uint64_t kPolicyStream = 3;

struct HourRngs {
  Rng direct;
  Rng ris;
};

HourRngs hour_rngs(std::uint64_t seed, std::uint64_t phase, int episode, int hour) {
  const auto e = static_cast<std::uint64_t>(episode);
  const auto h = static_cast<std::uint64_t>(hour);
  return {Rng(derive_seed(seed, {phase, e, h, 1})), Rng(derive_seed(seed, {phase, e, h, 2}))};
}

HourRecord make_record(int hour, const Environment& env, const Decision& decision, const StepOutcome& outcome,
                       double r_ex, const std::vector<double>& r_in) {
  const std::size_t num_sbs = env.num_sbs();
  const Goal goal = env.flags().sleep_enabled ? decision.goal : all_on(num_sbs);
  HourRecord rec;
  rec.hour = hour;
  rec.total_power = outcome.energy.total_power;
  rec.mean_throughput = outcome.energy.total_throughput / static_cast<double>(env.world().num_ues());
  rec.ee = outcome.energy.ee;
  rec.n_od = outcome.n_od;
  rec.r_ex = r_ex;
  rec.mean_sinr_db = outcome.mean_sinr_db;
  rec.demand = outcome.demand;
  rec.sbs_on.resize(num_sbs);
  for (std::size_t j = 0; j < num_sbs; ++j) rec.sbs_on[j] = goal_bit(goal, j) ? 1 : 0;
  rec.r_in = r_in;
  return rec;
}

std::vector<double> intrinsic_rewards(const Environment& env, Goal goal, const StepOutcome& outcome) {
  const auto& sc = env.scenario();
  std::vector<double> r_in(env.num_sbs(), 0.0);
  for (std::size_t j = 0; j < env.num_sbs(); ++j) {
    if (!goal_bit(goal, j)) continue;
    r_in[j] = intrinsic_reward(outcome.sbs_throughput[j], outcome.power[j + 1].input_power,
                               sc.learning.overload_penalty, outcome.n_od);
  }
  return r_in;
}

void train_hrl(const Scenario& sc, Environment& env, TrainedPolicy& policy, RunMetrics& metrics,
               const TrainOptions& options) {
  const auto& learning = sc.learning;
  const std::size_t num_sbs = env.num_sbs();
  const bool sleep = env.flags().sleep_enabled;
  QStore& store = policy.hrl;
  Rng policy_rng(derive_seed(sc.seed, {kPolicyStream}));
  Hyperstate hyper = Hyperstate::initial(learning);

  std::optional<Goal> pending_goal;
  const int peak = peak_hour(sc.traffic);
  for (int episode = 0; episode < learning.episodes; ++episode) {
    std::vector<HourRecord> hours;
    hours.reserve(24);
    for (int hour = 0; hour < 24; ++hour) {
      const int next_hour = (hour + 1) % 24;
      const StateKey s = env.meta_state(hour);
      Goal goal = all_on(num_sbs);
      if (sleep) goal = pending_goal ? *pending_goal : select_goal(store, s, hyper.epsilon, policy_rng);

      Decision decision{goal, std::vector<std::size_t>(num_sbs, 0)};
      for (std::size_t j = 0; j < num_sbs; ++j) {
        if (!goal_bit(goal, j)) continue;
        decision.power_level[j] = select_action(store, j, env.sub_state(j, hour), true, hyper.epsilon, policy_rng);
      }

      auto rngs = hour_rngs(sc.seed, kTrainPhase, episode, hour);
      const StepOutcome outcome = env.step(hour, decision, rngs.direct, rngs.ris);
      const double r_ex = extrinsic_reward(outcome.energy);
      const auto r_in = intrinsic_rewards(env, goal, outcome);

      // The sub-controller bootstraps on the next goal, so it is drawn before
      // either table changes.
      const StateKey s_next = env.meta_state(next_hour);
      const Goal next_goal = sleep ? select_goal(store, s_next, hyper.epsilon, policy_rng) : all_on(num_sbs);
      for (std::size_t j = 0; j < num_sbs; ++j) {
        if (!goal_bit(goal, j)) continue;
        update_sub(store, j, env.sub_state(j, hour), true, decision.power_level[j], r_in[j],
                   env.sub_state(j, next_hour), goal_bit(next_goal, j), hyper.alpha, learning.discount);
      }
      if (sleep) update_meta(store, s, goal, r_ex, s_next, hyper.alpha, learning.discount);
      pending_goal = next_goal;

      hours.push_back(make_record(hour, env, decision, outcome, r_ex, r_in));
    }
    metrics.training.push_back(summarize(hours, peak));
    if (options.record_training_hours) metrics.training_hours.push_back(std::move(hours));
    hyper.advance(learning);
  }
}

void train_flat(const Scenario& sc, Environment& env, TrainedPolicy& policy, RunMetrics& metrics,
                const TrainOptions& options) {
  const auto& learning = sc.learning;
  const std::size_t num_sbs = env.num_sbs();
  FlatQTable& table = policy.flat;
  Rng policy_rng(derive_seed(sc.seed, {kPolicyStream}));
  Hyperstate hyper = Hyperstate::initial(learning);

  const int peak = peak_hour(sc.traffic);
  for (int episode = 0; episode < learning.episodes; ++episode) {
    std::vector<HourRecord> hours;
    hours.reserve(24);
    for (int hour = 0; hour < 24; ++hour) {
      const StateKey s = env.meta_state(hour);
      const std::size_t action = select_flat_action(table, s, hyper.epsilon, policy_rng);
      Decision decision{table.goal_of(action), std::vector<std::size_t>(num_sbs, table.level_of(action))};

      auto rngs = hour_rngs(sc.seed, kTrainPhase, episode, hour);
      const StepOutcome outcome = env.step(hour, decision, rngs.direct, rngs.ris);
      const double r_ex = extrinsic_reward(outcome.energy);
      const Goal goal = env.flags().sleep_enabled ? decision.goal : all_on(num_sbs);
      const auto r_in = intrinsic_rewards(env, goal, outcome);

      update_flat(table, s, action, r_ex, env.meta_state((hour + 1) % 24), hyper.alpha, learning.discount);
      hours.push_back(make_record(hour, env, decision, outcome, r_ex, r_in));
    }
    metrics.training.push_back(summarize(hours, peak));
    if (options.record_training_hours) metrics.training_hours.push_back(std::move(hours));
    hyper.advance(learning);
  }
}

}  // namespace

TrainResult train(const Scenario& scenario, AgentKind kind, CaseFlags flags, const TrainOptions& options) {
  validate(scenario);
  const std::size_t num_sbs = scenario.sbs_list.size();
  const std::size_t num_levels = scenario.learning.power_levels.size();

  TrainResult result;
  result.policy.kind = kind;
  result.policy.flags = flags;
  result.policy.hrl = QStore(num_sbs, num_levels);
  result.policy.flat = FlatQTable(num_sbs, num_levels, flags.sleep_enabled);
  result.metrics.seed = scenario.seed;

  Environment env(scenario, options.world ? *options.world : instantiate(scenario), flags);
  if (kind == AgentKind::hrl) {
    train_hrl(scenario, env, result.policy, result.metrics, options);
  } else {
    train_flat(scenario, env, result.policy, result.metrics, options);
  }
  return result;
}

std::vector<std::vector<HourRecord>> evaluate(const Scenario& scenario, const TrainedPolicy& policy, int episodes) {
  Environment env(scenario, instantiate(scenario), policy.flags);
  std::vector<std::vector<HourRecord>> out;
  out.reserve(static_cast<std::size_t>(std::max(episodes, 0)));
  for (int episode = 0; episode < episodes; ++episode) {
    std::vector<HourRecord> hours;
    hours.reserve(24);
    for (int hour = 0; hour < 24; ++hour) {
      const Decision decision = policy.decide(env, hour);
      auto rngs = hour_rngs(scenario.seed, kEvalPhase, episode, hour);
      const StepOutcome outcome = env.step(hour, decision, rngs.direct, rngs.ris);
      const Goal goal = policy.flags.sleep_enabled ? decision.goal : all_on(env.num_sbs());
      hours.push_back(make_record(hour, env, decision, outcome, extrinsic_reward(outcome.energy),
                                  intrinsic_rewards(env, goal, outcome)));
    }
    out.push_back(std::move(hours));
  }
  return out;
}

RunMetrics run_case(const Scenario& scenario, Case c, const TrainOptions& options) {
  TrainResult trained = train(scenario, case_agent(c), case_flags(c), options);
  RunMetrics metrics = std::move(trained.metrics);
  metrics.evaluation = evaluate(scenario, trained.policy, scenario.learning.eval_episodes);
  const int peak = peak_hour(scenario.traffic);
  for (const auto& episode : metrics.evaluation) metrics.evaluation_summary.push_back(summarize(episode, peak));
  return metrics;
}

}  // namespace rissim
