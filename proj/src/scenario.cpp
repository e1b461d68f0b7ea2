#include "rissim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rissim/random.hpp"

namespace rissim {

double distance(const Position& a, const Position& b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

std::array<double, 24> residential_traffic_shape() {
  return {0.78, 0.62, 0.46, 0.32, 0.22, 0.16, 0.14, 0.16, 0.22, 0.30, 0.40, 0.52,
          0.60, 0.64, 0.66, 0.68, 0.72, 0.78, 0.86, 0.93, 0.98, 1.00, 0.96, 0.88};
}

Scenario paper_default_scenario() {
  Scenario s;

  s.mbs.id = 0;
  s.mbs.kind = BsKind::macro;
  s.mbs.position = {0.0, 0.0};
  s.mbs.coverage_radius = 400.0;
  s.mbs.p_fixed = 130.0;
  s.mbs.power_slope = 4.7;
  s.mbs.p_max_tx = 40.0;
  s.mbs.p_sleep = 0.0;
  s.mbs.bandwidth = 20e6;
  s.mbs.num_rbs = 100;

  // One SBS per diagonal about 280 m out, each with a panel about 50 m
  // closer to the MBS so the reflected path reaches the cell edge.
  constexpr double kSign[4][2] = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
  for (int i = 0; i < 4; ++i) {
    BaseStationSpec sbs;
    sbs.id = i + 1;
    sbs.kind = BsKind::small;
    sbs.position = {198.0 * kSign[i][0], 198.0 * kSign[i][1]};
    sbs.coverage_radius = 80.0;
    sbs.p_fixed = 75.0;
    sbs.power_slope = 2.6;
    sbs.p_max_tx = 6.3;
    sbs.p_sleep = 0.0;
    sbs.bandwidth = 20e6;
    sbs.num_rbs = 100;
    s.sbs_list.push_back(sbs);

    RisSpec ris;
    ris.id = i;
    ris.position = {163.0 * kSign[i][0], 163.0 * kSign[i][1]};
    ris.num_elements = 10;
    ris.psr_bits = 3;
    ris.amplitude.assign(10, 1.0);
    ris.element_spacing = 0.04285;
    s.ris_list.push_back(ris);
  }

  s.num_ues = 50;
  s.radio = RadioConstants{};
  s.radio.system_loss_db = 40.0;
  s.radio.direct_loss_db = 30.0;
  s.ris_assignment = RisAssignment::mbs_only;
  s.traffic.hourly_multiplier = residential_traffic_shape();
  s.traffic.peak_demand = 8e6;
  s.learning = LearningConfig{};
  s.learning.overload_penalty = 1e5;
  s.seed = 1;
  return s;
}

ValidationError::ValidationError(std::vector<ValidationIssue> issues)
    : Error([&] {
        std::ostringstream out;
        out << "invalid scenario (" << issues.size() << " issue" << (issues.size() == 1 ? "" : "s") << ")";
        for (const auto& issue : issues) out << "\n  " << issue.path << ": " << issue.message;
        return out.str();
      }()),
      issues_(std::move(issues)) {}

namespace {

class IssueCollector {
 public:
  void check(bool ok, std::string path, std::string message) {
    if (!ok) issues.push_back({std::move(path), std::move(message)});
  }
  std::vector<ValidationIssue> issues;
};

bool finite(const Position& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

void check_bs(IssueCollector& c, const BaseStationSpec& bs, const std::string& path) {
  c.check(finite(bs.position), path + ".position", "coordinates must be finite");
  c.check(bs.coverage_radius > 0.0, path + ".coverage_radius", "coverage_radius > 0");
  c.check(bs.p_fixed > 0.0, path + ".p_fixed", "p_fixed > 0");
  c.check(bs.power_slope > 0.0, path + ".power_slope", "power_slope > 0");
  c.check(bs.p_max_tx > 0.0, path + ".p_max_tx", "p_max_tx > 0");
  c.check(bs.p_sleep >= 0.0 && bs.p_sleep < bs.p_fixed, path + ".p_sleep", "0 <= p_sleep < p_fixed");
  c.check(bs.bandwidth > 0.0, path + ".bandwidth", "bandwidth > 0");
  c.check(bs.num_rbs >= 1, path + ".num_rbs", "num_rbs >= 1");
}

}  // namespace

std::vector<ValidationIssue> validation_issues(const Scenario& s) {
  IssueCollector c;

  c.check(s.mbs.kind == BsKind::macro, "mbs.kind", "exactly one macro BS is required");
  check_bs(c, s.mbs, "mbs");
  for (std::size_t i = 0; i < s.sbs_list.size(); ++i) {
    const auto& sbs = s.sbs_list[i];
    const std::string path = "sbs[" + std::to_string(i) + "]";
    c.check(sbs.kind == BsKind::small, path + ".kind", "exactly one macro BS is required");
    check_bs(c, sbs, path);
    const double reach = distance(sbs.position, s.mbs.position) + sbs.coverage_radius;
    c.check(reach <= s.mbs.coverage_radius + 1e-9, path + ".position", "coverage disk must lie inside the MBS disk");
  }

  for (std::size_t i = 0; i < s.ris_list.size(); ++i) {
    const auto& ris = s.ris_list[i];
    const std::string path = "ris[" + std::to_string(i) + "]";
    c.check(finite(ris.position), path + ".position", "coordinates must be finite");
    c.check(ris.num_elements >= 1, path + ".num_elements", "num_elements >= 1");
    c.check(ris.psr_bits >= 1, path + ".psr_bits", "psr_bits >= 1");
    c.check(ris.element_spacing > 0.0, path + ".element_spacing", "element_spacing > 0");
    c.check(static_cast<int>(ris.amplitude.size()) == ris.num_elements, path + ".amplitude",
            "one amplitude per element");
    const bool in_range = std::all_of(ris.amplitude.begin(), ris.amplitude.end(),
                                      [](double b) { return b >= 0.0 && b <= 1.0; });
    c.check(in_range, path + ".amplitude", "amplitude out of [0,1]");
  }

  c.check(s.num_ues >= 1, "num_ues", "num_ues >= 1");

  const auto& r = s.radio;
  c.check(r.carrier_wavelength > 0.0, "radio.carrier_wavelength", "must be positive");
  c.check(r.pathloss_exp_los > 0.0, "radio.pathloss_exp_los", "must be positive");
  c.check(r.pathloss_exp_nlos > 0.0, "radio.pathloss_exp_nlos", "must be positive");
  c.check(r.pathloss_exp_los < r.pathloss_exp_nlos, "radio.pathloss_exp_los", "pathloss_exp_los < pathloss_exp_nlos");
  c.check(r.noise_psd > 0.0, "radio.noise_psd", "must be positive");
  c.check(r.sinr_threshold > 0.0, "radio.sinr_threshold", "must be positive");
  c.check(std::isfinite(r.system_loss_db), "radio.system_loss_db", "must be finite");
  c.check(std::isfinite(r.direct_loss_db), "radio.direct_loss_db", "must be finite");

  const auto& mult = s.traffic.hourly_multiplier;
  c.check(std::all_of(mult.begin(), mult.end(), [](double m) { return m >= 0.0 && m <= 1.0; }),
          "traffic.hourly_multiplier", "values must lie in [0,1]");
  c.check(*std::max_element(mult.begin(), mult.end()) == 1.0, "traffic.hourly_multiplier",
          "maximum multiplier must equal 1.0");
  c.check(s.traffic.peak_demand >= 0.0 && std::isfinite(s.traffic.peak_demand), "traffic.peak_demand",
          "peak_demand >= 0");

  const auto& l = s.learning;
  c.check(l.lr_initial > 0.0 && l.lr_initial <= 1.0, "learning.lr_initial", "0 < lr_initial <= 1");
  c.check(l.lr_decay_factor > 0.0 && l.lr_decay_factor <= 1.0, "learning.lr_decay_factor", "in (0,1]");
  c.check(l.lr_decay_every >= 1, "learning.lr_decay_every", "lr_decay_every >= 1");
  c.check(l.lr_floor > 0.0 && l.lr_floor <= l.lr_initial, "learning.lr_floor", "0 < lr_floor <= lr_initial");
  c.check(l.discount > 0.0 && l.discount < 1.0, "learning.discount", "0 < discount < 1");
  c.check(l.epsilon_initial >= 0.0 && l.epsilon_initial <= 1.0, "learning.epsilon_initial", "0 <= epsilon <= 1");
  c.check(l.epsilon_decay_factor > 0.0 && l.epsilon_decay_factor <= 1.0, "learning.epsilon_decay_factor",
          "in (0,1]");
  c.check(l.epsilon_floor >= 0.0 && l.epsilon_floor <= 1.0, "learning.epsilon_floor", "0 <= epsilon_floor <= 1");
  c.check(l.episodes >= 0, "learning.episodes", "episodes >= 0");
  c.check(l.eval_episodes >= 0, "learning.eval_episodes", "eval_episodes >= 0");
  c.check(l.overload_penalty >= 0.0 && std::isfinite(l.overload_penalty), "learning.overload_penalty",
          "overload_penalty >= 0");
  c.check(l.load_bins >= 2, "learning.load_bins", "load_bins >= 2");
  c.check(!l.power_levels.empty(), "learning.power_levels", "power_levels must be non-empty");
  for (std::size_t i = 0; i < l.power_levels.size(); ++i) {
    const double p = l.power_levels[i];
    c.check(p > 0.0 && p <= 1.0, "learning.power_levels[" + std::to_string(i) + "]", "each level in (0,1]");
    if (i > 0) {
      c.check(p > l.power_levels[i - 1], "learning.power_levels[" + std::to_string(i) + "]",
              "levels must be strictly increasing");
    }
  }
  // Goals are enumerated as bit patterns over SBSs.
  c.check(s.sbs_list.size() <= 16, "sbs", "at most 16 SBSs");
  return std::move(c.issues);
}

const Scenario& validate(const Scenario& scenario) {
  auto issues = validation_issues(scenario);
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return scenario;
}

double demand_at(const TrafficPattern& traffic, int hour, double base_demand) {
  if (hour < 0 || hour >= 24) throw InvalidArgument("hour out of range: " + std::to_string(hour));
  return base_demand * traffic.hourly_multiplier[static_cast<std::size_t>(hour)];
}

WorldInstance instantiate(const Scenario& scenario, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {0x776f726c64ULL}));  // "world"
  WorldInstance world;
  const auto n = static_cast<std::size_t>(scenario.num_ues);
  world.ue_positions.reserve(n);
  const double radius = scenario.mbs.coverage_radius;
  for (std::size_t k = 0; k < n; ++k) {
    const double r = radius * std::sqrt(rng.uniform());
    const double angle = 2.0 * std::numbers::pi * rng.uniform();
    world.ue_positions.push_back(
        {scenario.mbs.position.x + r * std::cos(angle), scenario.mbs.position.y + r * std::sin(angle)});
  }
  world.base_demand.assign(n, scenario.traffic.peak_demand / static_cast<double>(n));
  return world;
}

std::vector<double> demands_at(const Scenario& scenario, const WorldInstance& world, int hour) {
  std::vector<double> out(world.num_ues());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = demand_at(scenario.traffic, hour, world.base_demand[k]);
  return out;
}

}  // namespace rissim
