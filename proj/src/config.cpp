#include "rissim/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace rissim {

namespace {

[[noreturn]] void fail(std::string_view source, const std::string& key, const std::string& message) {
  throw ConfigError(std::string(source) + ": " + key + ": " + message);
}

std::string join_key(const std::string& parent, const std::string& child) {
  return parent.empty() ? child : parent + "." + child;
}

class Reader {
 public:
  explicit Reader(std::string_view source) : source_(source) {}

  void require_map(const YAML::Node& node, const std::string& key) const {
    if (!node.IsMap()) fail(source_, key.empty() ? "<root>" : key, "expected a mapping");
  }

  void check_keys(const YAML::Node& node, const std::string& key, std::initializer_list<std::string_view> known) const {
    require_map(node, key);
    for (const auto& entry : node) {
      const auto name = entry.first.as<std::string>();
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        fail(source_, join_key(key, name), "unknown key");
      }
    }
  }

  template <typename T>
  void read(const YAML::Node& parent, const std::string& parent_key, const char* name, T& out) const {
    const YAML::Node node = parent[name];
    if (!node) return;
    out = scalar<T>(node, join_key(parent_key, name));
  }

  template <typename T>
  T scalar(const YAML::Node& node, const std::string& key) const {
    if (!node.IsScalar()) fail(source_, key, "expected a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(source_, key, "cannot read value '" + node.Scalar() + "'");
    }
  }

  template <typename T>
  std::vector<T> list(const YAML::Node& node, const std::string& key) const {
    if (!node.IsSequence()) fail(source_, key, "expected a list");
    std::vector<T> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
      out.push_back(scalar<T>(node[i], key + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

  Position position(const YAML::Node& node, const std::string& key) const {
    const auto xy = list<double>(node, key);
    if (xy.size() != 2) fail(source_, key, "expected [x, y]");
    return {xy[0], xy[1]};
  }

  std::string_view source() const noexcept { return source_; }

 private:
  std::string_view source_;
};

void read_bs(const Reader& in, const YAML::Node& node, const std::string& key, BaseStationSpec& bs) {
  in.check_keys(node, key,
                {"position", "coverage_radius", "p_fixed", "power_slope", "p_max_tx", "p_sleep", "bandwidth", "num_rbs"});
  if (node["position"]) bs.position = in.position(node["position"], key + ".position");
  in.read(node, key, "coverage_radius", bs.coverage_radius);
  in.read(node, key, "p_fixed", bs.p_fixed);
  in.read(node, key, "power_slope", bs.power_slope);
  in.read(node, key, "p_max_tx", bs.p_max_tx);
  in.read(node, key, "p_sleep", bs.p_sleep);
  in.read(node, key, "bandwidth", bs.bandwidth);
  in.read(node, key, "num_rbs", bs.num_rbs);
}

void read_ris(const Reader& in, const YAML::Node& node, const std::string& key, RisSpec& ris) {
  in.check_keys(node, key, {"position", "num_elements", "psr_bits", "amplitude", "element_spacing"});
  if (node["position"]) ris.position = in.position(node["position"], key + ".position");
  in.read(node, key, "num_elements", ris.num_elements);
  in.read(node, key, "psr_bits", ris.psr_bits);
  in.read(node, key, "element_spacing", ris.element_spacing);
  const YAML::Node amp = node["amplitude"];
  if (!amp) {
    const double beta = ris.amplitude.empty() ? 1.0 : ris.amplitude.front();
    ris.amplitude.assign(static_cast<std::size_t>(std::max(ris.num_elements, 0)), beta);
  } else if (amp.IsSequence()) {
    ris.amplitude = in.list<double>(amp, key + ".amplitude");
  } else {
    // A scalar applies to every element.
    ris.amplitude.assign(static_cast<std::size_t>(std::max(ris.num_elements, 0)),
                         in.scalar<double>(amp, key + ".amplitude"));
  }
}

void read_radio(const Reader& in, const YAML::Node& node, RadioConstants& radio) {
  const std::string key = "radio";
  in.check_keys(node, key,
                {"carrier_wavelength", "pathloss_exp_los", "pathloss_exp_nlos", "noise_psd", "sinr_threshold",
                 "system_loss_db", "direct_loss_db"});
  in.read(node, key, "carrier_wavelength", radio.carrier_wavelength);
  in.read(node, key, "pathloss_exp_los", radio.pathloss_exp_los);
  in.read(node, key, "pathloss_exp_nlos", radio.pathloss_exp_nlos);
  in.read(node, key, "noise_psd", radio.noise_psd);
  in.read(node, key, "sinr_threshold", radio.sinr_threshold);
  in.read(node, key, "system_loss_db", radio.system_loss_db);
  in.read(node, key, "direct_loss_db", radio.direct_loss_db);
}

void read_traffic(const Reader& in, const YAML::Node& node, TrafficPattern& traffic) {
  const std::string key = "traffic";
  in.check_keys(node, key, {"peak_demand_mbps", "hourly_multiplier"});
  if (node["peak_demand_mbps"]) {
    traffic.peak_demand = 1e6 * in.scalar<double>(node["peak_demand_mbps"], key + ".peak_demand_mbps");
  }
  if (node["hourly_multiplier"]) {
    const auto values = in.list<double>(node["hourly_multiplier"], key + ".hourly_multiplier");
    if (values.size() != 24) fail(in.source(), key + ".hourly_multiplier", "expected 24 values");
    std::copy(values.begin(), values.end(), traffic.hourly_multiplier.begin());
  }
}

void read_learning(const Reader& in, const YAML::Node& node, LearningConfig& l) {
  const std::string key = "learning";
  in.check_keys(node, key,
                {"lr_initial", "lr_decay_factor", "lr_decay_every", "lr_floor", "discount", "epsilon_initial",
                 "epsilon_decay_factor", "epsilon_floor", "episodes", "eval_episodes", "overload_penalty",
                 "load_bins", "power_levels"});
  in.read(node, key, "lr_initial", l.lr_initial);
  in.read(node, key, "lr_decay_factor", l.lr_decay_factor);
  in.read(node, key, "lr_decay_every", l.lr_decay_every);
  in.read(node, key, "lr_floor", l.lr_floor);
  in.read(node, key, "discount", l.discount);
  in.read(node, key, "epsilon_initial", l.epsilon_initial);
  in.read(node, key, "epsilon_decay_factor", l.epsilon_decay_factor);
  in.read(node, key, "epsilon_floor", l.epsilon_floor);
  in.read(node, key, "episodes", l.episodes);
  in.read(node, key, "eval_episodes", l.eval_episodes);
  in.read(node, key, "overload_penalty", l.overload_penalty);
  in.read(node, key, "load_bins", l.load_bins);
  if (node["power_levels"]) l.power_levels = in.list<double>(node["power_levels"], key + ".power_levels");
}

void read_sweep(const Reader& in, const YAML::Node& node, SweepSpec& sweep) {
  const std::string key = "sweep";
  in.check_keys(node, key, {"cases", "peak_demand_mbps", "element_counts", "psr_bits", "realizations"});
  if (node["cases"]) {
    sweep.cases.clear();
    const auto names = in.list<std::string>(node["cases"], key + ".cases");
    for (std::size_t i = 0; i < names.size(); ++i) {
      const auto c = parse_case(names[i]);
      if (!c) fail(in.source(), key + ".cases[" + std::to_string(i) + "]", "unknown case '" + names[i] + "'");
      sweep.cases.push_back(*c);
    }
  }
  if (node["peak_demand_mbps"]) sweep.peak_demand_mbps = in.list<double>(node["peak_demand_mbps"], key + ".peak_demand_mbps");
  if (node["element_counts"]) sweep.element_counts = in.list<int>(node["element_counts"], key + ".element_counts");
  if (node["psr_bits"]) sweep.psr_bits = in.list<int>(node["psr_bits"], key + ".psr_bits");
  in.read(node, key, "realizations", sweep.realizations);
}

}  // namespace

ExperimentConfig default_experiment() {
  ExperimentConfig config;
  config.scenario = paper_default_scenario();
  config.runs = 10;
  config.sweep.cases.assign(std::begin(kAllCases), std::end(kAllCases));
  config.sweep.peak_demand_mbps = {2.0, 4.0, 6.0, 8.0};
  config.sweep.element_counts = {2, 4, 6, 8, 10};
  config.sweep.psr_bits = {1, 2, 3, 4};
  config.sweep.realizations = 1000;
  return config;
}

std::vector<std::string> sweep_issues(const SweepSpec& sweep) {
  std::vector<std::string> issues;
  if (sweep.cases.empty()) issues.emplace_back("sweep.cases: case list must be non-empty");
  if (sweep.peak_demand_mbps.empty()) issues.emplace_back("sweep.peak_demand_mbps: list must be non-empty");
  if (sweep.element_counts.empty()) issues.emplace_back("sweep.element_counts: list must be non-empty");
  if (sweep.psr_bits.empty()) issues.emplace_back("sweep.psr_bits: list must be non-empty");
  for (double p : sweep.peak_demand_mbps) {
    if (!(p >= 0.0)) issues.emplace_back("sweep.peak_demand_mbps: values must be >= 0");
  }
  for (int n : sweep.element_counts) {
    if (n < 0) issues.emplace_back("sweep.element_counts: values must be >= 0");
  }
  for (int b : sweep.psr_bits) {
    if (b < 0) issues.emplace_back("sweep.psr_bits: values must be >= 0 (0 = continuous)");
  }
  if (sweep.realizations < 100) issues.emplace_back("sweep.realizations: realizations >= 100");
  return issues;
}

ExperimentConfig parse_config(std::string_view text, std::string_view source) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string(source) + ": parse error: " + e.what());
  }
  ExperimentConfig config = default_experiment();
  if (root.IsNull()) return config;

  const Reader in(source);
  in.check_keys(root, "",
                {"seed", "num_ues", "ris_assignment", "mbs", "sbs", "ris", "radio", "traffic", "learning",
                 "experiment", "sweep"});
  Scenario& s = config.scenario;
  in.read(root, "", "seed", s.seed);
  in.read(root, "", "num_ues", s.num_ues);
  if (root["ris_assignment"]) {
    const auto name = in.scalar<std::string>(root["ris_assignment"], "ris_assignment");
    if (name == "mbs_only") {
      s.ris_assignment = RisAssignment::mbs_only;
    } else if (name == "all_bs") {
      s.ris_assignment = RisAssignment::all_bs;
    } else {
      fail(source, "ris_assignment", "expected mbs_only or all_bs, got '" + name + "'");
    }
  }
  if (root["mbs"]) read_bs(in, root["mbs"], "mbs", s.mbs);

  // List entries start from the built-in SBS / RIS template, so an entry may
  // give only a position.
  const Scenario defaults = paper_default_scenario();
  if (root["sbs"]) {
    const YAML::Node list = root["sbs"];
    if (!list.IsSequence()) fail(source, "sbs", "expected a list");
    s.sbs_list.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      BaseStationSpec sbs = defaults.sbs_list.front();
      sbs.id = static_cast<int>(i) + 1;
      read_bs(in, list[i], "sbs[" + std::to_string(i) + "]", sbs);
      s.sbs_list.push_back(sbs);
    }
  }
  if (root["ris"]) {
    const YAML::Node list = root["ris"];
    if (!list.IsSequence()) fail(source, "ris", "expected a list");
    s.ris_list.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      RisSpec ris = defaults.ris_list.front();
      ris.id = static_cast<int>(i);
      read_ris(in, list[i], "ris[" + std::to_string(i) + "]", ris);
      s.ris_list.push_back(ris);
    }
  }
  if (root["radio"]) read_radio(in, root["radio"], s.radio);
  if (root["traffic"]) read_traffic(in, root["traffic"], s.traffic);
  if (root["learning"]) read_learning(in, root["learning"], s.learning);
  if (root["experiment"]) {
    in.check_keys(root["experiment"], "experiment", {"runs"});
    in.read(root["experiment"], "experiment", "runs", config.runs);
  }
  if (root["sweep"]) read_sweep(in, root["sweep"], config.sweep);

  if (config.runs < 1) fail(source, "experiment.runs", "runs >= 1");
  const auto issues = validation_issues(s);
  if (!issues.empty()) {
    std::ostringstream msg;
    msg << source << ": invalid scenario";
    for (const auto& issue : issues) msg << "\n  " << issue.path << ": " << issue.message;
    throw ConfigError(msg.str());
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << file.rdbuf();
  return parse_config(text.str(), path.string());
}

}  // namespace rissim
