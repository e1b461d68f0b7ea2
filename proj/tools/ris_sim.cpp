// ris_sim: train and evaluate sleep / RIS control policies from a config file.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rissim/config.hpp"
#include "rissim/experiment.hpp"
#include "rissim/kernels.hpp"

namespace {

using namespace rissim;

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct CommonArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<int> episodes;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_out) {
  cmd->add_option("config", args.config, "Config file (YAML)")->required();
  if (with_out) cmd->add_option("-o,--out", args.out, "Output directory")->required();
  cmd->add_option("--seed", args.seed, "Base seed; run i uses seed + i");
  cmd->add_option("--runs", args.runs, "Independent runs");
  cmd->add_option("--episodes", args.episodes, "Training episodes per run");
}

std::vector<Case> parse_cases(const std::vector<std::string>& names) {
  std::vector<Case> out;
  for (const auto& n : names) {
    const auto c = parse_case(n);
    if (!c) throw ConfigError("unknown case '" + n + "' (expected typical, sleep_only, ris_only or ris_sleep)");
    out.push_back(*c);
  }
  return out;
}

Overrides to_overrides(const CommonArgs& args) {
  Overrides o;
  o.seed = args.seed;
  o.runs = args.runs;
  o.episodes = args.episodes;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-efficiency simulator for RIS-assisted heterogeneous networks"};
  app.require_subcommand(1);

  CommonArgs run_args;
  std::string run_case_name = "ris_sleep";
  std::optional<double> run_peak;
  auto* run = app.add_subcommand("run", "Train and evaluate one case over several seeds");
  add_common(run, run_args, true);
  run->add_option("--case", run_case_name, "typical | sleep_only | ris_only | ris_sleep");
  run->add_option("--peak", run_peak, "Cell peak demand in Mbps");

  CommonArgs sweep_args;
  std::vector<std::string> sweep_cases;
  std::vector<double> sweep_peaks;
  auto* sweep = app.add_subcommand("sweep", "Run every case over the peak-demand list and write figure series");
  add_common(sweep, sweep_args, true);
  sweep->add_option("--cases", sweep_cases, "Subset of cases")->delimiter(',');
  sweep->add_option("--peaks", sweep_peaks, "Peak demands in Mbps")->delimiter(',');

  std::string validate_path;
  auto* check = app.add_subcommand("validate", "Parse and validate a config file");
  check->add_option("config", validate_path, "Config file (YAML)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) {
      const auto config = load_config(validate_path);
      std::printf("%s: ok (%zu SBS, %zu RIS, %d UEs, %d runs)\n", validate_path.c_str(),
                  config.scenario.sbs_list.size(), config.scenario.ris_list.size(), config.scenario.num_ues,
                  config.runs);
      return 0;
    }

    const std::size_t workers = worker_count();
    if (*run) {
      auto config = load_config(run_args.config);
      Overrides o = to_overrides(run_args);
      o.peak_demand_mbps = run_peak;
      apply_overrides(config, o);
      const auto c = parse_cases({run_case_name}).front();
      validate(config.scenario);
      commit_outputs(run_args.out, run_outputs(config, c, workers));
      std::printf("wrote %s (case %s, %d runs, simd %s)\n", run_args.out.c_str(), run_case_name.c_str(), config.runs,
                  std::string(kernels::isa_name(kernels::active_isa())).c_str());
      return 0;
    }

    auto config = load_config(sweep_args.config);
    Overrides o = to_overrides(sweep_args);
    if (!sweep_cases.empty()) o.cases = parse_cases(sweep_cases);
    if (!sweep_peaks.empty()) o.sweep_peaks = sweep_peaks;
    apply_overrides(config, o);
    validate(config.scenario);
    commit_outputs(sweep_args.out, sweep_outputs(config, workers));
    std::printf("wrote %s (%zu cases x %zu peaks, %d runs)\n", sweep_args.out.c_str(), config.sweep.cases.size(),
                config.sweep.peak_demand_mbps.size(), config.runs);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
