#include "rissim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace rissim {

namespace {

using nlohmann::ordered_json;

std::string join_row(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) line += ',';
    line += csv_field(fields[i]);
  }
  line += "\r\n";
  return line;
}

ordered_json estimate_json(const Estimate& e) {
  return ordered_json{{"mean", e.mean}, {"ci95", e.half_width}};
}

ordered_json aggregate_json(const Aggregate& agg) {
  ordered_json out = ordered_json::object();
  for (std::size_t m = 0; m < kMetricCount; ++m) {
    out[std::string(metric_name(static_cast<Metric>(m)))] = estimate_json(agg.metrics[m]);
  }
  return out;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

Scenario scenario_at_peak(const Scenario& base, double peak_mbps) {
  Scenario s = base;
  s.traffic.peak_demand = peak_mbps * 1e6;
  return s;
}

std::string peak_label(double mbps) { return format_number(mbps); }

}  // namespace

void apply_overrides(ExperimentConfig& config, const Overrides& o) {
  if (o.seed) config.scenario.seed = *o.seed;
  if (o.runs) {
    if (*o.runs < 1) throw ConfigError("--runs must be >= 1");
    config.runs = *o.runs;
  }
  if (o.episodes) {
    if (*o.episodes < 0) throw ConfigError("--episodes must be >= 0");
    config.scenario.learning.episodes = *o.episodes;
  }
  if (o.peak_demand_mbps) {
    if (!(*o.peak_demand_mbps >= 0.0)) throw ConfigError("--peak must be >= 0");
    config.scenario.traffic.peak_demand = *o.peak_demand_mbps * 1e6;
  }
  if (o.cases) config.sweep.cases = *o.cases;
  if (o.sweep_peaks) config.sweep.peak_demand_mbps = *o.sweep_peaks;
}

std::size_t worker_count() {
  if (const char* env = std::getenv("RIS_SIM_WORKERS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1) return static_cast<std::size_t>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (!stop.load()) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) break;
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          stop = true;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<RunMetrics> run_replicates(const Scenario& scenario, Case c, int runs, std::size_t workers) {
  validate(scenario);
  std::vector<RunMetrics> out(static_cast<std::size_t>(runs));
  parallel_for(out.size(), workers, [&](std::size_t i) {
    Scenario s = scenario;
    s.seed = scenario.seed + i;
    out[i] = run_case(s, c);
  });
  return out;
}

std::string csv_field(std::string_view text) {
  const bool quote = text.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!quote) return std::string(text);
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

std::size_t final_window(int episodes) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(episodes) / 10);
}

std::vector<OutputFile> run_outputs(const ExperimentConfig& config, Case c, std::size_t workers) {
  const Scenario& sc = config.scenario;
  const auto runs = run_replicates(sc, c, config.runs, workers);

  std::vector<std::string> header{"run", "seed", "phase", "episode"};
  for (std::size_t m = 0; m < kMetricCount; ++m) header.emplace_back(metric_name(static_cast<Metric>(m)));
  std::string csv = join_row(header);
  for (std::size_t r = 0; r < runs.size(); ++r) {
    auto emit = [&](std::string_view phase, std::size_t episode, const EpisodeSummary& e) {
      std::vector<std::string> row{std::to_string(r), std::to_string(runs[r].seed), std::string(phase),
                                   std::to_string(episode)};
      for (double v : e.values) row.push_back(format_number(v));
      csv += join_row(row);
    };
    for (std::size_t e = 0; e < runs[r].training.size(); ++e) emit("train", e, runs[r].training[e]);
    for (std::size_t e = 0; e < runs[r].evaluation_summary.size(); ++e) emit("eval", e, runs[r].evaluation_summary[e]);
  }

  ordered_json agg;
  agg["case"] = case_name(c);
  agg["runs"] = runs.size();
  agg["seed_base"] = sc.seed;
  agg["peak_demand_mbps"] = sc.traffic.peak_demand / 1e6;
  // A single run has no spread; its means are reported with a null interval.
  auto summarize_runs = [&](auto pick, std::size_t window) {
    if (runs.size() >= 2) {
      std::vector<std::vector<EpisodeSummary>> series;
      for (const auto& run : runs) series.push_back(pick(run));
      return aggregate_json(aggregate(series, window));
    }
    const auto& episodes = pick(runs.front());
    ordered_json out = ordered_json::object();
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      double sum = 0.0;
      for (std::size_t e = episodes.size() - window; e < episodes.size(); ++e) sum += episodes[e].values[m];
      out[std::string(metric_name(static_cast<Metric>(m)))] =
          ordered_json{{"mean", sum / static_cast<double>(window)}, {"ci95", nullptr}};
    }
    return out;
  };
  if (sc.learning.episodes > 0) {
    const std::size_t window = final_window(sc.learning.episodes);
    agg["training_window"] = window;
    agg["training"] = summarize_runs([](const RunMetrics& r) -> const std::vector<EpisodeSummary>& { return r.training; },
                                     window);
  }
  if (sc.learning.eval_episodes > 0) {
    agg["evaluation"] = summarize_runs(
        [](const RunMetrics& r) -> const std::vector<EpisodeSummary>& { return r.evaluation_summary; },
        static_cast<std::size_t>(sc.learning.eval_episodes));
  }

  ordered_json manifest;
  manifest["command"] = "run";
  manifest["case"] = case_name(c);
  manifest["seed_base"] = sc.seed;
  manifest["runs"] = config.runs;
  manifest["episodes"] = sc.learning.episodes;
  manifest["eval_episodes"] = sc.learning.eval_episodes;
  manifest["peak_demand_mbps"] = sc.traffic.peak_demand / 1e6;
  manifest["files"] = ordered_json{{"runs.csv", "per-episode summaries for every run, training then evaluation"},
                                   {"aggregate.json", "cross-run means with Student-t 95% half-widths"}};
  return {{"runs.csv", csv}, {"aggregate.json", dump(agg)}, {"manifest.json", dump(manifest)}};
}

std::vector<OutputFile> sweep_outputs(const ExperimentConfig& config, std::size_t workers) {
  const auto issues = sweep_issues(config.sweep);
  if (!issues.empty()) {
    std::string msg = "invalid sweep";
    for (const auto& issue : issues) msg += "\n  " + issue;
    throw ConfigError(msg);
  }
  if (config.runs < 2) throw ConfigError("sweep needs at least 2 runs for confidence intervals");
  if (config.scenario.learning.eval_episodes < 1) throw ConfigError("sweep needs learning.eval_episodes >= 1");
  validate(config.scenario);

  const auto& sweep = config.sweep;
  const auto& peaks = sweep.peak_demand_mbps;
  const std::size_t num_runs = static_cast<std::size_t>(config.runs);
  const std::size_t points = sweep.cases.size() * peaks.size();
  const double top_peak = *std::max_element(peaks.begin(), peaks.end());

  std::vector<Scenario> scenarios;
  for (double p : peaks) scenarios.push_back(scenario_at_peak(config.scenario, p));

  // One job per (case, peak, run); results land in fixed slots.
  std::vector<RunMetrics> results(points * num_runs);
  parallel_for(results.size(), workers, [&](std::size_t job) {
    const std::size_t run = job % num_runs;
    const std::size_t point = job / num_runs;
    const Case c = sweep.cases[point / peaks.size()];
    Scenario s = scenarios[point % peaks.size()];
    s.seed = config.scenario.seed + run;
    results[job] = run_case(s, c);
  });
  auto runs_at = [&](std::size_t case_index, std::size_t peak_index) {
    const auto first = results.begin() + static_cast<std::ptrdiff_t>((case_index * peaks.size() + peak_index) * num_runs);
    return std::span<const RunMetrics>(&*first, num_runs);
  };

  std::vector<OutputFile> files;
  ordered_json manifest_files = ordered_json::object();
  struct FigureSpec {
    const char* figure;
    Metric day;
    Metric peak;
    const char* label;
  };
  const FigureSpec figures[] = {
      {"fig3", Metric::total_power, Metric::peak_total_power, "total_power_w"},
      {"fig4", Metric::mean_throughput, Metric::peak_mean_throughput, "mean_throughput_bps"},
      {"fig5", Metric::ee, Metric::peak_ee, "ee_bits_per_joule"},
  };

  for (std::size_t ci = 0; ci < sweep.cases.size(); ++ci) {
    const std::string name(case_name(sweep.cases[ci]));
    std::vector<Aggregate> aggs;
    for (std::size_t pi = 0; pi < peaks.size(); ++pi) aggs.push_back(aggregate_evaluation(runs_at(ci, pi)));

    for (const auto& fig : figures) {
      const std::string label = fig.label;
      std::string csv = join_row({"peak_demand_mbps", "day_" + label, "day_" + label + "_ci95", "peak_hour_" + label,
                                  "peak_hour_" + label + "_ci95"});
      for (std::size_t pi = 0; pi < peaks.size(); ++pi) {
        const auto& day = aggs[pi][fig.day];
        const auto& peak = aggs[pi][fig.peak];
        csv += join_row({peak_label(peaks[pi]), format_number(day.mean), format_number(day.half_width),
                         format_number(peak.mean), format_number(peak.half_width)});
      }
      const std::string file = std::string(fig.figure) + "_" + name + ".csv";
      manifest_files[file] = ordered_json{{"figure", fig.figure}, {"case", name}, {"x", "peak_demand_mbps"}};
      files.push_back({file, csv});
    }

    // Hourly on-probability and reward convergence at the largest peak.
    const auto top = static_cast<std::size_t>(std::find(peaks.begin(), peaks.end(), top_peak) - peaks.begin());
    const auto top_runs = runs_at(ci, top);
    const std::size_t num_sbs = config.scenario.sbs_list.size();
    std::vector<std::string> header{"hour"};
    for (std::size_t j = 0; j < num_sbs; ++j) header.push_back("sbs_" + std::to_string(j + 1));
    header.emplace_back("mean");
    std::string fig6 = join_row(header);
    for (int hour = 0; hour < 24; ++hour) {
      const auto prob = sbs_on_probability(top_runs, hour);
      std::vector<std::string> row{std::to_string(hour)};
      double mean = 0.0;
      for (double p : prob) {
        row.push_back(format_number(p));
        mean += p / static_cast<double>(prob.size());
      }
      row.push_back(format_number(prob.empty() ? 0.0 : mean));
      fig6 += join_row(row);
    }
    files.push_back({"fig6_" + name + ".csv", fig6});
    manifest_files["fig6_" + name + ".csv"] =
        ordered_json{{"figure", "fig6"}, {"case", name}, {"x", "hour"}, {"peak_demand_mbps", top_peak}};

    std::string fig8 = join_row({"episode", "smoothed_r_ex", "smoothed_r_ex_ci95"});
    const std::size_t episodes = top_runs.front().training.size();
    std::vector<std::vector<double>> smoothed;
    for (const auto& run : top_runs) {
      std::vector<double> reward;
      for (const auto& e : run.training) reward.push_back(e[Metric::r_ex]);
      smoothed.push_back(moving_average(reward, kRewardSmoothing));
    }
    std::vector<double> column(smoothed.size());
    for (std::size_t e = 0; e < episodes; ++e) {
      for (std::size_t r = 0; r < smoothed.size(); ++r) column[r] = smoothed[r][e];
      std::sort(column.begin(), column.end());
      const auto est = mean_ci95(column);
      fig8 += join_row({std::to_string(e), format_number(est.mean), format_number(est.half_width)});
    }
    files.push_back({"fig8_" + name + ".csv", fig8});
    manifest_files["fig8_" + name + ".csv"] = ordered_json{
        {"figure", "fig8"}, {"case", name}, {"x", "episode"}, {"smoothing", kRewardSmoothing}, {"peak_demand_mbps", top_peak}};
  }

  const SinrTable table = sinr_vs_elements(config.scenario, sweep.element_counts, sweep.psr_bits, sweep.realizations,
                                           config.scenario.seed);
  std::string fig7 = join_row({"num_elements", "psr_bits", "mean_sinr_db", "mean_sinr_db_ci95"});
  for (const auto& p : table.points) {
    fig7 += join_row({std::to_string(p.elements), std::to_string(p.psr_bits), format_number(p.mean_sinr_db),
                      format_number(p.half_width)});
  }
  files.push_back({"fig7_ris.csv", fig7});
  manifest_files["fig7_ris.csv"] =
      ordered_json{{"figure", "fig7"}, {"x", "num_elements"}, {"series", "psr_bits (0 = continuous phases)"},
                   {"realizations", sweep.realizations}};

  ordered_json manifest;
  manifest["command"] = "sweep";
  manifest["seed_base"] = config.scenario.seed;
  manifest["runs"] = config.runs;
  manifest["episodes"] = config.scenario.learning.episodes;
  manifest["eval_episodes"] = config.scenario.learning.eval_episodes;
  std::vector<std::string> case_names;
  for (Case c : sweep.cases) case_names.emplace_back(case_name(c));
  manifest["cases"] = case_names;
  manifest["peak_demand_mbps"] = peaks;
  manifest["element_counts"] = sweep.element_counts;
  manifest["psr_bits"] = sweep.psr_bits;
  manifest["files"] = manifest_files;
  files.push_back({"manifest.json", dump(manifest)});
  return files;
}

void commit_outputs(const std::filesystem::path& dir, const std::vector<OutputFile>& files) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());

  std::vector<fs::path> staged;
  auto discard = [&] {
    for (const auto& p : staged) fs::remove(p, ec);
  };
  for (const auto& file : files) {
    const fs::path tmp = dir / (file.name + ".partial");
    staged.push_back(tmp);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << file.content;
    out.close();
    if (!out) {
      discard();
      throw Error("cannot write " + tmp.string());
    }
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    fs::rename(staged[i], dir / files[i].name, ec);
    if (ec) {
      discard();
      throw Error("cannot move " + staged[i].string() + " into place: " + ec.message());
    }
  }
}

}  // namespace rissim
