// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are fixed
// here and nowhere else.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rissim/channel.hpp"
#include "rissim/config.hpp"
#include "rissim/energy.hpp"
#include "rissim/experiment.hpp"
#include "rissim/hrl.hpp"
#include "rissim/kernels.hpp"
#include "rissim/metrics.hpp"
#include "rissim/radio.hpp"
#include "rissim/simulation.hpp"

namespace {

using namespace rissim;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Criterion 1.
constexpr double kFormulaRelTol = 1e-9;
constexpr double kFormulaSeconds = 1.0;
// Criterion 2.
constexpr int kCoherentRealizations = 1000;
constexpr int kRandomPhaseVectors = 100;
constexpr double kCoherentRelTol = 1e-12;
constexpr double kCoherentSeconds = 10.0;
// Criterion 3.
constexpr int kQuantAnglesPerBits = 100000;
constexpr int kQuantRealizations = 2000;
constexpr double kQuantMaxLoss = 0.02;
// Criterion 4.
constexpr double kEeRatioTarget = 1.5;
constexpr double kThroughputPeakFloorMbps = 5.0;
// Criterion 5: hour windows are [begin, end).
constexpr int kNightBegin = 3, kNightEnd = 9;
constexpr double kNightOnMax = 0.3;
constexpr int kDayBegin = 11, kDayEnd = 17;
// Criterion 6.
constexpr int kSinrRealizations = 1000;
// Criterion 7.
constexpr double kCvMax = 0.10;
// Criterion 8.
constexpr int kToySeeds = 10;
constexpr int kToyRequired = 9;
constexpr int kToyEnumerationEpisodes = 200;
constexpr std::uint64_t kToyWorldSeed = 16;
// Exploration reaches its floor near episode 920 under the default schedule;
// the toy trains past that so the greedy policy is a converged one.
constexpr int kToyEpisodes = 2000;

double rel_err(double got, double want) {
  const double scale = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / scale;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int criterion, bool pass, const std::string& what) {
  if (!pass) ++failures;
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, what.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

// ---------------------------------------------------------------------------
// 1. Formula oracles on hand-built instances.

void criterion_formulas() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  auto track = [&](double got, double want) { worst = std::max(worst, rel_err(got, want)); };

  // Three BSs on a four-RB grid, four UEs.
  RbAllocation alloc;
  alloc.per_bs = {BsAllocation{0.4, 180e3, {0, 1, 0, -1}}, BsAllocation{0.063, 180e3, {2, 2, -1, -1}},
                  BsAllocation{0.02, 180e3, {-1, 3, 3, 3}}};
  const Association assoc{{0, 0, 1, 2}};
  GainMatrix gains{3, 4, {}};
  for (int i = 0; i < 12; ++i) gains.values.push_back(1e-11 * (1.0 + 0.37 * i * i));
  const double n0 = 4e-21;
  const std::vector<double> demand{3e6, 1e5, 5e6, 2e6};
  const auto links = link_report(alloc, assoc, gains, n0, demand, 1.0);
  for (std::size_t k = 0; k < 4; ++k) {
    const auto j = static_cast<std::size_t>(assoc.serving[k]);
    double signal = 0.0, interference = 0.0, bw = 0.0;
    for (std::size_t r = 0; r < 4; ++r) {
      if (alloc.per_bs[j].rb_owner[r] != static_cast<int>(k)) continue;
      bw += 180e3;
      signal += alloc.per_bs[j].power_per_rb * gains(j, k);
      for (std::size_t o = 0; o < 3; ++o) {
        if (o != j && alloc.per_bs[o].rb_owner[r] >= 0) interference += alloc.per_bs[o].power_per_rb * gains(o, k);
      }
    }
    const double sinr = signal / (bw * n0 + interference);
    track(links[k].sinr, sinr);
    track(links[k].rate, bw * std::log2(1.0 + sinr));
    track(links[k].throughput, std::min(bw * std::log2(1.0 + sinr), demand[k]));
  }

  // Input power per BS and the penalized objective.
  const Scenario s = paper_default_scenario();
  const double p_out[] = {40.0, 3.1, 0.0, 6.3, 1.7};
  std::vector<PowerDraw> draws;
  double total_power = 0.0;
  for (std::size_t b = 0; b < s.num_bs(); ++b) {
    const auto& spec = s.bs(b);
    const BsMode mode = b == 2 ? BsMode::sleeping : BsMode::active;
    const double p = bs_power(spec, mode, p_out[b]);
    const double want = mode == BsMode::sleeping ? spec.p_sleep : spec.p_fixed + spec.power_slope * p_out[b];
    track(p, want);
    draws.push_back({p, mode});
    total_power += want;
  }
  const int overloaded = overload_count(links, demand, 3);
  double throughput = 0.0;
  for (const auto& l : links) throughput += l.throughput;
  const double phi = 1e5;
  const auto snap = snapshot(draws, links, phi, overloaded);
  track(snap.ee, throughput / total_power);
  track(snap.penalized_objective, throughput / total_power - phi * overloaded);

  // Meta and sub-controller updates.
  QStore store(2, 4);
  store.meta_entry(9, 1) = 3.0;
  store.meta_entry(9, 3) = 7.5;
  store.meta_entry(4, 2) = 1.25;
  const double alpha = 0.95, gamma = 0.3;
  track(update_meta(store, 4, 2, 11.0, 9, alpha, gamma), 1.25 + alpha * (11.0 + gamma * 7.5 - 1.25));
  store.sub_entry(1, 6, true, 0) = 2.0;
  store.sub_entry(1, 6, true, 3) = -4.0;
  store.sub_entry(1, 5, true, 2) = 0.5;
  track(update_sub(store, 1, 5, true, 2, 8.0, 6, true, alpha, gamma), 0.5 + alpha * (8.0 + gamma * 2.0 - 0.5));
  track(intrinsic_reward(4e6, 82.0, phi, 1), 4e6 / 82.0 - phi);

  const double elapsed = seconds_since(t0);
  report(1, worst <= kFormulaRelTol && elapsed < kFormulaSeconds,
         fmt("SINR, power, objective and update oracles; worst relative error %.3g (tol %.0e), %.3f s (limit %.0f s)",
             worst, kFormulaRelTol, elapsed, kFormulaSeconds));
}

// ---------------------------------------------------------------------------
// 2. Coherent combining identity.

void criterion_coherent() {
  const auto t0 = Clock::now();
  Rng rng(20240602);
  double worst = 0.0;
  int beaten = 0;
  for (int rep = 0; rep < kCoherentRealizations; ++rep) {
    const std::size_t n = 1 + rng.below(64);
    const Complex d = rng.uniform() * rng.complex_normal();
    std::vector<Complex> x(n), y(n);
    std::vector<double> beta(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.complex_normal();
      y[i] = rng.complex_normal();
      beta[i] = rng.uniform();
    }
    const auto theta = optimal_phase_shifts(d, x, y).theta;
    const double g = composite_gain(d, x, y, theta, beta);
    double mag = std::abs(d);
    for (std::size_t i = 0; i < n; ++i) mag += beta[i] * std::abs(x[i]) * std::abs(y[i]);
    worst = std::max(worst, rel_err(g, mag * mag));
    std::vector<double> random_theta(n);
    for (int v = 0; v < kRandomPhaseVectors; ++v) {
      for (auto& t : random_theta) t = 2.0 * std::numbers::pi * rng.uniform();
      if (composite_gain(d, x, y, random_theta, beta) > g) ++beaten;
    }
  }
  const double elapsed = seconds_since(t0);
  report(2, worst <= kCoherentRelTol && beaten == 0 && elapsed < kCoherentSeconds,
         fmt("%d realizations: worst |G - (|d| + sum)^2| / G = %.3g (tol %.0e); random phases beat the optimum %d "
             "times of %d; %.2f s (limit %.0f s)",
             kCoherentRealizations, worst, kCoherentRelTol, beaten, kCoherentRealizations * kRandomPhaseVectors,
             elapsed, kCoherentSeconds));
}

// ---------------------------------------------------------------------------
// 3. Quantization bound and 3-bit gain loss.

void criterion_quantization(const Scenario& scenario) {
  Rng rng(77);
  double worst_excess = -1.0;
  for (int bits = 1; bits <= 4; ++bits) {
    const double bound = std::numbers::pi / std::ldexp(1.0, bits);
    for (int i = 0; i < kQuantAnglesPerBits; ++i) {
      const double theta = -8.0 * std::numbers::pi + 16.0 * std::numbers::pi * rng.uniform();
      worst_excess = std::max(worst_excess, circular_distance(quantize_phase(theta, bits), theta) - bound);
    }
    // Grid midpoints are the worst case.
    for (int m = 0; m < (1 << bits); ++m) {
      const double theta = (m + 0.5) * 2.0 * bound;
      worst_excess = std::max(worst_excess, circular_distance(quantize_phase(theta, bits), theta) - bound);
    }
  }
  const bool bound_ok = worst_excess <= 1e-12;

  // Mean MBS link gain over the default cell: 3-bit versus continuous phases.
  const auto world = instantiate(scenario);
  const StaticChannels statics(scenario, world);
  double sum_q = 0.0, sum_c = 0.0;
  double worst_link = 1.0, sum_link_ratio = 0.0;
  int links = 0;
  // Reflected path alone (direct link blocked): the quantizer's worst regime.
  double sum_rq = 0.0, sum_rc = 0.0;
  for (std::size_t k = 0; k < world.num_ues(); ++k) {
    const int r = statics.ris_for(0, k);
    if (r < 0) continue;
    const auto& ris = scenario.ris_list[static_cast<std::size_t>(r)];
    const auto& x = statics.bs_ris(0, static_cast<std::size_t>(r));
    double lq = 0.0, lc = 0.0;
    std::vector<Complex> y(x.size());
    for (int rep = 0; rep < kQuantRealizations; ++rep) {
      const Complex d = statics.direct_amplitude(0, k) * rng.complex_normal();
      for (auto& v : y) v = statics.ris_ue_amplitude(static_cast<std::size_t>(r), k) * rng.complex_normal();
      const auto theta = quantize_phases(optimal_phase_shifts(d, x, y).theta, 3);
      lq += composite_gain(d, x, y, theta, ris.amplitude);
      lc += coherent_gain(d, x, y, ris.amplitude);
      const auto theta_r = quantize_phases(optimal_phase_shifts(Complex(0.0, 0.0), x, y).theta, 3);
      sum_rq += composite_gain(Complex(0.0, 0.0), x, y, theta_r, ris.amplitude);
      sum_rc += coherent_gain(Complex(0.0, 0.0), x, y, ris.amplitude);
    }
    sum_q += lq;
    sum_c += lc;
    worst_link = std::min(worst_link, lq / lc);
    sum_link_ratio += lq / lc;
    ++links;
  }
  const double loss = 1.0 - sum_q / sum_c;
  report(3, bound_ok && loss <= kQuantMaxLoss,
         fmt("phase error <= pi/2^b for b=1..4 (worst excess %.2g); 3-bit mean MBS gain %.2f%% below continuous "
             "(limit %.0f%%) over %d links x %d draws [info: mean per-link loss %.2f%%, worst link %.2f%%, "
             "reflected-only %.2f%%]",
             worst_excess, 100.0 * loss, 100.0 * kQuantMaxLoss, links, kQuantRealizations,
             100.0 * (1.0 - sum_link_ratio / links), 100.0 * (1.0 - worst_link), 100.0 * (1.0 - sum_rq / sum_rc)));
}

// ---------------------------------------------------------------------------
// 4, 5, 7. Case sweep.

struct SweepData {
  std::vector<double> peaks;
  // [case][peak] -> runs
  std::map<std::pair<Case, double>, std::vector<RunMetrics>> runs;
};

SweepData run_sweep(const ExperimentConfig& config) {
  SweepData data;
  data.peaks = {2.0, 4.0, 6.0, 8.0};
  const std::size_t num_runs = static_cast<std::size_t>(config.runs);
  struct Job {
    Case c;
    double peak;
    std::size_t run;
  };
  std::vector<Job> jobs;
  for (Case c : kAllCases) {
    for (double p : data.peaks) {
      data.runs[{c, p}].resize(num_runs);
      for (std::size_t r = 0; r < num_runs; ++r) jobs.push_back({c, p, r});
    }
  }
  const auto t0 = Clock::now();
  parallel_for(jobs.size(), worker_count(), [&](std::size_t i) {
    const Job& job = jobs[i];
    Scenario s = config.scenario;
    s.traffic.peak_demand = job.peak * 1e6;
    s.seed = config.scenario.seed + job.run;
    data.runs.at({job.c, job.peak})[job.run] = run_case(s, job.c);
  });
  std::printf("info: sweep of %zu training runs took %.0f s on %zu worker(s)\n", jobs.size(), seconds_since(t0),
              worker_count());
  return data;
}

void criterion_ordering(const SweepData& data) {
  auto mean_of = [&](Case c, double peak, Metric m) {
    return aggregate_evaluation(data.runs.at({c, peak}))[m].mean;
  };
  const double top = data.peaks.back();
  std::printf("info: %-10s %10s %14s %12s   (peak %.0f Mbps, evaluation day means)\n", "case", "power_W",
              "thr_bps/UE", "EE_bit/J", top);
  for (Case c : kAllCases) {
    std::printf("info: %-10s %10.1f %14.0f %12.1f\n", std::string(case_name(c)).c_str(),
                mean_of(c, top, Metric::total_power), mean_of(c, top, Metric::mean_throughput), mean_of(c, top, Metric::ee));
  }

  const double p_typ = mean_of(Case::typical, top, Metric::total_power);
  const double p_ris = mean_of(Case::ris_only, top, Metric::total_power);
  const double p_sleep = mean_of(Case::sleep_only, top, Metric::total_power);
  const double p_both = mean_of(Case::ris_sleep, top, Metric::total_power);
  const bool power_ok = p_typ > p_ris && p_ris >= p_sleep && p_ris >= p_both;

  bool thr_ok = true;
  std::string thr_detail;
  for (double peak : data.peaks) {
    if (peak < kThroughputPeakFloorMbps) continue;
    const double ris_min = std::min(mean_of(Case::ris_only, peak, Metric::mean_throughput),
                                    mean_of(Case::ris_sleep, peak, Metric::mean_throughput));
    const double plain_max = std::max(mean_of(Case::typical, peak, Metric::mean_throughput),
                                      mean_of(Case::sleep_only, peak, Metric::mean_throughput));
    thr_ok = thr_ok && ris_min >= plain_max;
    thr_detail += fmt(" %.0f Mbps: %.0f vs %.0f;", peak, ris_min, plain_max);
  }

  const double ee_typ = mean_of(Case::typical, top, Metric::ee);
  const double ee_sleep = mean_of(Case::sleep_only, top, Metric::ee);
  const double ee_ris = mean_of(Case::ris_only, top, Metric::ee);
  const double ee_both = mean_of(Case::ris_sleep, top, Metric::ee);
  const double ratio = ee_both / std::max(ee_sleep, ee_ris);
  const bool ee_order = ee_both > ee_sleep && ee_both > ee_ris && ee_typ < ee_sleep && ee_typ < ee_ris;
  const bool ratio_ok = ratio >= kEeRatioTarget;

  report(4, power_ok && thr_ok && ee_order && ratio_ok,
         fmt("(a) power typical %.1f > ris_only %.1f >= sleep_only %.1f, ris_sleep %.1f W: %s; (b) RIS min vs no-RIS "
             "max throughput at peaks >= %.0f Mbps:%s %s; (c) EE order %s, ris_sleep / best other = %.3f (target "
             ">= %.1f)",
             p_typ, p_ris, p_sleep, p_both, power_ok ? "ok" : "violated", kThroughputPeakFloorMbps,
             thr_detail.c_str(), thr_ok ? "ok" : "violated", ee_order ? "ok" : "violated", ratio, kEeRatioTarget));
}

void criterion_sleep_pattern(const SweepData& data) {
  const double top = data.peaks.back();
  auto window_mean = [&](Case c, int begin, int end) {
    double sum = 0.0;
    int count = 0;
    for (int h = begin; h < end; ++h) {
      for (double p : sbs_on_probability(data.runs.at({c, top}), h)) {
        sum += p;
        ++count;
      }
    }
    return sum / count;
  };
  const double night_sleep = window_mean(Case::sleep_only, kNightBegin, kNightEnd);
  const double night_both = window_mean(Case::ris_sleep, kNightBegin, kNightEnd);
  const double day_sleep = window_mean(Case::sleep_only, kDayBegin, kDayEnd);
  const double day_both = window_mean(Case::ris_sleep, kDayBegin, kDayEnd);
  report(5, night_sleep < kNightOnMax && night_both < kNightOnMax && day_both < day_sleep,
         fmt("on-probability %02d-%02dh: sleep_only %.3f, ris_sleep %.3f (limit %.1f); %02d-%02dh: ris_sleep %.3f < "
             "sleep_only %.3f",
             kNightBegin, kNightEnd, night_sleep, night_both, kNightOnMax, kDayBegin, kDayEnd, day_both, day_sleep));
}

double ols_slope(const std::vector<double>& y, std::size_t begin, double* stderr_out) {
  const std::size_t n = y.size() - begin;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = begin; i < y.size(); ++i) {
    mx += static_cast<double>(i) / n;
    my += y[i] / n;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = begin; i < y.size(); ++i) {
    sxx += (i - mx) * (i - mx);
    sxy += (i - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  if (stderr_out != nullptr) {
    double sse = 0.0;
    for (std::size_t i = begin; i < y.size(); ++i) {
      const double e = y[i] - my - slope * (i - mx);
      sse += e * e;
    }
    *stderr_out = std::sqrt(sse / (n - 2) / sxx);
  }
  return slope;
}

void criterion_convergence(const SweepData& data) {
  const auto& runs = data.runs.at({Case::ris_sleep, data.peaks.back()});
  std::vector<std::vector<double>> smoothed;
  for (const auto& run : runs) {
    std::vector<double> reward;
    for (const auto& e : run.training) reward.push_back(e[Metric::r_ex]);
    smoothed.push_back(moving_average(reward, kRewardSmoothing));
  }
  const std::size_t episodes = smoothed.front().size();
  const std::size_t begin = episodes - episodes / 3;
  std::vector<double> mean_curve(episodes, 0.0);
  for (const auto& s : smoothed) {
    for (std::size_t e = 0; e < episodes; ++e) mean_curve[e] += s[e] / smoothed.size();
  }
  double se = 0.0;
  const double slope = ols_slope(mean_curve, begin, &se);
  int non_negative_runs = 0;
  for (const auto& s : smoothed) non_negative_runs += ols_slope(s, begin, nullptr) >= 0.0 ? 1 : 0;

  std::vector<double> finals;
  for (const auto& s : smoothed) finals.push_back(s.back());
  const double mean = std::accumulate(finals.begin(), finals.end(), 0.0) / finals.size();
  double ss = 0.0;
  for (double v : finals) ss += (v - mean) * (v - mean);
  const double cv = std::sqrt(ss / (finals.size() - 1)) / std::abs(mean);

  report(7, slope >= 0.0 && cv < kCvMax,
         fmt("ris_sleep at %.0f Mbps, %zu-episode smoothed extrinsic reward over episodes %zu-%zu: slope of the "
             "run-mean curve %.4g per episode (se %.2g, %d of %zu runs non-negative); CV of final value across runs "
             "%.2f%% (limit %.0f%%)",
             data.peaks.back(), kRewardSmoothing, begin, episodes - 1, slope, se, non_negative_runs, smoothed.size(),
             100.0 * cv, 100.0 * kCvMax));
}

// ---------------------------------------------------------------------------
// 6. SINR monotonicity.

void criterion_sinr(const Scenario& scenario) {
  const std::vector<int> elements{2, 4, 6, 8, 10};
  const std::vector<int> bits{1, 2, 3};
  const auto table = sinr_vs_elements(scenario, elements, bits, kSinrRealizations, scenario.seed);
  auto index = [&](std::size_t e, std::size_t b) { return e * bits.size() + b; };

  // Paired one-sided test per adjacent pair: the 95% lower confidence bound of
  // the mean difference must not be below zero.
  int pairs = 0, passed = 0;
  double worst_bound = 1e300;
  std::string worst_pair;
  auto compare = [&](std::size_t lo, std::size_t hi, const std::string& label) {
    std::vector<double> diff(kSinrRealizations);
    for (int i = 0; i < kSinrRealizations; ++i) diff[i] = table.samples[hi][i] - table.samples[lo][i];
    const auto est = mean_ci95(diff);
    // Two-sided 97.5% quantile half-width scaled to a one-sided 95% bound.
    const double lower = est.mean - est.half_width * (1.6448536269514722 / 1.959963984540054);
    ++pairs;
    if (lower >= 0.0) ++passed;
    if (lower < worst_bound) {
      worst_bound = lower;
      worst_pair = label;
    }
  };
  for (std::size_t b = 0; b < bits.size(); ++b) {
    for (std::size_t e = 0; e + 1 < elements.size(); ++e) {
      compare(index(e, b), index(e + 1, b), fmt("N %d->%d at b=%d", elements[e], elements[e + 1], bits[b]));
    }
  }
  for (std::size_t e = 0; e < elements.size(); ++e) {
    for (std::size_t b = 0; b + 1 < bits.size(); ++b) {
      compare(index(e, b), index(e, b + 1), fmt("b %d->%d at N=%d", bits[b], bits[b + 1], elements[e]));
    }
  }
  std::string series;
  for (std::size_t e = 0; e < elements.size(); ++e) series += fmt(" N=%d:%.3f", elements[e], table.points[index(e, 2)].mean_sinr_db);
  report(6, passed == pairs,
         fmt("%d of %d adjacent pairs non-decreasing at 95%% (paired, %d realizations); tightest %s with lower bound "
             "%.4g dB; b=3 mean SINR dB:%s",
             passed, pairs, kSinrRealizations, worst_pair.c_str(), worst_bound, series.c_str()));
}

// ---------------------------------------------------------------------------
// 8. Toy policy oracle.

// A macro cell with a single free RB next to one small cell: the macro
// alone cannot carry the load, so the optimum keeps the SBS on and the
// enumeration separates the power levels clearly. Learning starts from
// all-zero tables, whose greedy choice is "SBS off".
Scenario toy_scenario(const Scenario& base) {
  Scenario s = base;
  s.mbs.coverage_radius = 150.0;
  s.mbs.num_rbs = 1;
  s.sbs_list.resize(1);
  s.sbs_list[0].position = {70.0, 0.0};
  s.sbs_list[0].coverage_radius = 80.0;
  s.ris_list.resize(1);
  s.ris_list[0].position = {-40.0, 40.0};
  s.num_ues = 5;
  s.traffic.hourly_multiplier.fill(1.0);
  s.traffic.peak_demand = 100e6;
  s.seed = kToyWorldSeed;
  s.learning.episodes = kToyEpisodes;
  return s;
}

// Mean penalized objective of holding one decision all day.
double toy_objective(const Scenario& s, const WorldInstance& world, const Decision& decision) {
  Environment env(s, world, case_flags(Case::ris_sleep));
  double sum = 0.0;
  for (int ep = 0; ep < kToyEnumerationEpisodes; ++ep) {
    for (int hour = 0; hour < 24; ++hour) {
      const auto e = static_cast<std::uint64_t>(ep), h = static_cast<std::uint64_t>(hour);
      Rng direct(derive_seed(s.seed, {0x746f79ULL, e, h, 1}));
      Rng ris(derive_seed(s.seed, {0x746f79ULL, e, h, 2}));
      sum += env.step(hour, decision, direct, ris).energy.penalized_objective;
    }
  }
  return sum / (kToyEnumerationEpisodes * 24.0);
}

void criterion_toy(const Scenario& base) {
  const Scenario s = toy_scenario(base);
  const WorldInstance world = instantiate(s);
  const std::size_t levels = s.learning.power_levels.size();

  // Every joint choice: SBS off, or on at each power level.
  std::vector<Decision> choices{{0, {0}}};
  for (std::size_t l = 0; l < levels; ++l) choices.push_back({1, {l}});
  std::vector<double> value;
  std::string table;
  for (std::size_t c = 0; c < choices.size(); ++c) {
    value.push_back(toy_objective(s, world, choices[c]));
    table += c == 0 ? fmt(" off=%.0f", value.back()) : fmt(" on@%.2f=%.0f", s.learning.power_levels[c - 1], value.back());
  }
  const auto best = static_cast<std::size_t>(std::max_element(value.begin(), value.end()) - value.begin());
  std::vector<double> sorted = value;
  std::sort(sorted.rbegin(), sorted.rend());
  const double margin = (sorted[0] - sorted[1]) / std::abs(sorted[0]);

  int matched = 0;
  std::string picks;
  TrainOptions options;
  options.world = world;
  for (int i = 0; i < kToySeeds; ++i) {
    Scenario run = s;
    run.seed = 1 + static_cast<std::uint64_t>(i);
    const auto trained = train(run, AgentKind::hrl, case_flags(Case::ris_sleep), options);
    const Environment env(run, world, case_flags(Case::ris_sleep));
    bool all_hours = true;
    std::string pick;
    for (int hour = 0; hour < 24; ++hour) {
      const Decision d = trained.policy.decide(env, hour);
      const bool same =
          d.goal == choices[best].goal && (d.goal == 0 || d.power_level[0] == choices[best].power_level[0]);
      all_hours = all_hours && same;
      if (hour == 0) pick = d.goal == 0 ? "off" : fmt("on@%.2f", s.learning.power_levels[d.power_level[0]]);
    }
    matched += all_hours ? 1 : 0;
    picks += " " + pick + (all_hours ? "" : "(MISS)");
  }
  report(8, matched >= kToyRequired,
         fmt("1 SBS, 5 UEs, constant traffic; enumerated objective:%s; optimum %s leads the runner-up by %.1f%%; "
             "greedy HRL after %d episodes picks it at every hour in %d of %d training seeds (need %d):%s",
             table.c_str(), best == 0 ? "off" : fmt("on@%.2f", s.learning.power_levels[best - 1]).c_str(),
             100.0 * margin, kToyEpisodes, matched, kToySeeds, kToyRequired, picks.c_str()));
}

// ---------------------------------------------------------------------------
// 9. Determinism of the CLI output.

std::map<std::string, std::string> read_csvs(const fs::path& dir) {
  std::map<std::string, std::string> out;
  if (!fs::exists(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".csv") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    out[entry.path().filename().string()] = text.str();
  }
  return out;
}

void criterion_determinism(const std::string& cli, const std::string& config, const fs::path& work) {
  fs::remove_all(work);
  fs::create_directories(work);
  struct Command {
    std::string label;
    std::string args;
  };
  const std::vector<Command> commands{
      {"run", "run \"" + config + "\" --case ris_sleep --episodes 40 --runs 3"},
      {"sweep", "sweep \"" + config + "\" --episodes 15 --runs 2 --peaks 4,8"},
  };
  bool ok = true;
  std::string detail;
  for (const auto& cmd : commands) {
    std::vector<std::map<std::string, std::string>> outputs;
    for (const char* workers : {"1", "1", "2"}) {
      const fs::path dir = work / (cmd.label + "_" + std::to_string(outputs.size()));
      const std::string line = std::string("RIS_SIM_WORKERS=") + workers + " \"" + cli + "\" " + cmd.args + " -o \"" +
                               dir.string() + "\" > \"" + (work / "log.txt").string() + "\" 2>&1";
      const int status = std::system(line.c_str());
      if (status != 0) {
        ok = false;
        detail += " " + cmd.label + " exited with " + std::to_string(status) + ";";
      }
      outputs.push_back(read_csvs(dir));
    }
    const bool same = !outputs[0].empty() && outputs[0] == outputs[1] && outputs[0] == outputs[2];
    ok = ok && same;
    detail += fmt(" %s: %zu CSV files %s;", cmd.label.c_str(), outputs[0].size(),
                  same ? "byte-identical across 3 invocations" : "DIFFER");
  }
  report(9, ok, "repeated CLI commands (1, 1 and 2 workers) with the same config and seed:" + detail);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::string config_path;
  std::string cli_path;
  std::string workdir = "acceptance_work";
  app.add_option("--config", config_path, "Default config")->required();
  app.add_option("--cli", cli_path, "ris_sim executable")->required();
  app.add_option("--workdir", workdir, "Scratch directory");
  std::vector<int> only;
  app.add_option("--only", only, "Run just these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig config = load_config(config_path);
    std::printf("info: SIMD kernels %s\n", kernels::isa_name(kernels::active_isa()));
    auto wanted = [&](int c) { return only.empty() || std::find(only.begin(), only.end(), c) != only.end(); };
    if (wanted(1)) criterion_formulas();
    if (wanted(2)) criterion_coherent();
    if (wanted(3)) criterion_quantization(config.scenario);
    const bool need_sweep = wanted(4) || wanted(5) || wanted(7);
    const SweepData sweep = need_sweep ? run_sweep(config) : SweepData{};
    if (wanted(4)) criterion_ordering(sweep);
    if (wanted(5)) criterion_sleep_pattern(sweep);
    if (wanted(6)) criterion_sinr(config.scenario);
    if (wanted(7)) criterion_convergence(sweep);
    if (wanted(8)) criterion_toy(config.scenario);
    if (wanted(9)) criterion_determinism(cli_path, config_path, workdir);
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%s: %d criterion check(s) failed\n", failures == 0 ? "ALL PASS" : "NOT ALL PASS", failures);
  return failures == 0 ? 0 : 1;
}
