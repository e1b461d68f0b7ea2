#include "rissim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "rissim/channel.hpp"
#include "rissim/random.hpp"

namespace rissim {

std::string_view metric_name(Metric metric) noexcept {
  switch (metric) {
    case Metric::total_power: return "total_power_w";
    case Metric::mean_throughput: return "mean_throughput_bps";
    case Metric::ee: return "ee_bits_per_joule";
    case Metric::n_od: return "n_od";
    case Metric::r_ex: return "r_ex";
    case Metric::r_in: return "r_in";
    case Metric::mean_sinr_db: return "mean_sinr_db";
    case Metric::sbs_on_fraction: return "sbs_on_fraction";
    case Metric::peak_total_power: return "peak_total_power_w";
    case Metric::peak_mean_throughput: return "peak_mean_throughput_bps";
    case Metric::peak_ee: return "peak_ee_bits_per_joule";
    case Metric::count: break;
  }
  return "unknown";
}

int peak_hour(const TrafficPattern& traffic) {
  const auto& m = traffic.hourly_multiplier;
  return static_cast<int>(std::max_element(m.begin(), m.end()) - m.begin());
}

EpisodeSummary summarize(std::span<const HourRecord> hours, int peak_hour) {
  EpisodeSummary out;
  if (hours.empty()) return out;
  const double n = static_cast<double>(hours.size());
  double r_in_sum = 0.0, r_in_count = 0.0;
  double on_sum = 0.0, on_count = 0.0;
  for (const auto& h : hours) {
    out[Metric::total_power] += h.total_power / n;
    out[Metric::mean_throughput] += h.mean_throughput / n;
    out[Metric::ee] += h.ee / n;
    out[Metric::n_od] += h.n_od / n;
    out[Metric::r_ex] += h.r_ex / n;
    out[Metric::mean_sinr_db] += h.mean_sinr_db / n;
    for (std::size_t j = 0; j < h.sbs_on.size(); ++j) {
      on_sum += h.sbs_on[j];
      on_count += 1.0;
      if (h.sbs_on[j] != 0) {
        r_in_sum += h.r_in[j];
        r_in_count += 1.0;
      }
    }
    if (h.hour == peak_hour) {
      out[Metric::peak_total_power] = h.total_power;
      out[Metric::peak_mean_throughput] = h.mean_throughput;
      out[Metric::peak_ee] = h.ee;
    }
  }
  out[Metric::r_in] = r_in_count > 0.0 ? r_in_sum / r_in_count : 0.0;
  out[Metric::sbs_on_fraction] = on_count > 0.0 ? on_sum / on_count : 0.0;
  return out;
}

Estimate mean_ci95(std::span<const double> values) {
  if (values.size() < 2) throw InvalidArgument("a confidence interval needs at least two values");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const boost::math::students_t dist(n - 1.0);
  const double t = boost::math::quantile(dist, 0.975);
  return {mean, t * sd / std::sqrt(n)};
}

Aggregate aggregate(std::span<const std::vector<EpisodeSummary>> runs, std::size_t window) {
  if (runs.size() < 2) throw InvalidArgument("aggregate needs at least two runs");
  if (window == 0) throw InvalidArgument("aggregate window must be positive");
  for (const auto& run : runs) {
    if (window > run.size()) {
      throw InvalidArgument("aggregate window " + std::to_string(window) + " exceeds episode count " +
                            std::to_string(run.size()));
    }
  }
  Aggregate out;
  out.runs = runs.size();
  out.window = window;
  std::vector<double> per_run(runs.size());
  for (std::size_t m = 0; m < kMetricCount; ++m) {
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const auto& episodes = runs[r];
      double sum = 0.0;
      for (std::size_t e = episodes.size() - window; e < episodes.size(); ++e) sum += episodes[e].values[m];
      per_run[r] = sum / static_cast<double>(window);
    }
    // Sort so the result does not depend on run order down to the last bit.
    std::sort(per_run.begin(), per_run.end());
    out.metrics[m] = mean_ci95(per_run);
  }
  return out;
}

Aggregate aggregate_training(std::span<const RunMetrics> runs, std::size_t window) {
  std::vector<std::vector<EpisodeSummary>> series;
  for (const auto& run : runs) series.push_back(run.training);
  return aggregate(series, window);
}

Aggregate aggregate_evaluation(std::span<const RunMetrics> runs) {
  std::vector<std::vector<EpisodeSummary>> series;
  std::size_t window = 0;
  for (const auto& run : runs) {
    series.push_back(run.evaluation_summary);
    window = window == 0 ? run.evaluation_summary.size() : std::min(window, run.evaluation_summary.size());
  }
  return aggregate(series, window);
}

std::vector<double> sbs_on_probability(std::span<const RunMetrics> runs, int hour) {
  std::vector<double> on;
  double episodes = 0.0;
  for (const auto& run : runs) {
    for (const auto& episode : run.evaluation) {
      for (const auto& rec : episode) {
        if (rec.hour != hour) continue;
        if (on.empty()) on.assign(rec.sbs_on.size(), 0.0);
        for (std::size_t j = 0; j < rec.sbs_on.size(); ++j) on[j] += rec.sbs_on[j];
        episodes += 1.0;
      }
    }
  }
  for (auto& v : on) v /= episodes;
  return on;
}

std::vector<double> moving_average(std::span<const double> values, std::size_t window) {
  if (window == 0) throw InvalidArgument("moving_average window must be positive");
  std::vector<double> out(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    if (i >= window) sum -= values[i - window];
    out[i] = sum / static_cast<double>(std::min(i + 1, window));
  }
  return out;
}

SinrTable sinr_vs_elements(const Scenario& scenario, std::span<const int> element_counts,
                           std::span<const int> psr_list, int realizations, std::uint64_t seed) {
  if (realizations < 100) throw InvalidArgument("sinr_vs_elements needs at least 100 realizations");
  if (element_counts.empty() || psr_list.empty()) throw InvalidArgument("sinr_vs_elements: empty sweep list");
  for (int n : element_counts) {
    if (n < 0) throw InvalidArgument("element counts must be non-negative");
  }
  for (int b : psr_list) {
    if (b < 0) throw InvalidArgument("phase resolutions must be non-negative");
  }
  const int max_elements = *std::max_element(element_counts.begin(), element_counts.end());

  const WorldInstance world = instantiate(scenario, seed);
  const std::size_t num_ues = world.num_ues();
  const std::size_t num_ris = scenario.ris_list.size();
  const auto& radio = scenario.radio;
  const double system_loss = std::pow(10.0, -radio.system_loss_db / 10.0);
  const double direct_loss = std::pow(10.0, -radio.direct_loss_db / 20.0);
  // MBS alone at full power, no interference: SINR = P G / (B N0) for any RB count.
  const double snr_scale = scenario.mbs.p_max_tx / (scenario.mbs.bandwidth * radio.noise_psd);

  // Panels resized to each element count; amplitude taken from the first element.
  std::vector<std::vector<RisSpec>> panels(element_counts.size());
  std::vector<std::vector<std::vector<Complex>>> to_ris(element_counts.size());
  for (std::size_t c = 0; c < element_counts.size(); ++c) {
    for (const auto& base : scenario.ris_list) {
      RisSpec panel = base;
      panel.num_elements = element_counts[c];
      panel.amplitude.assign(static_cast<std::size_t>(element_counts[c]), base.amplitude.empty() ? 1.0 : base.amplitude.front());
      if (panel.num_elements > 0) {
        to_ris[c].push_back(bs_ris_channel(scenario.mbs.position, panel, radio.carrier_wavelength, radio.pathloss_exp_los));
      } else {
        to_ris[c].emplace_back();
      }
      panels[c].push_back(std::move(panel));
    }
  }

  // Panel serving each UE: largest expected reflected power (amplitudes are
  // uniform per panel, so element count does not change the choice).
  std::vector<int> panel_of(num_ues, -1);
  std::vector<double> ris_amp(num_ris * num_ues, 0.0);
  for (std::size_t k = 0; k < num_ues; ++k) {
    double best = 0.0;
    for (std::size_t r = 0; r < num_ris; ++r) {
      const auto& ris = scenario.ris_list[r];
      const double d_ue = std::max(distance(ris.position, world.ue_positions[k]), 1.0);
      ris_amp[r * num_ues + k] = path_loss_amplitude(d_ue, radio.pathloss_exp_nlos);
      const double g = path_loss_amplitude(distance(scenario.mbs.position, ris.position), radio.pathloss_exp_los) *
                       ris_amp[r * num_ues + k];
      const double beta = ris.amplitude.empty() ? 0.0 : ris.amplitude.front();
      if (g * g * beta * beta > best) {
        best = g * g * beta * beta;
        panel_of[k] = static_cast<int>(r);
      }
    }
  }

  const std::size_t num_points = element_counts.size() * psr_list.size();
  SinrTable table;
  table.samples.assign(num_points, std::vector<double>(static_cast<std::size_t>(realizations)));

  std::vector<Complex> direct(num_ues);
  std::vector<Complex> fading(static_cast<std::size_t>(max_elements));
  std::vector<double> theta;
  std::vector<double> sum_db(num_points);
  for (int rep = 0; rep < realizations; ++rep) {
    Rng direct_rng(derive_seed(seed, {0x73696e72ULL, static_cast<std::uint64_t>(rep), 1}));
    Rng ris_rng(derive_seed(seed, {0x73696e72ULL, static_cast<std::uint64_t>(rep), 2}));
    std::fill(sum_db.begin(), sum_db.end(), 0.0);
    for (std::size_t k = 0; k < num_ues; ++k) {
      const double d = std::max(distance(scenario.mbs.position, world.ue_positions[k]), 1.0);
      const Complex h = direct_loss * path_loss_amplitude(d, radio.pathloss_exp_nlos) * direct_rng.complex_normal();
      const int r = panel_of[k];
      const double g_ue = r >= 0 ? ris_amp[static_cast<std::size_t>(r) * num_ues + k] : 0.0;
      for (auto& f : fading) f = g_ue * ris_rng.complex_normal();

      for (std::size_t c = 0; c < element_counts.size(); ++c) {
        const auto n = static_cast<std::size_t>(element_counts[c]);
        for (std::size_t p = 0; p < psr_list.size(); ++p) {
          double gain = std::norm(h);
          if (n > 0 && r >= 0) {
            const auto& panel = panels[c][static_cast<std::size_t>(r)];
            const auto& bs_ris = to_ris[c][static_cast<std::size_t>(r)];
            const std::span<const Complex> ue_side(fading.data(), n);
            if (psr_list[p] == 0) {
              gain = coherent_gain(h, bs_ris, ue_side, panel.amplitude);
            } else {
              theta = optimal_phase_shifts(h, bs_ris, ue_side).theta;
              gain = composite_gain(h, bs_ris, ue_side, quantize_phases(theta, psr_list[p]), panel.amplitude);
            }
          }
          const double sinr = snr_scale * system_loss * gain;
          sum_db[c * psr_list.size() + p] += 10.0 * std::log10(sinr);
        }
      }
    }
    for (std::size_t i = 0; i < num_points; ++i) {
      table.samples[i][static_cast<std::size_t>(rep)] = sum_db[i] / static_cast<double>(num_ues);
    }
  }

  for (std::size_t c = 0; c < element_counts.size(); ++c) {
    for (std::size_t p = 0; p < psr_list.size(); ++p) {
      const auto est = mean_ci95(table.samples[c * psr_list.size() + p]);
      table.points.push_back({element_counts[c], psr_list[p], est.mean, est.half_width});
    }
  }
  return table;
}

}  // namespace rissim
