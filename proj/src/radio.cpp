#include "rissim/radio.hpp"

#include <cmath>

namespace rissim {

Association associate(const Scenario& scenario, const WorldInstance& world, std::span<const bool> active,
                      std::span<const double> long_term_gain) {
  const std::size_t num_bs = scenario.num_bs();
  const std::size_t num_ues = world.num_ues();
  if (active.size() != num_bs || long_term_gain.size() != num_bs * num_ues) {
    throw InvalidArgument("associate: inconsistent dimensions");
  }
  Association out;
  out.serving.assign(num_ues, 0);
  for (std::size_t k = 0; k < num_ues; ++k) {
    double best = long_term_gain[k];
    for (std::size_t b = 1; b < num_bs; ++b) {
      if (!active[b]) continue;
      const auto& bs = scenario.bs(b);
      if (distance(bs.position, world.ue_positions[k]) > bs.coverage_radius) continue;
      const double g = long_term_gain[b * num_ues + k];
      if (g > best) {
        best = g;
        out.serving[k] = static_cast<int>(b);
      }
    }
  }
  return out;
}

RbRates uniform_rb_rates(std::span<const double> per_ue_rate, std::size_t num_rbs) {
  RbRates rates{num_rbs, std::vector<double>(per_ue_rate.size() * num_rbs)};
  for (std::size_t i = 0; i < per_ue_rate.size(); ++i) {
    for (std::size_t r = 0; r < num_rbs; ++r) rates.values[i * num_rbs + r] = per_ue_rate[i];
  }
  return rates;
}

double rb_rate(double power_per_rb, double gain, double rb_bandwidth, double noise_psd, double interference) {
  const double sinr = power_per_rb * gain / (rb_bandwidth * noise_psd + interference);
  return rb_bandwidth * std::log2(1.0 + sinr);
}

BsAllocation allocate_rbs(const BaseStationSpec& bs, double p_out, std::span<const int> attached,
                          std::span<const double> demand, const RbRates& rates,
                          std::span<const double> avg_throughput, FillOrder order) {
  const auto num_rbs = static_cast<std::size_t>(bs.num_rbs);
  if (p_out < 0.0 || p_out > bs.p_max_tx) throw InvalidArgument("allocate_rbs: p_out outside [0, p_max_tx]");
  if (rates.num_rbs != num_rbs || rates.values.size() != attached.size() * num_rbs) {
    throw InvalidArgument("allocate_rbs: rate table does not match the attached set");
  }

  BsAllocation out;
  out.power_per_rb = p_out / static_cast<double>(num_rbs);
  out.rb_bandwidth = bs.rb_bandwidth();
  out.rb_owner.assign(num_rbs, -1);
  if (attached.empty()) return out;

  std::vector<double> granted(attached.size(), 0.0);
  for (std::size_t step = 0; step < num_rbs; ++step) {
    const std::size_t rb = order == FillOrder::ascending ? step : num_rbs - 1 - step;
    std::ptrdiff_t best = -1;
    double best_metric = 0.0;
    for (std::size_t i = 0; i < attached.size(); ++i) {
      const auto ue = static_cast<std::size_t>(attached[i]);
      if (granted[i] >= demand[ue]) continue;
      const double rate = rates(i, rb);
      if (!(rate > 0.0)) continue;
      const double metric = rate / (avg_throughput[ue] + granted[i] + kPfGuard);
      if (best < 0 || metric > best_metric) {
        best = static_cast<std::ptrdiff_t>(i);
        best_metric = metric;
      }
    }
    if (best < 0) {
      // Either every demand is covered or no UE can use this RB; a later RB may
      // still be usable only if rates differ per RB.
      bool anyone_waiting = false;
      for (std::size_t i = 0; i < attached.size(); ++i) {
        if (granted[i] < demand[static_cast<std::size_t>(attached[i])]) anyone_waiting = true;
      }
      if (!anyone_waiting) break;
      continue;
    }
    const auto i = static_cast<std::size_t>(best);
    out.rb_owner[rb] = attached[i];
    granted[i] += rates(i, rb);
  }
  return out;
}

std::vector<LinkResult> link_report(const RbAllocation& allocation, const Association& association,
                                    const GainMatrix& gains, double noise_psd, std::span<const double> demand,
                                    double sinr_threshold) {
  const std::size_t num_ues = association.serving.size();
  const std::size_t num_bs = allocation.per_bs.size();
  if (gains.num_bs != num_bs || gains.num_ues != num_ues || demand.size() != num_ues) {
    throw InvalidArgument("link_report: inconsistent dimensions");
  }

  std::vector<LinkResult> out(num_ues);
  for (std::size_t k = 0; k < num_ues; ++k) out[k].bs = association.serving[k];

  for (std::size_t j = 0; j < num_bs; ++j) {
    const auto& alloc = allocation.per_bs[j];
    for (std::size_t r = 0; r < alloc.rb_owner.size(); ++r) {
      const int owner = alloc.rb_owner[r];
      if (owner < 0) continue;
      const auto k = static_cast<std::size_t>(owner);
      if (out[k].bs != static_cast<int>(j)) throw InvalidArgument("link_report: RB owner is not attached to this BS");
      auto& link = out[k];
      link.rbs += 1;
      link.bandwidth += alloc.rb_bandwidth;
      link.signal += alloc.power_per_rb * gains(j, k);
      for (std::size_t other = 0; other < num_bs; ++other) {
        if (other == j) continue;
        const auto& o = allocation.per_bs[other];
        if (r < o.rb_owner.size() && o.rb_owner[r] >= 0) link.interference += o.power_per_rb * gains(other, k);
      }
    }
  }

  for (std::size_t k = 0; k < num_ues; ++k) {
    auto& link = out[k];
    if (link.rbs == 0) continue;
    link.sinr = link.signal / (link.bandwidth * noise_psd + link.interference);
    link.rate = link.bandwidth * std::log2(1.0 + link.sinr);
    link.throughput = std::min(link.rate, demand[k]);
    link.sinr_ok = link.sinr >= sinr_threshold;
  }
  return out;
}

int overload_count(std::span<const LinkResult> links, std::span<const double> demand, std::size_t num_bs) {
  if (links.size() != demand.size()) throw InvalidArgument("overload_count: inconsistent dimensions");
  std::vector<double> offered(num_bs, 0.0);
  std::vector<double> achieved(num_bs, 0.0);
  for (std::size_t k = 0; k < links.size(); ++k) {
    const int b = links[k].bs;
    if (b < 0 || static_cast<std::size_t>(b) >= num_bs) throw InvalidArgument("overload_count: bad BS index");
    offered[static_cast<std::size_t>(b)] += demand[k];
    achieved[static_cast<std::size_t>(b)] += links[k].rate;
  }
  int count = 0;
  for (std::size_t b = 0; b < num_bs; ++b) {
    if (offered[b] > (1.0 + kOverloadSlack) * achieved[b]) ++count;
  }
  return count;
}

}  // namespace rissim
