#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rissim/channel.hpp"
#include "rissim/scenario.hpp"

namespace rissim {

/// Smoothing factor of the per-UE average throughput tracked for PF scheduling.
inline constexpr double kPfSmoothing = 0.1;
/// Added to the PF denominator so cold-start UEs have a finite metric, bit/s.
inline constexpr double kPfGuard = 1.0;
/// Relative slack before a BS counts as overloaded.
inline constexpr double kOverloadSlack = 0.01;

/// Serving BS index per UE (0 = MBS).
struct Association {
  std::vector<int> serving;
};

/// Attaches each UE to the active BS with the largest long-term gain among
/// those whose coverage disk contains it. The MBS is always eligible; ties go
/// to the lower BS index. `long_term_gain` is BS-major [bs * num_ues + ue].
Association associate(const Scenario& scenario, const WorldInstance& world, std::span<const bool> active,
                      std::span<const double> long_term_gain);

/// RB grid traversal order. Macro and small cells fill from opposite ends so
/// lightly loaded grids overlap as little as possible.
enum class FillOrder { ascending, descending };

struct BsAllocation {
  double power_per_rb = 0.0;       // W
  double rb_bandwidth = 0.0;       // Hz
  std::vector<int> rb_owner;       // UE index per RB, -1 if unassigned
};

struct RbAllocation {
  std::vector<BsAllocation> per_bs;
};

/// Achievable rate of each attached UE on each RB: row i belongs to attached[i].
struct RbRates {
  std::size_t num_rbs = 0;
  std::vector<double> values;  // [i * num_rbs + rb]

  double operator()(std::size_t i, std::size_t rb) const { return values[i * num_rbs + rb]; }
};

/// Same rate on every RB.
RbRates uniform_rb_rates(std::span<const double> per_ue_rate, std::size_t num_rbs);

/// Shannon rate of one RB, b * log2(1 + p g / (b N0 + I)).
double rb_rate(double power_per_rb, double gain, double rb_bandwidth, double noise_psd, double interference);

/// Proportional-fair RB allocation for one active BS. Power is split evenly
/// over all RBs. RBs are handed out one at a time, in `order`, to the attached
/// UE with the largest rate / (average throughput + rate granted so far +
/// guard); UEs whose granted rate already covers their demand are skipped.
/// Stops once every demand is covered or the grid is exhausted.
/// `demand` and `avg_throughput` are indexed by global UE index.
BsAllocation allocate_rbs(const BaseStationSpec& bs, double p_out, std::span<const int> attached,
                          std::span<const double> demand, const RbRates& rates,
                          std::span<const double> avg_throughput, FillOrder order = FillOrder::ascending);

struct LinkResult {
  int bs = -1;
  int rbs = 0;
  double bandwidth = 0.0;     // Hz
  double signal = 0.0;        // W
  double interference = 0.0;  // W
  double sinr = 0.0;
  double rate = 0.0;        // bit/s
  double throughput = 0.0;  // bit/s, min(rate, demand)
  bool sinr_ok = false;
};

/// Per-UE SINR, rate and throughput. All BSs share one RB grid: UE k on BS j
/// sees interference from every other BS that transmits on one of k's RBs.
/// UEs without RBs report zero SINR, rate and throughput.
std::vector<LinkResult> link_report(const RbAllocation& allocation, const Association& association,
                                    const GainMatrix& gains, double noise_psd, std::span<const double> demand,
                                    double sinr_threshold);

/// BSs whose attached demand exceeds their attached achieved rate by more than the slack.
int overload_count(std::span<const LinkResult> links, std::span<const double> demand, std::size_t num_bs);

}  // namespace rissim
