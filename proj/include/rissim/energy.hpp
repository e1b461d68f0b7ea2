#pragma once

#include <span>

#include "rissim/radio.hpp"
#include "rissim/scenario.hpp"

namespace rissim {

enum class BsMode { active, sleeping };

struct PowerDraw {
  double input_power = 0.0;  // W
  BsMode mode = BsMode::active;
};

/// Input power of one BS: p_fixed + slope * p_out when active, p_sleep when sleeping.
double bs_power(const BaseStationSpec& spec, BsMode mode, double p_out);

struct EnergySnapshot {
  double total_power = 0.0;       // W
  double total_throughput = 0.0;  // bit/s
  double ee = 0.0;                // bit/J
  double penalized_objective = 0.0;
};

/// Cell-wide energy efficiency and the overload-penalized objective ee - penalty * n_od.
EnergySnapshot snapshot(std::span<const PowerDraw> power, std::span<const LinkResult> links, double overload_penalty,
                        int overloaded);

}  // namespace rissim
