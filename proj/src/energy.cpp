#include "rissim/energy.hpp"

#include <string>

namespace rissim {

double bs_power(const BaseStationSpec& spec, BsMode mode, double p_out) {
  if (mode == BsMode::sleeping) return spec.p_sleep;
  if (p_out < 0.0 || p_out > spec.p_max_tx) {
    throw InvalidArgument("bs_power: p_out " + std::to_string(p_out) + " W outside [0, p_max_tx]");
  }
  return spec.p_fixed + spec.power_slope * p_out;
}

EnergySnapshot snapshot(std::span<const PowerDraw> power, std::span<const LinkResult> links, double overload_penalty,
                        int overloaded) {
  EnergySnapshot out;
  for (const auto& draw : power) out.total_power += draw.input_power;
  for (const auto& link : links) out.total_throughput += link.throughput;
  out.ee = out.total_power > 0.0 ? out.total_throughput / out.total_power : 0.0;
  out.penalized_objective = out.ee - overload_penalty * overloaded;
  return out;
}

}  // namespace rissim
