#include "rissim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rissim/kernels.hpp"

namespace rissim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Closest coupling distance used for geometry-derived links.
constexpr double kMinLinkDistance = 1.0;

double wrap_phase(double theta) {
  double wrapped = std::fmod(theta, kTwoPi);
  if (wrapped < 0.0) wrapped += kTwoPi;
  // fmod of a tiny negative value can round up to exactly 2*pi
  if (wrapped >= kTwoPi) wrapped = 0.0;
  return wrapped;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw InvalidArgument(std::string(what) + ": coefficient lists must share one length");
}

}  // namespace

double path_loss_amplitude(double distance_m, double exponent) {
  if (!(distance_m > 0.0)) throw InvalidArgument("path loss needs a positive distance");
  return std::pow(distance_m, -exponent / 2.0);
}

Complex direct_channel(const BaseStationSpec& bs, const Position& ue, double exponent_nlos, Rng& rng) {
  const double g = path_loss_amplitude(distance(bs.position, ue), exponent_nlos);
  return g * rng.complex_normal();
}

std::vector<Position> element_positions(const RisSpec& ris) {
  std::vector<Position> out(static_cast<std::size_t>(ris.num_elements));
  const double center = (ris.num_elements - 1) / 2.0;
  for (int n = 0; n < ris.num_elements; ++n) {
    out[static_cast<std::size_t>(n)] = {ris.position.x + (n - center) * ris.element_spacing, ris.position.y};
  }
  return out;
}

std::vector<Complex> bs_ris_channel(const Position& bs, const RisSpec& ris, double wavelength, double exponent_los) {
  const double g = path_loss_amplitude(distance(bs, ris.position), exponent_los);
  const auto elements = element_positions(ris);
  std::vector<Complex> out;
  out.reserve(elements.size());
  for (const auto& element : elements) {
    const double d = distance(bs, element);
    if (!(d > 0.0)) throw InvalidArgument("BS coincides with a RIS element");
    // Reduce the phase before the trig call to keep full precision at large d/lambda.
    const double turns = d / wavelength;
    const double phase = -kTwoPi * (turns - std::floor(turns));
    out.push_back(g * Complex(std::cos(phase), std::sin(phase)));
  }
  return out;
}

std::vector<Complex> ris_ue_channel(const RisSpec& ris, const Position& ue, double exponent_nlos, Rng& rng) {
  const double g = path_loss_amplitude(distance(ris.position, ue), exponent_nlos);
  std::vector<Complex> out(static_cast<std::size_t>(ris.num_elements));
  for (auto& h : out) h = g * rng.complex_normal();
  return out;
}

PhaseShifts optimal_phase_shifts(Complex direct, std::span<const Complex> bs_to_ris,
                                 std::span<const Complex> ris_to_ue) {
  require_same_length(bs_to_ris.size(), ris_to_ue.size(), "optimal_phase_shifts");
  PhaseShifts out;
  out.theta.resize(bs_to_ris.size());
  // A blocked direct link has no phase; any common reference keeps the
  // reflected terms aligned, so use 0.
  const double direct_arg = direct == Complex(0.0, 0.0) ? 0.0 : std::arg(direct);
  for (std::size_t n = 0; n < bs_to_ris.size(); ++n) {
    const Complex product = bs_to_ris[n] * ris_to_ue[n];
    if (product == Complex(0.0, 0.0)) {
      out.theta[n] = 0.0;
      out.degenerate = true;
      continue;
    }
    out.theta[n] = wrap_phase(direct_arg - std::arg(product));
  }
  return out;
}

double quantize_phase(double theta, int bits) {
  if (bits < 1) throw InvalidArgument("phase resolution needs at least one bit");
  const double levels = std::ldexp(1.0, bits);
  const double step = kTwoPi / levels;
  double index = std::nearbyint(wrap_phase(theta) / step);
  if (index >= levels) index -= levels;
  return index * step;
}

std::vector<double> quantize_phases(std::span<const double> theta, int bits) {
  std::vector<double> out(theta.size());
  std::transform(theta.begin(), theta.end(), out.begin(), [bits](double t) { return quantize_phase(t, bits); });
  return out;
}

double circular_distance(double a, double b) noexcept {
  const double d = std::fabs(std::remainder(a - b, kTwoPi));
  return d;
}

double composite_gain(Complex direct, std::span<const Complex> bs_to_ris, std::span<const Complex> ris_to_ue,
                      std::span<const double> theta, std::span<const double> beta) {
  require_same_length(bs_to_ris.size(), ris_to_ue.size(), "composite_gain");
  require_same_length(bs_to_ris.size(), theta.size(), "composite_gain");
  require_same_length(bs_to_ris.size(), beta.size(), "composite_gain");
  std::vector<Complex> phasor(theta.size());
  for (std::size_t n = 0; n < theta.size(); ++n) phasor[n] = std::polar(1.0, theta[n]);
  return std::norm(direct + kernels::reflected_sum(ris_to_ue, bs_to_ris, phasor, beta));
}

double coherent_gain(Complex direct, std::span<const Complex> bs_to_ris, std::span<const Complex> ris_to_ue,
                     std::span<const double> beta) {
  require_same_length(bs_to_ris.size(), ris_to_ue.size(), "coherent_gain");
  require_same_length(bs_to_ris.size(), beta.size(), "coherent_gain");
  const double amplitude = std::abs(direct) + kernels::coherent_magnitude_sum(bs_to_ris, ris_to_ue, beta);
  return amplitude * amplitude;
}

StaticChannels::StaticChannels(const Scenario& scenario, const WorldInstance& world)
    : scenario_(&scenario),
      num_bs_(scenario.num_bs()),
      num_ues_(world.num_ues()),
      num_ris_(scenario.ris_list.size()),
      system_loss_(1.0 / db_to_linear(scenario.radio.system_loss_db)) {
  const auto& radio = scenario.radio;
  const double direct_loss = std::sqrt(1.0 / db_to_linear(radio.direct_loss_db));

  direct_amp_.resize(num_bs_ * num_ues_);
  for (std::size_t b = 0; b < num_bs_; ++b) {
    for (std::size_t k = 0; k < num_ues_; ++k) {
      const double d = std::max(distance(scenario.bs(b).position, world.ue_positions[k]), kMinLinkDistance);
      direct_amp_[b * num_ues_ + k] = direct_loss * path_loss_amplitude(d, radio.pathloss_exp_nlos);
    }
  }

  bs_ris_.resize(num_bs_ * num_ris_);
  std::vector<double> bs_ris_amp(num_bs_ * num_ris_);
  // Only links that may reflect are built; a panel sitting on its BS cannot.
  for (std::size_t b = 0; b < num_bs_; ++b) {
    if (scenario.ris_assignment == RisAssignment::mbs_only && b != 0) continue;
    for (std::size_t r = 0; r < num_ris_; ++r) {
      if (distance(scenario.bs(b).position, scenario.ris_list[r].position) < kMinLinkDistance) continue;
      bs_ris_[b * num_ris_ + r] =
          bs_ris_channel(scenario.bs(b).position, scenario.ris_list[r], radio.carrier_wavelength,
                         radio.pathloss_exp_los);
      bs_ris_amp[b * num_ris_ + r] =
          path_loss_amplitude(distance(scenario.bs(b).position, scenario.ris_list[r].position),
                              radio.pathloss_exp_los);
    }
  }

  ris_ue_amp_.resize(num_ris_ * num_ues_);
  for (std::size_t r = 0; r < num_ris_; ++r) {
    for (std::size_t k = 0; k < num_ues_; ++k) {
      const double d = std::max(distance(scenario.ris_list[r].position, world.ue_positions[k]), kMinLinkDistance);
      ris_ue_amp_[r * num_ues_ + k] = path_loss_amplitude(d, radio.pathloss_exp_nlos);
    }
  }

  // Each eligible link uses the single panel with the largest expected reflected power.
  ris_for_.assign(num_bs_ * num_ues_, -1);
  for (std::size_t b = 0; b < num_bs_; ++b) {
    if (scenario.ris_assignment == RisAssignment::mbs_only && b != 0) continue;
    for (std::size_t k = 0; k < num_ues_; ++k) {
      double best = 0.0;
      for (std::size_t r = 0; r < num_ris_; ++r) {
        double beta_sq = 0.0;
        for (double beta : scenario.ris_list[r].amplitude) beta_sq += beta * beta;
        const double g = bs_ris_amp[b * num_ris_ + r] * ris_ue_amp_[r * num_ues_ + k];
        const double power = g * g * beta_sq;
        if (power > best) {
          best = power;
          ris_for_[b * num_ues_ + k] = static_cast<int>(r);
        }
      }
    }
  }
}

double StaticChannels::expected_gain(std::size_t bs, std::size_t ue, bool ris_enabled) const {
  const double a = direct_amplitude(bs, ue);
  const int r = ris_for(bs, ue);
  if (!ris_enabled || r < 0) return system_loss_ * a * a;

  // |direct| and each |h'_n| are Rayleigh: E = sqrt(pi)/2 * scale, E[x^2] = scale^2.
  constexpr double kRayleighMean = 0.88622692545275801365;  // sqrt(pi)/2
  const auto& ris = scenario_->ris_list[static_cast<std::size_t>(r)];
  const double g = std::abs(bs_ris_[bs * num_ris_ + static_cast<std::size_t>(r)].front()) *
                   ris_ue_amplitude(static_cast<std::size_t>(r), ue);
  double beta_sum = 0.0, beta_sq = 0.0;
  for (double beta : ris.amplitude) {
    beta_sum += beta;
    beta_sq += beta * beta;
  }
  const double reflected_mean = g * kRayleighMean * beta_sum;
  const double reflected_var = g * g * (1.0 - kRayleighMean * kRayleighMean) * beta_sq;
  const double mean_square =
      a * a + 2.0 * a * kRayleighMean * reflected_mean + reflected_var + reflected_mean * reflected_mean;
  return system_loss_ * mean_square;
}

GainMatrix draw_gains(const Scenario& scenario, const StaticChannels& statics, bool ris_enabled, Rng& direct_rng,
                      Rng& ris_rng) {
  const std::size_t num_bs = statics.num_bs();
  const std::size_t num_ues = statics.num_ues();
  const std::size_t num_ris = scenario.ris_list.size();

  GainMatrix gains{num_bs, num_ues, std::vector<double>(num_bs * num_ues)};
  std::vector<Complex> direct(num_bs * num_ues);
  for (std::size_t i = 0; i < direct.size(); ++i) {
    direct[i] = statics.direct_amplitude(i / num_ues, i % num_ues) * direct_rng.complex_normal();
  }

  // Fading per (panel, UE), drawn on first use in UE-major order.
  std::vector<std::vector<Complex>> ris_fading(ris_enabled ? num_ris : 0);
  std::vector<Complex> cascaded;
  std::vector<Complex> phasor;
  std::vector<std::vector<Complex>> grids(ris_enabled ? num_ris : 0);
  for (std::size_t r = 0; r < grids.size(); ++r) {
    const int bits = scenario.ris_list[r].psr_bits;
    if (bits < 1) throw InvalidArgument("phase resolution needs at least one bit");
    const auto levels = std::size_t{1} << bits;
    for (std::size_t m = 0; m < levels; ++m) grids[r].push_back(std::polar(1.0, kTwoPi * static_cast<double>(m) / static_cast<double>(levels)));
  }
  for (std::size_t k = 0; k < num_ues; ++k) {
    if (ris_enabled) {
      for (auto& f : ris_fading) f.clear();
    }
    for (std::size_t b = 0; b < num_bs; ++b) {
      const Complex d = direct[b * num_ues + k];
      const int r = statics.ris_for(b, k);
      if (!ris_enabled || r < 0) {
        gains(b, k) = statics.system_loss() * std::norm(d);
        continue;
      }
      const auto& ris = scenario.ris_list[static_cast<std::size_t>(r)];
      auto& fading = ris_fading[static_cast<std::size_t>(r)];
      if (fading.empty()) {
        const double g = statics.ris_ue_amplitude(static_cast<std::size_t>(r), k);
        fading.resize(static_cast<std::size_t>(ris.num_elements));
        for (auto& h : fading) h = g * ris_rng.complex_normal();
      }
      const auto& to_ris = statics.bs_ris(b, static_cast<std::size_t>(r));
      cascaded.resize(fading.size());
      phasor.resize(fading.size());
      kernels::cascade(to_ris, fading, cascaded);
      // arg(conj(c) d) is the optimal shift; snap it to the nearest grid phasor.
      const auto& grid = grids[static_cast<std::size_t>(r)];
      const double per_step = static_cast<double>(grid.size()) / kTwoPi;
      const auto levels = static_cast<long>(grid.size());
      const Complex reference = d == Complex(0.0, 0.0) ? Complex(1.0, 0.0) : d;
      for (std::size_t n = 0; n < cascaded.size(); ++n) {
        const Complex z = std::conj(cascaded[n]) * reference;
        long index = std::lround(std::atan2(z.imag(), z.real()) * per_step) % levels;
        if (index < 0) index += levels;
        phasor[n] = grid[static_cast<std::size_t>(index)];
      }
      const Complex total = d + kernels::reflected_sum(to_ris, fading, phasor, ris.amplitude);
      gains(b, k) = statics.system_loss() * std::norm(total);
    }
  }
  return gains;
}

}  // namespace rissim
