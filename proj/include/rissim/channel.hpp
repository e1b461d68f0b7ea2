#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "rissim/random.hpp"
#include "rissim/scenario.hpp"

namespace rissim {

using Complex = std::complex<double>;

/// Amplitude-domain path loss d^(-alpha/2). Throws InvalidArgument for d <= 0.
double path_loss_amplitude(double distance_m, double exponent);

/// NLOS BS->UE coefficient g * h with h ~ CN(0,1).
Complex direct_channel(const BaseStationSpec& bs, const Position& ue, double exponent_nlos, Rng& rng);

/// Element centers of the panel's linear array.
std::vector<Position> element_positions(const RisSpec& ris);

/// LOS BS->RIS coefficients g_BR * exp(-2j*pi*d_n/lambda). Phases use the
/// per-element distance d_n, path loss uses the panel-center distance.
std::vector<Complex> bs_ris_channel(const Position& bs, const RisSpec& ris, double wavelength, double exponent_los);

/// NLOS RIS->UE coefficients g_Rk * h'_n with i.i.d. h'_n ~ CN(0,1).
std::vector<Complex> ris_ue_channel(const RisSpec& ris, const Position& ue, double exponent_nlos, Rng& rng);

struct PhaseShifts {
  std::vector<double> theta;  // radians in [0, 2*pi)
  bool degenerate = false;    // some coefficient had zero magnitude; its theta was set to 0
};

/// Per-element shifts aligning every reflected term with the direct term.
PhaseShifts optimal_phase_shifts(Complex direct, std::span<const Complex> bs_to_ris,
                                 std::span<const Complex> ris_to_ue);

/// Nearest point of the 2^bits uniform grid on the circle, in [0, 2*pi).
double quantize_phase(double theta, int bits);
std::vector<double> quantize_phases(std::span<const double> theta, int bits);

/// Shortest angular distance between two phases.
double circular_distance(double a, double b) noexcept;

/// |direct + sum_n beta_n e^{j theta_n} ris_to_ue[n] bs_to_ris[n]|^2.
double composite_gain(Complex direct, std::span<const Complex> bs_to_ris, std::span<const Complex> ris_to_ue,
                      std::span<const double> theta, std::span<const double> beta);

/// Direct-only power gain |direct|^2 (links without a RIS, or beta = 0).
inline double composite_gain(Complex direct) { return std::norm(direct); }

/// (|direct| + sum_n beta_n |bs_to_ris[n]| |ris_to_ue[n]|)^2, the gain under optimal continuous phases.
double coherent_gain(Complex direct, std::span<const Complex> bs_to_ris, std::span<const Complex> ris_to_ue,
                     std::span<const double> beta);

struct ChannelRealization {
  Complex direct;
  std::vector<Complex> bs_to_ris;
  std::vector<Complex> ris_to_ue;
  std::vector<double> phase_shifts;
  double composite_gain = 0.0;
};

/// Geometry-derived quantities that stay fixed for a world instance: direct
/// path-loss amplitudes, the RIS panel chosen for each link, and the LOS
/// BS->RIS vectors. Index convention is BS-major: [bs * num_ues + ue].
class StaticChannels {
 public:
  StaticChannels(const Scenario& scenario, const WorldInstance& world);

  std::size_t num_bs() const noexcept { return num_bs_; }
  std::size_t num_ues() const noexcept { return num_ues_; }

  /// Direct-link amplitude including the direct penetration loss.
  double direct_amplitude(std::size_t bs, std::size_t ue) const { return direct_amp_[bs * num_ues_ + ue]; }
  /// Panel assigned to this link, or -1.
  int ris_for(std::size_t bs, std::size_t ue) const { return ris_for_[bs * num_ues_ + ue]; }
  const std::vector<Complex>& bs_ris(std::size_t bs, std::size_t ris) const { return bs_ris_[bs * num_ris_ + ris]; }
  double ris_ue_amplitude(std::size_t ris, std::size_t ue) const { return ris_ue_amp_[ris * num_ues_ + ue]; }

  /// Mean power gain of the link under optimal continuous phases over the
  /// small-scale fading (closed form for Rayleigh magnitudes), including the
  /// system loss. Used for association.
  double expected_gain(std::size_t bs, std::size_t ue, bool ris_enabled) const;

  double system_loss() const noexcept { return system_loss_; }

 private:
  const Scenario* scenario_;
  std::size_t num_bs_;
  std::size_t num_ues_;
  std::size_t num_ris_;
  double system_loss_;
  std::vector<double> direct_amp_;
  std::vector<int> ris_for_;
  std::vector<std::vector<Complex>> bs_ris_;
  std::vector<double> ris_ue_amp_;
};

/// Power gains [bs * num_ues + ue] for one coherence block (one hour).
struct GainMatrix {
  std::size_t num_bs = 0;
  std::size_t num_ues = 0;
  std::vector<double> values;

  double operator()(std::size_t bs, std::size_t ue) const { return values[bs * num_ues + ue]; }
  double& operator()(std::size_t bs, std::size_t ue) { return values[bs * num_ues + ue]; }
};

/// Redraws every link's fading and evaluates its power gain. Links with an
/// assigned panel use quantized optimal phases when `ris_enabled`; otherwise
/// the gain is direct-only. Direct fading and RIS fading come from separate
/// streams so cases with and without RIS see the same direct draws.
GainMatrix draw_gains(const Scenario& scenario, const StaticChannels& statics, bool ris_enabled, Rng& direct_rng,
                      Rng& ris_rng);

}  // namespace rissim
