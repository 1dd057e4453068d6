#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdslab/tensor.hpp"

namespace mdslab {

inline constexpr double kSpeedOfLight = 299792458.0;

// FMCW waveform and TDM-MIMO array parameters.
struct RadarConfig {
  double carrier_hz = 77e9;
  double bandwidth_hz = 768e6;
  double chirp_s = 64e-6;
  double adc_rate_hz = 4e6;
  double chirp_interval_s = 72e-6;
  int chirps = 128;
  int n_tx = 2;
  int n_rx = 4;
  int angle_fft = 128;
  int frames = 4;

  double slope() const { return bandwidth_hz / chirp_s; }
  int samples_per_chirp() const;
  double wavelength() const { return kSpeedOfLight / carrier_hz; }
  int virtual_elements() const { return n_tx * n_rx; }
  // Slot offset of transmitter tx (0-based): tx * T_r / N_tx.
  double slot_offset(int tx) const { return tx * chirp_interval_s / n_tx; }
  // Unambiguous radial speed of the per-TX slow-time sequence, lambda / (4 T_r).
  double slow_time_speed_limit() const { return wavelength() / (4.0 * chirp_interval_s); }

  void validate() const;
};

struct AxisSpec {
  double range_resolution = 0;
  double range_max = 0;
  double velocity_resolution = 0;
  double velocity_max = 0;
  double angle_resolution = 0;  // in sin(azimuth)
};

AxisSpec derive_axes(const RadarConfig& config);

// One point scatterer riding on a track. Radial velocity of the scatterer is
// v_r + micro_amp * sin(2 pi micro_freq t + micro_phase).
struct Scatterer {
  double range_offset = 0;
  double angle_offset = 0;
  double amplitude = 1;
  double micro_freq = 0;
  double micro_amp = 0;
  double micro_phase = 0;
};

struct TargetTrack {
  int class_id = 0;
  double range = 0;
  double velocity = 0;
  double sin_azimuth = 0;
  std::vector<Scatterer> scatterers;
};

struct Scene {
  std::vector<TargetTrack> tracks;
  double noise_sigma = 0;
  std::uint64_t seed = 0;
};

// Complex baseband samples, one [N_s, M_c, N_tx, N_rx] tensor per frame.
struct AdcCube {
  std::vector<CTensor> frames;
};

// Throws kOutOfRange naming the offending track index.
void validate_scene(const RadarConfig& config, const Scene& scene);

// Single frame of ADC data without noise; frame k starts at slow time k * M_c * T_r.
CTensor synth_frame_clean(const RadarConfig& config, const Scene& scene, int frame);

AdcCube synth_adc(const RadarConfig& config, const Scene& scene);

// Per-class parameter distributions for dataset generation.
struct Interval {
  double lo = 0;
  double hi = 0;
};

struct ScattererTemplate {
  int count = 1;
  Interval range_offset{0, 0};
  Interval angle_offset{0, 0};
  Interval amplitude{1, 1};
  Interval micro_freq{0, 0};
  Interval micro_amp{0, 0};
};

struct ClassTemplate {
  std::string name;
  Interval range{5, 40};
  Interval velocity{0, 0};
  Interval sin_azimuth{-0.5, 0.5};
  std::vector<ScattererTemplate> parts;
};

// car, pedestrian, cyclist.
std::vector<ClassTemplate> default_class_templates();

struct LabeledScene {
  Scene scene;
  int class_id = 0;
};

struct LabeledSample {
  Scene scene;
  AdcCube cube;
  int class_id = 0;
};

// Class-balanced (within one) labeled scenes, each holding one target.
std::vector<LabeledScene> sample_scenes(const RadarConfig& config,
                                        const std::vector<ClassTemplate>& templates,
                                        int n_samples, std::uint64_t seed, double noise_sigma);

std::vector<LabeledSample> sample_dataset(const RadarConfig& config,
                                          const std::vector<ClassTemplate>& templates,
                                          int n_samples, std::uint64_t seed, double noise_sigma);

// Mean Doppler frequency 2 v / lambda of a track's bulk motion.
inline double doppler_hz(const RadarConfig& config, double velocity) {
  return 2.0 * velocity / config.wavelength();
}

}  // namespace mdslab
