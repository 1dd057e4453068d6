#include "mdslab/scene_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "mdslab/rng.hpp"

namespace mdslab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool finite_positive(double x) { return std::isfinite(x) && x > 0; }

// Radial displacement of a scatterer at slow time t relative to t = 0.
double displacement(double velocity, const Scatterer& s, double t) {
  if (s.micro_amp == 0.0) return velocity * t;
  if (s.micro_freq == 0.0) return (velocity + s.micro_amp * std::sin(s.micro_phase)) * t;
  const double w = kTwoPi * s.micro_freq;
  return velocity * t + s.micro_amp / w * (std::cos(s.micro_phase) - std::cos(w * t + s.micro_phase));
}

double radial_velocity(double velocity, const Scatterer& s, double t) {
  return velocity + s.micro_amp * std::sin(kTwoPi * s.micro_freq * t + s.micro_phase);
}

}  // namespace

int RadarConfig::samples_per_chirp() const {
  return static_cast<int>(std::lround(chirp_s * adc_rate_hz));
}

void RadarConfig::validate() const {
  require(finite_positive(carrier_hz), ErrorCode::kInvalidArgument, "carrier frequency must be positive");
  require(finite_positive(bandwidth_hz), ErrorCode::kInvalidArgument, "bandwidth must be positive");
  require(finite_positive(chirp_s), ErrorCode::kInvalidArgument, "chirp duration must be positive");
  require(finite_positive(adc_rate_hz), ErrorCode::kInvalidArgument, "ADC rate must be positive");
  require(finite_positive(chirp_interval_s), ErrorCode::kInvalidArgument,
          "chirp repetition interval must be positive");
  require(chirp_interval_s >= chirp_s, ErrorCode::kInvalidArgument,
          "chirp repetition interval must be at least the chirp duration");
  require(chirps >= 1 && n_tx >= 1 && n_rx >= 1 && angle_fft >= 1 && frames >= 1,
          ErrorCode::kInvalidArgument, "all counts must be at least 1");
  require(samples_per_chirp() >= 1, ErrorCode::kInvalidArgument,
          "chirp duration times ADC rate must give at least one sample");
}

AxisSpec derive_axes(const RadarConfig& config) {
  const double slope = config.slope();
  require(finite_positive(slope), ErrorCode::kInvalidArgument, "chirp slope must be positive");
  require(config.chirps > 0, ErrorCode::kInvalidArgument, "chirps per frame must be positive");
  require(config.angle_fft > 0, ErrorCode::kInvalidArgument, "angle FFT size must be positive");
  const int n_s = config.samples_per_chirp();
  require(n_s > 0, ErrorCode::kInvalidArgument, "samples per chirp must be positive");
  const double lambda = config.wavelength();
  AxisSpec axes;
  axes.range_max = kSpeedOfLight * config.adc_rate_hz / (2.0 * slope);
  axes.range_resolution = axes.range_max / n_s;
  axes.velocity_resolution = lambda / (2.0 * config.chirp_s * config.chirps);
  axes.velocity_max = lambda / (4.0 * config.chirp_s);
  axes.angle_resolution = 2.0 / config.angle_fft;
  return axes;
}

void validate_scene(const RadarConfig& config, const Scene& scene) {
  config.validate();
  require(std::isfinite(scene.noise_sigma) && scene.noise_sigma >= 0, ErrorCode::kInvalidArgument,
          "noise_sigma must be finite and non-negative");
  const AxisSpec axes = derive_axes(config);
  const double v_limit = std::min(axes.velocity_max, config.slow_time_speed_limit());
  for (std::size_t i = 0; i < scene.tracks.size(); ++i) {
    const TargetTrack& track = scene.tracks[i];
    const std::string who = "track " + std::to_string(i);
    require(track.range > 0 && track.range < axes.range_max, ErrorCode::kOutOfRange,
            who + ": range outside (0, " + std::to_string(axes.range_max) + ") m");
    double max_micro = 0;
    for (const Scatterer& s : track.scatterers) {
      require(s.amplitude > 0 && std::isfinite(s.amplitude), ErrorCode::kOutOfRange,
              who + ": scatterer amplitude must be positive");
      const double r = track.range + s.range_offset;
      require(r > 0 && r < axes.range_max, ErrorCode::kOutOfRange,
              who + ": scatterer range outside the unambiguous interval");
      const double sin_az = track.sin_azimuth + s.angle_offset;
      require(sin_az >= -1.0 && sin_az < 1.0, ErrorCode::kOutOfRange,
              who + ": scatterer sin(azimuth) outside [-1, 1)");
      require(s.micro_freq >= 0 && s.micro_amp >= 0, ErrorCode::kOutOfRange,
              who + ": micro-motion frequency and amplitude must be non-negative");
      max_micro = std::max(max_micro, s.micro_amp);
    }
    require(std::abs(track.velocity) + max_micro < v_limit, ErrorCode::kOutOfRange,
            who + ": |v_r| + micro_amp exceeds the unambiguous velocity " + std::to_string(v_limit) +
                " m/s");
  }
}

CTensor synth_frame_clean(const RadarConfig& config, const Scene& scene, int frame) {
  const int n_s = config.samples_per_chirp();
  const int m_c = config.chirps;
  CTensor out({static_cast<std::size_t>(n_s), static_cast<std::size_t>(m_c),
               static_cast<std::size_t>(config.n_tx), static_cast<std::size_t>(config.n_rx)});
  const double lambda = config.wavelength();
  const double sample_period = 1.0 / config.adc_rate_hz;
  std::vector<Complex> fast(static_cast<std::size_t>(n_s));
  std::vector<Complex> rx_phase(static_cast<std::size_t>(config.n_rx));

  for (const TargetTrack& track : scene.tracks) {
    for (const Scatterer& s : track.scatterers) {
      const double tau = 2.0 * (track.range + s.range_offset) / kSpeedOfLight;
      const double sin_az = track.sin_azimuth + s.angle_offset;
      for (int m = 0; m < m_c; ++m) {
        const double chirp_start = (static_cast<double>(frame) * m_c + m) * config.chirp_interval_s;
        for (int tx = 0; tx < config.n_tx; ++tx) {
          const double t = chirp_start - config.slot_offset(tx);
          const double beat = config.slope() * tau + 2.0 * radial_velocity(track.velocity, s, t) / lambda;
          const double slow_phase = kTwoPi * 2.0 * displacement(track.velocity, s, t) / lambda;
          for (int n = 0; n < n_s; ++n) fast[n] = std::polar(1.0, kTwoPi * beat * n * sample_period);
          for (int rx = 0; rx < config.n_rx; ++rx) {
            // Virtual element tx * N_rx + rx at half-wavelength spacing.
            const double array_phase = std::numbers::pi * (tx * config.n_rx + rx) * sin_az;
            rx_phase[rx] = std::polar(s.amplitude, slow_phase + array_phase);
          }
          for (int n = 0; n < n_s; ++n) {
            for (int rx = 0; rx < config.n_rx; ++rx) out(n, m, tx, rx) += rx_phase[rx] * fast[n];
          }
        }
      }
    }
  }
  return out;
}

AdcCube synth_adc(const RadarConfig& config, const Scene& scene) {
  validate_scene(config, scene);
  AdcCube cube;
  cube.frames.reserve(static_cast<std::size_t>(config.frames));
  for (int f = 0; f < config.frames; ++f) {
    CTensor frame = synth_frame_clean(config, scene, f);
    if (scene.noise_sigma > 0) {
      Rng rng(derive_seed(scene.seed, "adc-noise", static_cast<std::uint64_t>(f)));
      std::normal_distribution<double> normal(0.0, scene.noise_sigma / std::numbers::sqrt2);
      for (Complex& y : frame.flat()) {
        const double re = normal(rng);
        const double im = normal(rng);
        y += Complex(re, im);
      }
    }
    cube.frames.push_back(std::move(frame));
  }
  return cube;
}

std::vector<ClassTemplate> default_class_templates() {
  std::vector<ClassTemplate> t(3);

  t[0].name = "car";
  t[0].range = {8, 35};
  t[0].velocity = {4.0, 9.0};
  t[0].sin_azimuth = {-0.4, 0.4};
  t[0].parts = {
      {3, {-1.2, 1.2}, {-0.02, 0.02}, {0.8, 1.2}, {0, 0}, {0, 0}},
      {2, {-1.0, 1.0}, {-0.02, 0.02}, {0.2, 0.35}, {12, 20}, {0.3, 0.6}},
  };

  t[1].name = "pedestrian";
  t[1].range = {5, 25};
  t[1].velocity = {0.6, 2.0};
  t[1].sin_azimuth = {-0.5, 0.5};
  t[1].parts = {
      {1, {0, 0}, {0, 0}, {0.8, 1.0}, {1.5, 2.5}, {0.1, 0.3}},
      {4, {-0.3, 0.3}, {-0.01, 0.01}, {0.3, 0.5}, {15, 30}, {1.0, 2.0}},
  };

  t[2].name = "cyclist";
  t[2].range = {6, 30};
  t[2].velocity = {2.5, 5.0};
  t[2].sin_azimuth = {-0.5, 0.5};
  t[2].parts = {
      {2, {-0.5, 0.5}, {-0.01, 0.01}, {0.8, 1.1}, {0, 0}, {0, 0}},
      {2, {-0.3, 0.3}, {-0.01, 0.01}, {0.3, 0.5}, {25, 45}, {0.4, 0.9}},
      {2, {-0.8, 0.8}, {-0.01, 0.01}, {0.2, 0.3}, {40, 60}, {0.8, 1.5}},
  };
  return t;
}

std::vector<LabeledScene> sample_scenes(const RadarConfig& config,
                                        const std::vector<ClassTemplate>& templates,
                                        int n_samples, std::uint64_t seed, double noise_sigma) {
  const int n_classes = static_cast<int>(templates.size());
  require(n_classes >= 1, ErrorCode::kInvalidArgument, "at least one class template is required");
  require(n_samples >= n_classes, ErrorCode::kInvalidArgument,
          "n_samples (" + std::to_string(n_samples) + ") must be at least the class count (" +
              std::to_string(n_classes) + ")");

  std::vector<int> labels(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) labels[i] = i % n_classes;
  Rng label_rng(derive_seed(seed, "labels"));
  std::shuffle(labels.begin(), labels.end(), label_rng);

  std::vector<LabeledScene> out;
  out.reserve(labels.size());
  for (int i = 0; i < n_samples; ++i) {
    const ClassTemplate& tmpl = templates[labels[i]];
    Rng rng(derive_seed(seed, "scene", static_cast<std::uint64_t>(i)));
    TargetTrack track;
    track.class_id = labels[i];
    track.range = uniform(rng, tmpl.range.lo, tmpl.range.hi);
    track.velocity = uniform(rng, tmpl.velocity.lo, tmpl.velocity.hi);
    track.sin_azimuth = uniform(rng, tmpl.sin_azimuth.lo, tmpl.sin_azimuth.hi);
    for (const ScattererTemplate& part : tmpl.parts) {
      for (int c = 0; c < part.count; ++c) {
        Scatterer s;
        s.range_offset = uniform(rng, part.range_offset.lo, part.range_offset.hi);
        s.angle_offset = uniform(rng, part.angle_offset.lo, part.angle_offset.hi);
        s.amplitude = uniform(rng, part.amplitude.lo, part.amplitude.hi);
        s.micro_freq = uniform(rng, part.micro_freq.lo, part.micro_freq.hi);
        s.micro_amp = uniform(rng, part.micro_amp.lo, part.micro_amp.hi);
        s.micro_phase = uniform(rng, 0.0, kTwoPi);
        track.scatterers.push_back(s);
      }
    }
    LabeledScene item;
    item.class_id = labels[i];
    item.scene.tracks.push_back(std::move(track));
    item.scene.noise_sigma = noise_sigma;
    item.scene.seed = derive_seed(seed, "scene-noise", static_cast<std::uint64_t>(i));
    validate_scene(config, item.scene);
    out.push_back(std::move(item));
  }
  return out;
}

std::vector<LabeledSample> sample_dataset(const RadarConfig& config,
                                          const std::vector<ClassTemplate>& templates,
                                          int n_samples, std::uint64_t seed, double noise_sigma) {
  std::vector<LabeledSample> out;
  for (LabeledScene& item : sample_scenes(config, templates, n_samples, seed, noise_sigma)) {
    LabeledSample s;
    s.cube = synth_adc(config, item.scene);
    s.scene = std::move(item.scene);
    s.class_id = item.class_id;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace mdslab
