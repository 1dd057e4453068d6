#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mdslab/scene_sim.hpp"
#include "mdslab/tensor.hpp"

namespace mdslab {

// Range/Doppler spectra, [N_s (k_r), M_c (chirp or k_v), N_tx, N_rx].
struct RdCube {
  enum class Stage { kRange, kRangeDoppler };
  CTensor data;
  Stage stage = Stage::kRange;
  bool compensated = false;
};

// Fast-time DFT per (chirp, tx, rx), optionally Hann-windowed.
RdCube range_fft(const CTensor& adc_frame, bool window = true);

// Slow-time DFT without compensation.
RdCube doppler_fft(RdCube range_stage);

// Multiplies bin (k_r, k_v, tx, rx) by exp(j 2 pi f_v dt_tx), where f_v is
// the signed Doppler frequency of bin k_v.
RdCube compensate(RdCube rd, const RadarConfig& config);

RdCube doppler_process(RdCube range_stage, const RadarConfig& config);

// Signed Doppler frequency (Hz) of natural-order bin k_v.
double doppler_bin_hz(const RadarConfig& config, int k_v);

// Natural-order Doppler bin nearest to a radial velocity.
int velocity_to_doppler_bin(const RadarConfig& config, double velocity);

// P[k_r, k_v] = sum over tx, rx of |Y|^2.
RTensor power_map(const RdCube& rd);

struct Cell {
  int k_r = 0;
  int k_v = 0;
  double power = 0;
  bool operator==(const Cell&) const = default;
};

struct CfarWindow {
  int train = 4;  // training half-width beyond the guard band
  int guard = 2;  // guard half-width around the cell under test
};

struct DetectionSet {
  std::vector<Cell> cells;  // row-major (k_r, then k_v) order
  RTensor threshold;        // alpha * P_avg per cell
};

// Nominal training-cell count of a window away from range edges.
int cfar_training_cells(const CfarWindow& window);

// alpha = N (Pfa^(-1/N) - 1) for exponentially distributed noise powers.
double cfar_alpha(double pfa, int training_cells);

// 2-D CA-CFAR. Doppler wraps circularly; range windows are truncated at the
// edges and averaged over the cells that remain.
DetectionSet ca_cfar(const RTensor& power, const CfarWindow& window, double alpha);

// 8-connected components (Doppler adjacency wraps), one max-power cell each,
// ordered by that cell's (k_r, k_v).
std::vector<Cell> group_detections(const DetectionSet& detections, int doppler_bins);

struct AngleEstimate {
  std::vector<Complex> spectrum;  // natural-order angle bins, length N_theta
  int k_theta = 0;
};

// Virtual-array snapshot (tx-major), Hann window over N_tx*N_rx elements,
// zero-padded DFT to N_theta.
AngleEstimate angle_of(const RdCube& rd, int k_r, int k_v, int angle_bins, bool window = true);

struct RvaPoint {
  int k_r = 0;
  int k_v = 0;
  int k_theta = 0;
  double power = 0;
};

struct ClusterGaps {
  int range = 2;
  int doppler = 2;
  int angle = 4;
};

struct Centroid {
  int k_r = 0;
  int k_v = 0;
  int k_theta = 0;
  int members = 0;
  double mean_power = 0;
};

struct AxisBins {
  int range = 0;
  int doppler = 0;
  int angle = 0;
};

// Single-linkage merge: two points join when every per-axis gap (circular for
// Doppler and angle) is within the threshold. Centroids are power-weighted
// means rounded to the nearest bin, ordered by descending mean power.
std::vector<Centroid> cluster_centroids(std::span<const RvaPoint> points, const ClusterGaps& gaps,
                                        const AxisBins& bins);

// Range-angle-slow-time cube [rows, N_theta, M_c] for range bins
// [first_range, first_range + rows). The angle axis is fftshifted so index
// N_theta/2 is broadside; each slow-time snapshot is corrected for the TX
// slot offset at Doppler frequency doppler_hz.
CTensor rva_cube(const RdCube& range_stage, const RadarConfig& config, double doppler_hz,
                 int first_range = 0, int rows = -1);

inline int shift_angle_bin(int k_theta, int angle_bins) {
  return (k_theta + angle_bins / 2) % angle_bins;
}

// Window of [n_res_s, n_res_theta, M_c] centered on (center_row, center_col)
// of an rva_cube; out-of-range cells are zero.
CTensor crop_frame(const CTensor& rva, int center_row, int center_col, int n_res_s, int n_res_theta);

// Concatenates K_frame crops along slow time: [n_res_s, n_res_theta, M_c * K_frame].
CTensor stack_frames(std::span<const CTensor> crops, int k_frame);

CTensor crop_and_stack(std::span<const CTensor> rva_frames, int center_row, int center_col,
                       int n_res_s, int n_res_theta, int k_frame);

struct PipelineParams {
  CfarWindow window;
  double pfa = 1e-3;
  ClusterGaps gaps;
  int n_res_s = 5;
  int n_res_theta = 3;
};

struct TargetCrop {
  Centroid centroid;
  CTensor bbox;  // [n_res_s, n_res_theta, M_c * K_frame]
};

struct PipelineResult {
  std::vector<RvaPoint> points;  // grouped detections with angle, all frames
  std::vector<Centroid> centroids;
  std::vector<TargetCrop> crops;  // one per centroid, up to max_targets
};

// Full chain for one sample: per-frame range/Doppler/CFAR/grouping/angle,
// joint clustering across frames, then crop-and-stack per centroid. When no
// cell passes CFAR the strongest power-map cell stands in as one detection.
PipelineResult run_pipeline(const RadarConfig& config, const AdcCube& cube,
                            const PipelineParams& params, int max_targets = 1);

}  // namespace mdslab
