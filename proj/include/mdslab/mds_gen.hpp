#pragma once

#include <span>
#include <string>

#include "mdslab/tensor.hpp"

namespace mdslab {

struct StftParams {
  int window = 128;  // window length, equals M_c
  int hop = 3;       // M_c - N_overlap
  int n_fft = 128;   // equals M_c

  static StftParams from_overlap(int chirps, int overlap);
  void validate() const;
  // Frames that fit the series without padding, capped at n_fft.
  int frame_count(std::size_t series_length) const;
};

// Hann-formula windowed STFT of one slow-time series, [n_fft (freq), frames].
CTensor stft_cell(std::span<const Complex> series, const StftParams& params);

struct MdsTensor {
  CTensor data;  // [N_res_s, N_res_theta, n_fft, n_fft]
  StftParams params;
};

// stft_cell per (range, angle) cell of a [N_res_s, N_res_theta, N_time] crop.
// The frame count must reach n_fft so the output is square.
MdsTensor build_mds(const CTensor& bbox, const StftParams& params);

enum class NormMode { kLinear, kLog1p, kMinMax, kLog1pMinMax };

const char* norm_mode_name(NormMode mode);
NormMode parse_norm_mode(const std::string& name);

struct ReducedMds {
  RTensor data;  // [N_res_s * N_res_theta, n_fft, n_fft], range-major bins
  int n_res_s = 0;
  int n_res_theta = 0;
  NormMode norm = NormMode::kLog1pMinMax;

  int bins() const { return n_res_s * n_res_theta; }
};

inline int bin_index(int n_s, int n_theta, int n_res_theta) { return n_s * n_res_theta + n_theta; }

// |S| flattened to slices, then normalized. Min-max maps a constant input to 0.
ReducedMds reduce_dim(const MdsTensor& mds, NormMode mode = NormMode::kLog1pMinMax);

}  // namespace mdslab
