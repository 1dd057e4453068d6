#include "mdslab/mds_gen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mdslab/fft.hpp"

namespace mdslab {

StftParams StftParams::from_overlap(int chirps, int overlap) {
  StftParams p;
  p.window = chirps;
  p.n_fft = chirps;
  p.hop = chirps - overlap;
  p.validate();
  return p;
}

void StftParams::validate() const {
  require(window >= 1, ErrorCode::kInvalidArgument, "STFT window length must be positive");
  require(hop > 0, ErrorCode::kInvalidArgument, "STFT hop must be positive (overlap < window)");
  require(n_fft >= window, ErrorCode::kInvalidArgument, "STFT length must cover the window");
}

int StftParams::frame_count(std::size_t series_length) const {
  if (series_length < static_cast<std::size_t>(window)) return 0;
  const std::size_t fit = (series_length - static_cast<std::size_t>(window)) / static_cast<std::size_t>(hop) + 1;
  return static_cast<int>(std::min<std::size_t>(fit, static_cast<std::size_t>(n_fft)));
}

CTensor stft_cell(std::span<const Complex> series, const StftParams& params) {
  params.validate();
  require(series.size() >= static_cast<std::size_t>(params.window), ErrorCode::kInvalidArgument,
          "series shorter than the STFT window");
  const int frames = params.frame_count(series.size());
  const std::vector<double> w = hann_window(static_cast<std::size_t>(params.window));
  CTensor out({static_cast<std::size_t>(params.n_fft), static_cast<std::size_t>(frames)});
  std::vector<Complex> buf(static_cast<std::size_t>(params.n_fft));
  for (int f = 0; f < frames; ++f) {
    std::fill(buf.begin(), buf.end(), Complex{});
    const std::size_t start = static_cast<std::size_t>(f) * static_cast<std::size_t>(params.hop);
    for (int n = 0; n < params.window; ++n) buf[n] = series[start + n] * w[n];
    fft_inplace(buf);
    for (int k = 0; k < params.n_fft; ++k) out(k, f) = buf[k];
  }
  return out;
}

MdsTensor build_mds(const CTensor& bbox, const StftParams& params) {
  require(bbox.rank() == 3, ErrorCode::kShapeMismatch,
          "crop must be rank 3 [N_res_s, N_res_theta, N_time], got " + shape_to_string(bbox.shape()));
  params.validate();
  const std::size_t rows = bbox.dim(0), cols = bbox.dim(1), n_time = bbox.dim(2);
  require(params.frame_count(n_time) == params.n_fft, ErrorCode::kInvalidArgument,
          "series of " + std::to_string(n_time) + " samples yields " +
              std::to_string(params.frame_count(n_time)) + " STFT frames, need " + std::to_string(params.n_fft));
  const std::size_t n = static_cast<std::size_t>(params.n_fft);
  MdsTensor mds;
  mds.params = params;
  mds.data = CTensor({rows, cols, n, n});
  std::vector<Complex> series(n_time);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      for (std::size_t t = 0; t < n_time; ++t) series[t] = bbox(i, j, t);
      CTensor s;
      try {
        s = stft_cell(series, params);
      } catch (const Error& e) {
        fail(e.code(), "cell (" + std::to_string(i) + ", " + std::to_string(j) + "): " + e.what());
      }
      std::copy(s.flat().begin(), s.flat().end(), &mds.data(i, j, 0, 0));
    }
  }
  return mds;
}

const char* norm_mode_name(NormMode mode) {
  switch (mode) {
    case NormMode::kLinear: return "linear";
    case NormMode::kLog1p: return "log1p";
    case NormMode::kMinMax: return "minmax";
    case NormMode::kLog1pMinMax: return "log1p_minmax";
  }
  return "unknown";
}

NormMode parse_norm_mode(const std::string& name) {
  for (NormMode m : {NormMode::kLinear, NormMode::kLog1p, NormMode::kMinMax, NormMode::kLog1pMinMax}) {
    if (name == norm_mode_name(m)) return m;
  }
  fail(ErrorCode::kParse, "unknown normalization mode '" + name + "'");
}

ReducedMds reduce_dim(const MdsTensor& mds, NormMode mode) {
  const CTensor& s = mds.data;
  require(s.rank() == 4 && s.dim(2) == s.dim(3), ErrorCode::kShapeMismatch,
          "MDS tensor must be [N_res_s, N_res_theta, N_fft, N_fft], got " + shape_to_string(s.shape()));
  ReducedMds out;
  out.n_res_s = static_cast<int>(s.dim(0));
  out.n_res_theta = static_cast<int>(s.dim(1));
  out.norm = mode;
  // Row-major [s, theta, a, b] already is [bin, a, b] with bin = s * N_theta + theta.
  out.data = RTensor({s.dim(0) * s.dim(1), s.dim(2), s.dim(3)});
  auto src = s.flat();
  auto dst = out.data.flat();
  for (std::size_t i = 0; i < src.size(); ++i) {
    require(std::isfinite(src[i].real()) && std::isfinite(src[i].imag()), ErrorCode::kNumeric,
            "MDS tensor contains NaN or Inf");
    dst[i] = std::abs(src[i]);
  }
  if (mode == NormMode::kLog1p || mode == NormMode::kLog1pMinMax) {
    for (double& v : dst) v = std::log1p(v);
  }
  if (mode == NormMode::kMinMax || mode == NormMode::kLog1pMinMax) {
    const auto [lo, hi] = std::minmax_element(dst.begin(), dst.end());
    const double min = *lo, range = *hi - *lo;
    for (double& v : dst) v = range > 0 ? (v - min) / range : 0.0;
  }
  return out;
}

}  // namespace mdslab
