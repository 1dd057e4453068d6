#include "mdslab/rva_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "mdslab/fft.hpp"

namespace mdslab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_rank4(const CTensor& t, const char* what) {
  require(t.rank() == 4, ErrorCode::kShapeMismatch,
          std::string(what) + " must be rank 4 [N_s, M_c, N_tx, N_rx], got " + shape_to_string(t.shape()));
}

int wrap(int i, int n) {
  const int r = i % n;
  return r < 0 ? r + n : r;
}

// Offset b - a folded into [-n/2, n/2).
int circular_offset(int a, int b, int n) { return wrap(b - a + n / 2, n) - n / 2; }

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

RdCube range_fft(const CTensor& adc_frame, bool window) {
  require_rank4(adc_frame, "ADC frame");
  const std::size_t n_s = adc_frame.dim(0), m_c = adc_frame.dim(1);
  const std::size_t n_tx = adc_frame.dim(2), n_rx = adc_frame.dim(3);
  const std::vector<double> w = window ? hann_window(n_s) : std::vector<double>(n_s, 1.0);
  RdCube out;
  out.data = CTensor(adc_frame.shape());
  std::vector<Complex> buf(n_s);
  for (std::size_t m = 0; m < m_c; ++m) {
    for (std::size_t tx = 0; tx < n_tx; ++tx) {
      for (std::size_t rx = 0; rx < n_rx; ++rx) {
        for (std::size_t n = 0; n < n_s; ++n) buf[n] = adc_frame(n, m, tx, rx) * w[n];
        fft_inplace(buf);
        for (std::size_t k = 0; k < n_s; ++k) out.data(k, m, tx, rx) = buf[k];
      }
    }
  }
  out.stage = RdCube::Stage::kRange;
  return out;
}

RdCube doppler_fft(RdCube rd) {
  require_rank4(rd.data, "range cube");
  require(rd.stage == RdCube::Stage::kRange, ErrorCode::kState, "Doppler FFT applied twice");
  const std::size_t n_s = rd.data.dim(0), m_c = rd.data.dim(1);
  const std::size_t n_tx = rd.data.dim(2), n_rx = rd.data.dim(3);
  std::vector<Complex> buf(m_c);
  for (std::size_t k = 0; k < n_s; ++k) {
    for (std::size_t tx = 0; tx < n_tx; ++tx) {
      for (std::size_t rx = 0; rx < n_rx; ++rx) {
        for (std::size_t m = 0; m < m_c; ++m) buf[m] = rd.data(k, m, tx, rx);
        fft_inplace(buf);
        for (std::size_t m = 0; m < m_c; ++m) rd.data(k, m, tx, rx) = buf[m];
      }
    }
  }
  rd.stage = RdCube::Stage::kRangeDoppler;
  return rd;
}

double doppler_bin_hz(const RadarConfig& config, int k_v) {
  const int m_c = config.chirps;
  const int signed_bin = k_v >= m_c / 2 + m_c % 2 ? k_v - m_c : k_v;
  return signed_bin / (m_c * config.chirp_interval_s);
}

int velocity_to_doppler_bin(const RadarConfig& config, double velocity) {
  const double bins = doppler_hz(config, velocity) * config.chirps * config.chirp_interval_s;
  return wrap(static_cast<int>(std::lround(bins)), config.chirps);
}

RdCube compensate(RdCube rd, const RadarConfig& config) {
  require_rank4(rd.data, "range-Doppler cube");
  require(rd.stage == RdCube::Stage::kRangeDoppler, ErrorCode::kState,
          "compensation requires the Doppler stage");
  require(!rd.compensated, ErrorCode::kState, "Doppler compensation applied twice");
  require(static_cast<int>(rd.data.dim(1)) == config.chirps &&
              static_cast<int>(rd.data.dim(2)) == config.n_tx,
          ErrorCode::kShapeMismatch, "range-Doppler cube does not match the radar config");
  const std::size_t n_s = rd.data.dim(0), m_c = rd.data.dim(1);
  const std::size_t n_tx = rd.data.dim(2), n_rx = rd.data.dim(3);
  for (std::size_t kv = 0; kv < m_c; ++kv) {
    const double f_v = doppler_bin_hz(config, static_cast<int>(kv));
    for (std::size_t tx = 0; tx < n_tx; ++tx) {
      if (tx == 0) continue;  // zero slot offset
      const Complex factor = std::polar(1.0, kTwoPi * f_v * config.slot_offset(static_cast<int>(tx)));
      for (std::size_t kr = 0; kr < n_s; ++kr) {
        for (std::size_t rx = 0; rx < n_rx; ++rx) rd.data(kr, kv, tx, rx) *= factor;
      }
    }
  }
  rd.compensated = true;
  return rd;
}

RdCube doppler_process(RdCube range_stage, const RadarConfig& config) {
  return compensate(doppler_fft(std::move(range_stage)), config);
}

RTensor power_map(const RdCube& rd) {
  require_rank4(rd.data, "range-Doppler cube");
  const std::size_t n_s = rd.data.dim(0), m_c = rd.data.dim(1);
  const std::size_t n_tx = rd.data.dim(2), n_rx = rd.data.dim(3);
  RTensor p({n_s, m_c});
  for (std::size_t kr = 0; kr < n_s; ++kr) {
    for (std::size_t kv = 0; kv < m_c; ++kv) {
      double acc = 0;
      for (std::size_t tx = 0; tx < n_tx; ++tx) {
        for (std::size_t rx = 0; rx < n_rx; ++rx) acc += std::norm(rd.data(kr, kv, tx, rx));
      }
      p(kr, kv) = acc;
    }
  }
  return p;
}

int cfar_training_cells(const CfarWindow& window) {
  const int outer = 2 * (window.train + window.guard) + 1;
  const int inner = 2 * window.guard + 1;
  return outer * outer - inner * inner;
}

double cfar_alpha(double pfa, int training_cells) {
  require(pfa > 0 && pfa < 1, ErrorCode::kInvalidArgument, "false-alarm probability must be in (0, 1)");
  require(training_cells >= 1, ErrorCode::kInvalidArgument, "CFAR needs at least one training cell");
  const double n = training_cells;
  return n * (std::pow(pfa, -1.0 / n) - 1.0);
}

DetectionSet ca_cfar(const RTensor& power, const CfarWindow& window, double alpha) {
  require(power.rank() == 2, ErrorCode::kShapeMismatch, "power map must be rank 2");
  require(window.train >= 1 && window.guard >= 0, ErrorCode::kInvalidArgument,
          "CFAR needs train >= 1 and guard >= 0");
  require(alpha > 0, ErrorCode::kInvalidArgument, "CFAR threshold factor must be positive");
  const int rows = static_cast<int>(power.dim(0));
  const int cols = static_cast<int>(power.dim(1));
  const int half = window.train + window.guard;
  require(2 * half + 1 <= rows && 2 * half + 1 <= cols, ErrorCode::kInvalidArgument,
          "CFAR window " + std::to_string(2 * half + 1) + " exceeds power map " +
              shape_to_string(power.shape()));

  // Circular running sums along Doppler, for the outer and guard widths.
  auto circular_sums = [&](int h) {
    RTensor sums({static_cast<std::size_t>(rows), static_cast<std::size_t>(cols)});
    std::vector<double> prefix(static_cast<std::size_t>(cols) + 1);
    for (int r = 0; r < rows; ++r) {
      prefix[0] = 0;
      for (int c = 0; c < cols; ++c) prefix[c + 1] = prefix[c] + power(r, c);
      for (int c = 0; c < cols; ++c) {
        const int lo = c - h, hi = c + h;  // inclusive, width 2h+1 <= cols
        double s;
        if (lo >= 0 && hi < cols) {
          s = prefix[hi + 1] - prefix[lo];
        } else if (lo < 0) {
          s = prefix[hi + 1] + (prefix[cols] - prefix[cols + lo]);
        } else {
          s = (prefix[cols] - prefix[lo]) + prefix[hi - cols + 1];
        }
        sums(r, c) = s;
      }
    }
    return sums;
  };
  const RTensor outer = circular_sums(half);
  const RTensor inner = circular_sums(window.guard);

  DetectionSet out;
  out.threshold = RTensor(power.shape());
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) {
      const int o_lo = std::max(0, r - half), o_hi = std::min(rows - 1, r + half);
      const int i_lo = std::max(0, r - window.guard), i_hi = std::min(rows - 1, r + window.guard);
      double sum = 0;
      for (int rr = o_lo; rr <= o_hi; ++rr) sum += outer(rr, c);
      for (int rr = i_lo; rr <= i_hi; ++rr) sum -= inner(rr, c);
      const int count = (o_hi - o_lo + 1) * (2 * half + 1) - (i_hi - i_lo + 1) * (2 * window.guard + 1);
      out.threshold(r, c) = alpha * std::max(sum, 0.0) / count;
    }
  }
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (power(r, c) > out.threshold(r, c)) out.cells.push_back({r, c, power(r, c)});
    }
  }
  return out;
}

std::vector<Cell> group_detections(const DetectionSet& detections, int doppler_bins) {
  const auto& cells = detections.cells;
  if (cells.empty()) return {};
  require(doppler_bins >= 1, ErrorCode::kInvalidArgument, "Doppler bin count must be positive");
  UnionFind uf(cells.size());
  for (std::size_t a = 0; a < cells.size(); ++a) {
    for (std::size_t b = a + 1; b < cells.size(); ++b) {
      const int dr = std::abs(cells[a].k_r - cells[b].k_r);
      if (dr > 1) {
        // cells are row-major sorted, so later rows are farther still
        if (cells[b].k_r > cells[a].k_r + 1) break;
        continue;
      }
      const int dv = std::abs(circular_offset(cells[a].k_v, cells[b].k_v, doppler_bins));
      if (dv <= 1) uf.unite(a, b);
    }
  }
  std::vector<Cell> best(cells.size());
  std::vector<bool> seen(cells.size(), false);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::size_t root = uf.find(i);
    // strict '>' keeps the first (lowest k_r, k_v) cell among equal powers
    if (!seen[root] || cells[i].power > best[root].power) {
      best[root] = cells[i];
      seen[root] = true;
    }
  }
  std::vector<Cell> out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (seen[i]) out.push_back(best[i]);
  }
  std::sort(out.begin(), out.end(), [](const Cell& a, const Cell& b) {
    return a.k_r != b.k_r ? a.k_r < b.k_r : a.k_v < b.k_v;
  });
  return out;
}

AngleEstimate angle_of(const RdCube& rd, int k_r, int k_v, int angle_bins, bool window) {
  require_rank4(rd.data, "range-Doppler cube");
  require(rd.compensated, ErrorCode::kState, "angle estimation requires a compensated cube");
  require(k_r >= 0 && k_r < static_cast<int>(rd.data.dim(0)) && k_v >= 0 &&
              k_v < static_cast<int>(rd.data.dim(1)),
          ErrorCode::kOutOfRange,
          "cell (" + std::to_string(k_r) + ", " + std::to_string(k_v) + ") outside the range-Doppler map");
  const std::size_t n_tx = rd.data.dim(2), n_rx = rd.data.dim(3);
  const std::size_t n_a = n_tx * n_rx;
  require(angle_bins >= static_cast<int>(n_a), ErrorCode::kInvalidArgument,
          "angle FFT size must cover the virtual array");
  const std::vector<double> w = window ? hann_window(n_a) : std::vector<double>(n_a, 1.0);
  AngleEstimate est;
  est.spectrum.assign(static_cast<std::size_t>(angle_bins), Complex{});
  for (std::size_t tx = 0; tx < n_tx; ++tx) {
    for (std::size_t rx = 0; rx < n_rx; ++rx) {
      const std::size_t a = tx * n_rx + rx;
      est.spectrum[a] = rd.data(k_r, k_v, tx, rx) * w[a];
    }
  }
  fft_inplace(est.spectrum);
  double best = -1;
  for (int k = 0; k < angle_bins; ++k) {
    const double mag = std::abs(est.spectrum[k]);
    if (mag > best) {
      best = mag;
      est.k_theta = k;
    }
  }
  return est;
}

std::vector<Centroid> cluster_centroids(std::span<const RvaPoint> points, const ClusterGaps& gaps,
                                        const AxisBins& bins) {
  if (points.empty()) return {};
  require(bins.range > 0 && bins.doppler > 0 && bins.angle > 0, ErrorCode::kInvalidArgument,
          "axis bin counts must be positive");
  UnionFind uf(points.size());
  for (std::size_t a = 0; a < points.size(); ++a) {
    for (std::size_t b = a + 1; b < points.size(); ++b) {
      const RvaPoint& p = points[a];
      const RvaPoint& q = points[b];
      if (std::abs(p.k_r - q.k_r) <= gaps.range &&
          std::abs(circular_offset(p.k_v, q.k_v, bins.doppler)) <= gaps.doppler &&
          std::abs(circular_offset(p.k_theta, q.k_theta, bins.angle)) <= gaps.angle) {
        uf.unite(a, b);
      }
    }
  }
  std::vector<std::vector<std::size_t>> members(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) members[uf.find(i)].push_back(i);

  std::vector<Centroid> out;
  for (const auto& group : members) {
    if (group.empty()) continue;
    // Offsets are unwrapped around the strongest member so circular axes average correctly.
    std::size_t ref = group.front();
    for (std::size_t i : group) {
      if (points[i].power > points[ref].power) ref = i;
    }
    const RvaPoint& r = points[ref];
    double wsum = 0, dr = 0, dv = 0, dt = 0, psum = 0;
    for (std::size_t i : group) {
      const RvaPoint& p = points[i];
      const double w = p.power > 0 ? p.power : 0.0;
      wsum += w;
      dr += w * (p.k_r - r.k_r);
      dv += w * circular_offset(r.k_v, p.k_v, bins.doppler);
      dt += w * circular_offset(r.k_theta, p.k_theta, bins.angle);
      psum += p.power;
    }
    Centroid c;
    if (wsum > 0) {
      c.k_r = std::clamp(static_cast<int>(std::lround(r.k_r + dr / wsum)), 0, bins.range - 1);
      c.k_v = wrap(static_cast<int>(std::lround(r.k_v + dv / wsum)), bins.doppler);
      c.k_theta = wrap(static_cast<int>(std::lround(r.k_theta + dt / wsum)), bins.angle);
    } else {
      c.k_r = r.k_r;
      c.k_v = r.k_v;
      c.k_theta = r.k_theta;
    }
    c.members = static_cast<int>(group.size());
    c.mean_power = psum / static_cast<double>(group.size());
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const Centroid& a, const Centroid& b) {
    if (a.mean_power != b.mean_power) return a.mean_power > b.mean_power;
    if (a.k_r != b.k_r) return a.k_r < b.k_r;
    if (a.k_v != b.k_v) return a.k_v < b.k_v;
    return a.k_theta < b.k_theta;
  });
  return out;
}

CTensor rva_cube(const RdCube& range_stage, const RadarConfig& config, double doppler_hz,
                 int first_range, int rows) {
  require_rank4(range_stage.data, "range cube");
  require(range_stage.stage == RdCube::Stage::kRange, ErrorCode::kState,
          "RVA cube is built from the range stage (slow time intact)");
  const int n_s = static_cast<int>(range_stage.data.dim(0));
  const int m_c = static_cast<int>(range_stage.data.dim(1));
  const int n_tx = static_cast<int>(range_stage.data.dim(2));
  const int n_rx = static_cast<int>(range_stage.data.dim(3));
  require(n_tx == config.n_tx && n_rx == config.n_rx, ErrorCode::kShapeMismatch,
          "range cube does not match the radar config");
  if (rows < 0) rows = n_s - first_range;
  require(first_range >= 0 && rows >= 0 && first_range + rows <= n_s, ErrorCode::kOutOfRange,
          "RVA range rows outside the cube");
  const int n_theta = config.angle_fft;
  const int n_a = n_tx * n_rx;
  require(n_theta >= n_a, ErrorCode::kInvalidArgument, "angle FFT size must cover the virtual array");
  const std::vector<double> w = hann_window(static_cast<std::size_t>(n_a));
  std::vector<Complex> slot_fix(static_cast<std::size_t>(n_tx));
  for (int tx = 0; tx < n_tx; ++tx) slot_fix[tx] = std::polar(1.0, kTwoPi * doppler_hz * config.slot_offset(tx));

  CTensor out({static_cast<std::size_t>(rows), static_cast<std::size_t>(n_theta), static_cast<std::size_t>(m_c)});
  std::vector<Complex> buf(static_cast<std::size_t>(n_theta));
  for (int row = 0; row < rows; ++row) {
    const int kr = first_range + row;
    for (int m = 0; m < m_c; ++m) {
      std::fill(buf.begin(), buf.end(), Complex{});
      for (int tx = 0; tx < n_tx; ++tx) {
        for (int rx = 0; rx < n_rx; ++rx) {
          const int a = tx * n_rx + rx;
          buf[a] = range_stage.data(kr, m, tx, rx) * slot_fix[tx] * w[a];
        }
      }
      fft_inplace(buf);
      for (int k = 0; k < n_theta; ++k) out(row, shift_angle_bin(k, n_theta), m) = buf[k];
    }
  }
  return out;
}

CTensor crop_frame(const CTensor& rva, int center_row, int center_col, int n_res_s, int n_res_theta) {
  require(rva.rank() == 3, ErrorCode::kShapeMismatch, "RVA cube must be rank 3");
  const int rows = static_cast<int>(rva.dim(0));
  const int cols = static_cast<int>(rva.dim(1));
  const int m_c = static_cast<int>(rva.dim(2));
  require(n_res_s >= 1 && n_res_theta >= 1, ErrorCode::kInvalidArgument, "crop size must be positive");
  require(n_res_s <= rows && n_res_theta <= cols, ErrorCode::kInvalidArgument,
          "crop size exceeds the RVA cube");
  CTensor out({static_cast<std::size_t>(n_res_s), static_cast<std::size_t>(n_res_theta),
               static_cast<std::size_t>(m_c)});
  const int r0 = center_row - n_res_s / 2;
  const int c0 = center_col - n_res_theta / 2;
  for (int i = 0; i < n_res_s; ++i) {
    const int r = r0 + i;
    if (r < 0 || r >= rows) continue;
    for (int j = 0; j < n_res_theta; ++j) {
      const int c = c0 + j;
      if (c < 0 || c >= cols) continue;
      for (int m = 0; m < m_c; ++m) out(i, j, m) = rva(r, c, m);
    }
  }
  return out;
}

CTensor stack_frames(std::span<const CTensor> crops, int k_frame) {
  require(k_frame >= 1, ErrorCode::kInvalidArgument, "K_frame must be positive");
  require(static_cast<int>(crops.size()) == k_frame, ErrorCode::kShapeMismatch,
          "K_frame = " + std::to_string(k_frame) + " but " + std::to_string(crops.size()) +
              " frames are available");
  const Shape& s = crops.front().shape();
  require(s.size() == 3, ErrorCode::kShapeMismatch, "crops must be rank 3");
  for (const CTensor& c : crops) {
    require(c.shape() == s, ErrorCode::kShapeMismatch, "crops differ in shape");
  }
  const std::size_t m_c = s[2];
  CTensor out({s[0], s[1], m_c * static_cast<std::size_t>(k_frame)});
  for (std::size_t f = 0; f < crops.size(); ++f) {
    for (std::size_t i = 0; i < s[0]; ++i) {
      for (std::size_t j = 0; j < s[1]; ++j) {
        for (std::size_t m = 0; m < m_c; ++m) out(i, j, f * m_c + m) = crops[f](i, j, m);
      }
    }
  }
  return out;
}

CTensor crop_and_stack(std::span<const CTensor> rva_frames, int center_row, int center_col,
                       int n_res_s, int n_res_theta, int k_frame) {
  require(static_cast<int>(rva_frames.size()) == k_frame, ErrorCode::kShapeMismatch,
          "K_frame = " + std::to_string(k_frame) + " but " + std::to_string(rva_frames.size()) +
              " frames are available");
  std::vector<CTensor> crops;
  crops.reserve(rva_frames.size());
  for (const CTensor& f : rva_frames) crops.push_back(crop_frame(f, center_row, center_col, n_res_s, n_res_theta));
  return stack_frames(crops, k_frame);
}

PipelineResult run_pipeline(const RadarConfig& config, const AdcCube& cube, const PipelineParams& params,
                            int max_targets) {
  config.validate();
  require(static_cast<int>(cube.frames.size()) == config.frames, ErrorCode::kShapeMismatch,
          "ADC cube holds " + std::to_string(cube.frames.size()) + " frames, config expects " +
              std::to_string(config.frames));
  const int n_s = config.samples_per_chirp();
  const double alpha = cfar_alpha(params.pfa, cfar_training_cells(params.window));

  PipelineResult result;
  std::vector<RdCube> range_stages;
  range_stages.reserve(cube.frames.size());
  Cell strongest{0, 0, -1};
  std::size_t strongest_frame = 0;
  std::vector<RdCube> rd_frames;
  for (std::size_t f = 0; f < cube.frames.size(); ++f) {
    const CTensor& frame = cube.frames[f];
    require(static_cast<int>(frame.dim(0)) == n_s && static_cast<int>(frame.dim(1)) == config.chirps,
            ErrorCode::kShapeMismatch, "ADC frame shape does not match the radar config");
    range_stages.push_back(range_fft(frame));
    RdCube rd = doppler_process(range_stages.back(), config);
    const RTensor p = power_map(rd);
    for (int r = 0; r < n_s; ++r) {
      for (int c = 0; c < config.chirps; ++c) {
        if (p(r, c) > strongest.power) {
          strongest = {r, c, p(r, c)};
          strongest_frame = f;
        }
      }
    }
    const DetectionSet det = ca_cfar(p, params.window, alpha);
    for (const Cell& g : group_detections(det, config.chirps)) {
      const AngleEstimate ang = angle_of(rd, g.k_r, g.k_v, config.angle_fft);
      result.points.push_back({g.k_r, g.k_v, ang.k_theta, g.power});
    }
    rd_frames.push_back(std::move(rd));
  }
  if (result.points.empty()) {
    const AngleEstimate ang = angle_of(rd_frames[strongest_frame], strongest.k_r, strongest.k_v, config.angle_fft);
    result.points.push_back({strongest.k_r, strongest.k_v, ang.k_theta, strongest.power});
  }
  rd_frames.clear();

  result.centroids = cluster_centroids(result.points, params.gaps, {n_s, config.chirps, config.angle_fft});

  const int n_targets = std::min<int>(max_targets, static_cast<int>(result.centroids.size()));
  for (int t = 0; t < n_targets; ++t) {
    const Centroid& c = result.centroids[t];
    const int first = std::clamp(c.k_r - params.n_res_s / 2, 0, n_s);
    const int last = std::clamp(c.k_r - params.n_res_s / 2 + params.n_res_s, 0, n_s);
    const double f_d = doppler_bin_hz(config, c.k_v);
    std::vector<CTensor> crops;
    for (const RdCube& rs : range_stages) {
      const CTensor rva = rva_cube(rs, config, f_d, first, last - first);
      // Pad the row slice back to a full-height view so the crop rule applies unchanged.
      CTensor padded({static_cast<std::size_t>(params.n_res_s), rva.dim(1), rva.dim(2)});
      const int pad_top = first - (c.k_r - params.n_res_s / 2);
      for (int i = 0; i < last - first; ++i) {
        for (std::size_t j = 0; j < rva.dim(1); ++j) {
          for (std::size_t m = 0; m < rva.dim(2); ++m) padded(i + pad_top, j, m) = rva(i, j, m);
        }
      }
      crops.push_back(crop_frame(padded, params.n_res_s / 2, shift_angle_bin(c.k_theta, config.angle_fft),
                                 params.n_res_s, params.n_res_theta));
    }
    result.crops.push_back({c, stack_frames(crops, config.frames)});
  }
  return result;
}

}  // namespace mdslab
