// Slow, direct reference implementations used to check the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <vector>

#include "mdslab/rva_pipeline.hpp"
#include "mdslab/scene_sim.hpp"

namespace oracle {

using mdslab::Complex;
using mdslab::CTensor;
using mdslab::RTensor;

// O(N^2) DFT with long double accumulation and exact integer phase reduction.
inline std::vector<Complex> naive_dft(const std::vector<Complex>& x) {
  const std::size_t n = x.size();
  std::vector<Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    long double re = 0, im = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const long double ang = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>((k * i) % n) / n;
      re += x[i].real() * std::cos(ang) - x[i].imag() * std::sin(ang);
      im += x[i].real() * std::sin(ang) + x[i].imag() * std::cos(ang);
    }
    out[k] = {static_cast<double>(re), static_cast<double>(im)};
  }
  return out;
}

inline double max_rel_err(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return den > 0 ? num / den : num;
}

inline double hann(std::size_t n, std::size_t len) {
  return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(len)));
}

// CA-CFAR by visiting every window cell: Doppler wraps, range cells outside
// the map are skipped, the guard box is excluded.
inline std::vector<std::pair<int, int>> brute_cfar(const RTensor& p, int train, int guard, double alpha) {
  const int rows = static_cast<int>(p.dim(0)), cols = static_cast<int>(p.dim(1));
  const int half = train + guard;
  std::vector<std::pair<int, int>> hits;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double sum = 0;
      int count = 0;
      for (int dr = -half; dr <= half; ++dr) {
        for (int dc = -half; dc <= half; ++dc) {
          if (std::abs(dr) <= guard && std::abs(dc) <= guard) continue;
          const int rr = r + dr;
          if (rr < 0 || rr >= rows) continue;
          const int cc = ((c + dc) % cols + cols) % cols;
          sum += p(rr, cc);
          ++count;
        }
      }
      if (p(r, c) > alpha * sum / count) hits.emplace_back(r, c);
    }
  }
  return hits;
}

// Flood fill over a detection grid, 8-connectivity, Doppler wraps.
// Returns each component's (k_r, k_v) sets.
inline std::vector<std::set<std::pair<int, int>>> flood_components(const std::vector<std::pair<int, int>>& cells,
                                                                   int rows, int cols) {
  std::vector<std::vector<int>> grid(rows, std::vector<int>(cols, 0));
  for (auto [r, c] : cells) grid[r][c] = 1;
  std::vector<std::set<std::pair<int, int>>> comps;
  for (auto [r0, c0] : cells) {
    if (grid[r0][c0] != 1) continue;
    std::set<std::pair<int, int>> comp;
    std::vector<std::pair<int, int>> stack{{r0, c0}};
    grid[r0][c0] = 2;
    while (!stack.empty()) {
      auto [r, c] = stack.back();
      stack.pop_back();
      comp.insert({r, c});
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int rr = r + dr, cc = ((c + dc) % cols + cols) % cols;
          if (rr < 0 || rr >= rows || grid[rr][cc] != 1) continue;
          grid[rr][cc] = 2;
          stack.emplace_back(rr, cc);
        }
      }
    }
    comps.push_back(comp);
  }
  return comps;
}

inline int circ(int a, int b, int n) {
  int d = std::abs(a - b) % n;
  return std::min(d, n - d);
}

// Single-linkage by repeated pairwise merging of clusters until no pair links.
inline std::vector<std::set<std::size_t>> pairwise_clusters(const std::vector<mdslab::RvaPoint>& pts,
                                                            const mdslab::ClusterGaps& g,
                                                            const mdslab::AxisBins& bins) {
  std::vector<std::set<std::size_t>> cl;
  for (std::size_t i = 0; i < pts.size(); ++i) cl.push_back({i});
  auto link = [&](std::size_t a, std::size_t b) {
    return std::abs(pts[a].k_r - pts[b].k_r) <= g.range && circ(pts[a].k_v, pts[b].k_v, bins.doppler) <= g.doppler &&
           circ(pts[a].k_theta, pts[b].k_theta, bins.angle) <= g.angle;
  };
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < cl.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < cl.size() && !merged; ++j) {
        for (std::size_t a : cl[i]) {
          for (std::size_t b : cl[j]) {
            if (link(a, b)) merged = true;
          }
        }
        if (merged) {
          cl[i].insert(cl[j].begin(), cl[j].end());
          cl.erase(cl.begin() + static_cast<std::ptrdiff_t>(j));
        }
      }
    }
  }
  return cl;
}

// One STFT frame: Hann-windowed DFT of series[f*hop, f*hop + window).
inline std::vector<Complex> stft_frame(const std::vector<Complex>& series, int window, int hop, int frame) {
  std::vector<Complex> seg(static_cast<std::size_t>(window));
  for (int n = 0; n < window; ++n) seg[n] = series[static_cast<std::size_t>(frame * hop + n)] * hann(n, window);
  return naive_dft(seg);
}

// Noise-free sample of one constant-velocity scatterer, straight from the
// beat-signal model.
inline Complex model_sample(const mdslab::RadarConfig& c, double range, double velocity, double sin_az, double amp,
                            int frame, int n, int m, int tx, int rx) {
  const long double pi = std::numbers::pi_v<long double>;
  const long double lambda = 299792458.0L / c.carrier_hz;
  const long double tau = 2.0L * range / 299792458.0L;
  const long double fd = 2.0L * velocity / lambda;
  const long double slope = static_cast<long double>(c.bandwidth_hz) / c.chirp_s;
  const long double t = (static_cast<long double>(frame) * c.chirps + m) * c.chirp_interval_s -
                        static_cast<long double>(tx) * c.chirp_interval_s / c.n_tx;
  const long double phase = 2 * pi * ((slope * tau + fd) * n / c.adc_rate_hz + fd * t) +
                            pi * (tx * c.n_rx + rx) * static_cast<long double>(sin_az);
  return std::polar(amp, static_cast<double>(std::fmod(phase, 2 * pi)));
}

}  // namespace oracle
