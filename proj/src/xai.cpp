#include "mdslab/xai.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mdslab/image_io.hpp"

namespace mdslab {

namespace {

bool params_finite(const ModelParams& params) {
  bool ok = true;
  params.visit([&](const std::string&, const Mat& m, bool) { ok = ok && m.allFinite(); });
  return ok;
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

RelevanceMap grad_cam(const ModelParams& params, const Mat& x, int n_res_s, int n_res_theta, int target_class,
                      int block, bool normalize) {
  const ModelConfig& cfg = params.config;
  require(params_finite(params), ErrorCode::kNumeric, "model parameters contain NaN or Inf");
  require(block >= 1 && block <= cfg.blocks, ErrorCode::kOutOfRange,
          "block " + std::to_string(block) + " outside [1, " + std::to_string(cfg.blocks) + "]");
  require(target_class >= 0 && target_class < cfg.classes, ErrorCode::kOutOfRange, "class index out of range");
  require(n_res_s * n_res_theta == cfg.n_tokens, ErrorCode::kShapeMismatch,
          "range-angle grid does not match the token count");

  ForwardTape tape;
  forward(params, x, &tape);
  RowVec dz = RowVec::Zero(cfg.classes);
  dz(target_class) = 1.0;
  std::vector<Mat> dA;
  backward_from_logits(params, tape, dz, nullptr, &dA);

  const std::size_t l = static_cast<std::size_t>(block - 1);
  // Patch tokens sit in the last n_tokens rows; a class token, if any, is row 0.
  const Mat a = tape.blocks[l].output.bottomRows(cfg.n_tokens);
  const Mat g = dA[l].bottomRows(cfg.n_tokens);
  const RowVec weights = g.colwise().mean();

  RelevanceMap out;
  out.block = block;
  out.target_class = target_class;
  out.tokens.resize(static_cast<std::size_t>(cfg.n_tokens));
  for (int t = 0; t < cfg.n_tokens; ++t) out.tokens[t] = std::max(0.0, a.row(t).dot(weights));
  if (normalize) {
    const double mx = *std::max_element(out.tokens.begin(), out.tokens.end());
    if (mx > 0) {
      for (double& v : out.tokens) v /= mx;
    }
  }
  out.spatial = RTensor({static_cast<std::size_t>(n_res_s), static_cast<std::size_t>(n_res_theta)}, out.tokens);
  return out;
}

RelevanceMap grad_cam(const ModelParams& params, const ReducedMds& x, int target_class, int block, bool normalize) {
  return grad_cam(params, token_matrix(x), x.n_res_s, x.n_res_theta, target_class, block, normalize);
}

std::vector<double> attention_received(const ModelParams& params, const Mat& x, int block) {
  const ModelConfig& cfg = params.config;
  require(block >= 1 && block <= cfg.blocks, ErrorCode::kOutOfRange, "block index out of range");
  ForwardTape tape;
  forward(params, x, &tape);
  const BlockTape& b = tape.blocks[static_cast<std::size_t>(block - 1)];
  const Eigen::Index seq = cfg.sequence_length();
  RowVec acc = RowVec::Zero(seq);
  for (const Mat& a : b.attn) acc += a.colwise().mean();
  acc /= static_cast<double>(b.attn.size());
  const Eigen::Index skip = seq - cfg.n_tokens;
  std::vector<double> out(static_cast<std::size_t>(cfg.n_tokens));
  for (int t = 0; t < cfg.n_tokens; ++t) out[t] = acc(skip + t);
  return out;
}

RTensor summed_mds_image(const ReducedMds& x) {
  const RTensor& d = x.data;
  require(d.rank() == 3, ErrorCode::kShapeMismatch, "reduced MDS must be rank 3");
  const std::size_t bins = d.dim(0), rows = d.dim(1), cols = d.dim(2);
  RTensor img({rows, cols});
  for (std::size_t b = 0; b < bins; ++b) {
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t dst = (r + rows / 2) % rows;
      for (std::size_t c = 0; c < cols; ++c) img(dst, c) += d(b, r, c);
    }
  }
  const auto [lo, hi] = std::minmax_element(img.flat().begin(), img.flat().end());
  const double min = *lo, range = *hi - *lo;
  for (double& v : img.flat()) v = range > 0 ? (v - min) / range : 0.0;
  return img;
}

RTensor upsample_bilinear(const RTensor& map, int height, int width) {
  require(map.rank() == 2 && map.size() > 0, ErrorCode::kShapeMismatch, "map must be a non-empty rank-2 tensor");
  require(height > 0 && width > 0, ErrorCode::kInvalidArgument, "target size must be positive");
  const int h = static_cast<int>(map.dim(0)), w = static_cast<int>(map.dim(1));
  RTensor out({static_cast<std::size_t>(height), static_cast<std::size_t>(width)});
  for (int y = 0; y < height; ++y) {
    const double sy = std::clamp((y + 0.5) * h / height - 0.5, 0.0, static_cast<double>(h - 1));
    const int y0 = static_cast<int>(std::floor(sy));
    const int y1 = std::min(y0 + 1, h - 1);
    const double fy = sy - y0;
    for (int x = 0; x < width; ++x) {
      const double sx = std::clamp((x + 0.5) * w / width - 0.5, 0.0, static_cast<double>(w - 1));
      const int x0 = static_cast<int>(std::floor(sx));
      const int x1 = std::min(x0 + 1, w - 1);
      const double fx = sx - x0;
      const double top = (1 - fx) * map(y0, x0) + fx * map(y0, x1);
      const double bottom = (1 - fx) * map(y1, x0) + fx * map(y1, x1);
      out(y, x) = (1 - fy) * top + fy * bottom;
    }
  }
  return out;
}

void render_overlay(const ReducedMds& x, const RelevanceMap& relevance, const OverlayPaths& paths) {
  require(relevance.spatial.rank() == 2, ErrorCode::kShapeMismatch, "relevance map must be rank 2");
  const RTensor base = summed_mds_image(x);
  const int height = static_cast<int>(base.dim(0)), width = static_cast<int>(base.dim(1));

  RTensor rel = relevance.spatial;
  const double mx = *std::max_element(rel.flat().begin(), rel.flat().end());
  for (double& v : rel.flat()) v = mx > 0 ? std::max(0.0, v) / mx : 0.0;
  const RTensor rel_img = upsample_bilinear(rel, height, width);

  const GrayImage gray = to_gray(base);
  RgbImage overlay;
  overlay.width = width;
  overlay.height = height;
  overlay.pixels.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double g = gray.pixels[i] / 255.0;
    const double a = 0.5 * rel_img.flat()[i];
    const double rgb[3] = {(1 - a) * g + a, (1 - a) * g, (1 - a) * g};
    for (int c = 0; c < 3; ++c) {
      overlay.pixels[3 * i + c] = static_cast<std::uint8_t>(std::lround(std::clamp(rgb[c], 0.0, 1.0) * 255.0));
    }
  }
  write_pgm(paths.mds, gray);
  write_pgm(paths.relevance, to_gray(rel_img));
  write_ppm(paths.overlay, overlay);
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  require(a.size() == b.size() && a.size() >= 2, ErrorCode::kInvalidArgument,
          "Spearman correlation needs two equal-length series of at least 2");
  const std::vector<double> ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va == 0 || vb == 0) return 0.0;
  return cov / std::sqrt(va * vb);
}

}  // namespace mdslab
