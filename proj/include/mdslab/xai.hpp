#pragma once

#include <string>
#include <vector>

#include "mdslab/nn_core.hpp"

namespace mdslab {

struct RelevanceMap {
  std::vector<double> tokens;  // M_t >= 0, one per range-angle bin
  int block = 0;               // 1-based
  int target_class = 0;
  RTensor spatial;             // [N_res_s, N_res_theta]
};

// Grad-CAM on the output of transformer block `block` (1-based) for the
// pre-softmax logit of `target_class`: channel weights are token-averaged
// logit gradients, relevance is ReLU of the weighted channel sum per token.
RelevanceMap grad_cam(const ModelParams& params, const ReducedMds& x, int target_class, int block,
                      bool normalize = false);

// Same, from the raw token matrix; the spatial map has shape [n_res_s, n_res_theta].
RelevanceMap grad_cam(const ModelParams& params, const Mat& x, int n_res_s, int n_res_theta, int target_class,
                      int block, bool normalize = false);

// Attention each token receives at a block, averaged over heads and queries.
std::vector<double> attention_received(const ModelParams& params, const Mat& x, int block);

// Sum over bins of the reduced MDS, [N_fft (freq), N_fft (frame)], rows
// fftshifted so zero Doppler sits mid-image, scaled to [0, 1].
RTensor summed_mds_image(const ReducedMds& x);

// Block-centered bilinear resize of a rank-2 map to height x width.
RTensor upsample_bilinear(const RTensor& map, int height, int width);

struct OverlayPaths {
  std::string mds;        // PGM
  std::string relevance;  // PGM
  std::string overlay;    // PPM
};

// Writes the summed-MDS image, the upsampled relevance image and a blend in
// which each pixel moves toward red by 0.5 * relevance (zero relevance leaves
// the gray MDS pixel unchanged).
void render_overlay(const ReducedMds& x, const RelevanceMap& relevance, const OverlayPaths& paths);

// Spearman rank correlation with average ranks for ties; 0 when either side is constant.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace mdslab
