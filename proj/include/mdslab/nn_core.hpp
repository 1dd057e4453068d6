#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "mdslab/mds_gen.hpp"

namespace mdslab {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVec = Eigen::RowVectorXd;

enum class Pooling { kMean, kClassToken };

struct ModelConfig {
  int n_tokens = 15;   // N_res_bin
  int d_in = 16384;    // N_fft^2
  int emb = 64;
  int heads = 4;
  int blocks = 2;
  int mlp_ratio = 4;
  int classes = 3;
  double weight_decay = 0.01;  // lambda in CE + lambda ||Phi||^2
  Pooling pooling = Pooling::kMean;
  bool decay_all = true;       // false leaves biases and LayerNorm out of the L2 term

  int head_dim() const { return emb / heads; }
  int sequence_length() const { return n_tokens + (pooling == Pooling::kClassToken ? 1 : 0); }
  void validate() const;
};

struct BlockParams {
  Mat ln1_gamma, ln1_beta;
  Mat wq, bq, wk, bk, wv, bv, wo, bo;
  Mat ln2_gamma, ln2_beta;
  Mat w1, b1, w2, b2;
};

// All trainable tensors. Vectors are stored as 1 x n matrices.
struct ModelParams {
  ModelConfig config;
  Mat patch_w, patch_b;
  Mat pos;  // [n_tokens, emb]
  Mat cls;  // [1, emb], empty unless class-token pooling
  std::vector<BlockParams> blocks;
  Mat head_w, head_b;

  // f(name, matrix, decayed) over every tensor in checkpoint order. decayed is
  // false for biases and LayerNorm parameters.
  template <class F>
  void visit(F&& f) {
    visit_impl(*this, f);
  }
  template <class F>
  void visit(F&& f) const {
    visit_impl(*this, f);
  }

 private:
  template <class Self, class F>
  static void visit_impl(Self& self, F& f) {
    f("patch.w", self.patch_w, true);
    f("patch.b", self.patch_b, false);
    f("pos", self.pos, true);
    if (self.config.pooling == Pooling::kClassToken) f("cls", self.cls, true);
    for (std::size_t l = 0; l < self.blocks.size(); ++l) {
      auto& b = self.blocks[l];
      const std::string p = "block" + std::to_string(l) + ".";
      f(p + "ln1.gamma", b.ln1_gamma, false);
      f(p + "ln1.beta", b.ln1_beta, false);
      f(p + "attn.wq", b.wq, true);
      f(p + "attn.bq", b.bq, false);
      f(p + "attn.wk", b.wk, true);
      f(p + "attn.bk", b.bk, false);
      f(p + "attn.wv", b.wv, true);
      f(p + "attn.bv", b.bv, false);
      f(p + "attn.wo", b.wo, true);
      f(p + "attn.bo", b.bo, false);
      f(p + "ln2.gamma", b.ln2_gamma, false);
      f(p + "ln2.beta", b.ln2_beta, false);
      f(p + "mlp.w1", b.w1, true);
      f(p + "mlp.b1", b.b1, false);
      f(p + "mlp.w2", b.w2, true);
      f(p + "mlp.b2", b.b2, false);
    }
    f("head.w", self.head_w, true);
    f("head.b", self.head_b, false);
  }
};

// Shapes only, all zero.
ModelParams zero_params(const ModelConfig& config);

// Truncated normal (std 0.02, cut at 2 std) for projections, N(0, 0.02) for
// positional and class embeddings, zero biases and beta, unit gamma.
ModelParams init_params(const ModelConfig& config, std::uint64_t seed);

std::int64_t param_count(const ModelConfig& config);

struct LayerNormCache {
  Mat xhat;
  Eigen::VectorXd rstd;
};

struct BlockTape {
  Mat input;
  LayerNormCache ln1;
  Mat h1, q, k, v;
  std::vector<Mat> attn;  // per head, rows sum to 1
  Mat ctx, x1;
  LayerNormCache ln2;
  Mat h2, pre_act, act;
  Mat output;  // A^(l)
};

struct ForwardTape {
  Mat input;   // [n_tokens, d_in]
  std::vector<BlockTape> blocks;
  RowVec pooled;
  RowVec logits;
  RowVec probs;
};

// Flattens each bin's N_fft x N_fft heatmap into one token row.
Mat token_matrix(const ReducedMds& x);

// Logits for one sample. Throws kNumeric naming the layer on non-finite values.
RowVec forward(const ModelParams& params, const Mat& x, ForwardTape* tape = nullptr);

RowVec softmax(const RowVec& logits);
double cross_entropy(const RowVec& logits, int label);
double l2_penalty(const ModelParams& params);
// CE + lambda ||Phi||^2 for one sample.
double loss(const RowVec& logits, int label, const ModelParams& params);

// Reverse pass seeded with dL/dlogits. Parameter gradients are accumulated into
// *grads when non-null; gradients w.r.t. each block output A^(l) are written to
// *block_output_grads when non-null.
void backward_from_logits(const ModelParams& params, const ForwardTape& tape, const RowVec& dlogits,
                          ModelParams* grads, std::vector<Mat>* block_output_grads = nullptr);

// grads += 2 lambda Phi over the decayed tensors.
void add_l2_gradient(const ModelParams& params, ModelParams& grads);

// Full single-sample gradient of loss(): softmax - onehot, backprop, plus 2 lambda Phi.
ModelParams backward(const ForwardTape& tape, int label, const ModelParams& params);

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct OptState {
  ModelParams m;
  ModelParams v;
  std::int64_t t = 0;
  AdamHyper hyper;
};

OptState make_opt_state(const ModelParams& params, const AdamHyper& hyper);

void adam_step(ModelParams& params, const ModelParams& grads, OptState& opt);

int predict(const ModelParams& params, const Mat& x);

}  // namespace mdslab
