#include "mdslab/nn_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "mdslab/rng.hpp"

namespace mdslab {

namespace {

constexpr double kLayerNormEps = 1e-5;
constexpr double kInitStd = 0.02;

struct TensorRef {
  Mat* value;
  bool decayed;
};

std::vector<TensorRef> tensors(ModelParams& p) {
  std::vector<TensorRef> out;
  p.visit([&](const std::string&, Mat& m, bool decayed) { out.push_back({&m, decayed}); });
  return out;
}

std::vector<const Mat*> tensors(const ModelParams& p) {
  std::vector<const Mat*> out;
  p.visit([&](const std::string&, const Mat& m, bool) { out.push_back(&m); });
  return out;
}

void check_finite(const Mat& m, const std::string& layer) {
  require(m.allFinite(), ErrorCode::kNumeric, "non-finite activation at " + layer);
}

Mat add_row(const Mat& x, const Mat& row) { return x.rowwise() + row.row(0); }

Mat layer_norm(const Mat& x, const Mat& gamma, const Mat& beta, LayerNormCache& cache) {
  const Eigen::Index n = x.rows(), d = x.cols();
  cache.xhat.resize(n, d);
  cache.rstd.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mean = x.row(i).mean();
    const double var = (x.row(i).array() - mean).square().mean();
    const double rstd = 1.0 / std::sqrt(var + kLayerNormEps);
    cache.rstd(i) = rstd;
    cache.xhat.row(i) = (x.row(i).array() - mean) * rstd;
  }
  Mat y = cache.xhat.array().rowwise() * gamma.row(0).array();
  return y.rowwise() + beta.row(0);
}

// Returns dx; accumulates dgamma, dbeta when non-null.
Mat layer_norm_backward(const Mat& dy, const Mat& gamma, const LayerNormCache& cache, Mat* dgamma,
                        Mat* dbeta) {
  if (dgamma) dgamma->row(0) += (dy.array() * cache.xhat.array()).colwise().sum().matrix();
  if (dbeta) dbeta->row(0) += dy.colwise().sum();
  const Mat dxhat = dy.array().rowwise() * gamma.row(0).array();
  Mat dx(dy.rows(), dy.cols());
  for (Eigen::Index i = 0; i < dy.rows(); ++i) {
    const double mean_d = dxhat.row(i).mean();
    const double mean_dx = (dxhat.row(i).array() * cache.xhat.row(i).array()).mean();
    dx.row(i) = cache.rstd(i) * (dxhat.row(i).array() - mean_d - cache.xhat.row(i).array() * mean_dx);
  }
  return dx;
}

double gelu(double u) { return 0.5 * u * (1.0 + std::erf(u / std::numbers::sqrt2)); }

double gelu_grad(double u) {
  const double cdf = 0.5 * (1.0 + std::erf(u / std::numbers::sqrt2));
  const double pdf = std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + u * pdf;
}

void softmax_rows(Mat& s) {
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double mx = s.row(i).maxCoeff();
    s.row(i) = (s.row(i).array() - mx).exp();
    s.row(i) /= s.row(i).sum();
  }
}

Mat block_forward(const BlockParams& b, const ModelConfig& cfg, const Mat& x, BlockTape& t, int layer) {
  const std::string id = "block" + std::to_string(layer);
  const int dh = cfg.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  t.input = x;
  t.h1 = layer_norm(x, b.ln1_gamma, b.ln1_beta, t.ln1);
  t.q = add_row(t.h1 * b.wq, b.bq);
  t.k = add_row(t.h1 * b.wk, b.bk);
  t.v = add_row(t.h1 * b.wv, b.bv);
  t.ctx.resize(x.rows(), cfg.emb);
  t.attn.resize(static_cast<std::size_t>(cfg.heads));
  for (int h = 0; h < cfg.heads; ++h) {
    const auto qh = t.q.middleCols(h * dh, dh);
    const auto kh = t.k.middleCols(h * dh, dh);
    const auto vh = t.v.middleCols(h * dh, dh);
    Mat s = (qh * kh.transpose()) * scale;
    softmax_rows(s);
    t.ctx.middleCols(h * dh, dh) = s * vh;
    t.attn[h] = std::move(s);
  }
  check_finite(t.ctx, id + ".attn");
  t.x1 = x + add_row(t.ctx * b.wo, b.bo);
  t.h2 = layer_norm(t.x1, b.ln2_gamma, b.ln2_beta, t.ln2);
  t.pre_act = add_row(t.h2 * b.w1, b.b1);
  t.act = t.pre_act.unaryExpr([](double u) { return gelu(u); });
  t.output = t.x1 + add_row(t.act * b.w2, b.b2);
  check_finite(t.output, id + ".out");
  return t.output;
}

// dy is dL/d(block output); returns dL/d(block input).
Mat block_backward(const BlockParams& b, const ModelConfig& cfg, const BlockTape& t, const Mat& dy,
                   BlockParams* g) {
  const int dh = cfg.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  // output = x1 + act W2 + b2
  Mat dx1 = dy;
  const Mat dact = dy * b.w2.transpose();
  if (g) {
    g->w2.noalias() += t.act.transpose() * dy;
    g->b2.row(0) += dy.colwise().sum();
  }
  const Mat dpre = dact.array() * t.pre_act.unaryExpr([](double u) { return gelu_grad(u); }).array();
  if (g) {
    g->w1.noalias() += t.h2.transpose() * dpre;
    g->b1.row(0) += dpre.colwise().sum();
  }
  const Mat dh2 = dpre * b.w1.transpose();
  dx1 += layer_norm_backward(dh2, b.ln2_gamma, t.ln2, g ? &g->ln2_gamma : nullptr, g ? &g->ln2_beta : nullptr);

  // x1 = x + ctx Wo + bo
  Mat dx = dx1;
  const Mat dctx = dx1 * b.wo.transpose();
  if (g) {
    g->wo.noalias() += t.ctx.transpose() * dx1;
    g->bo.row(0) += dx1.colwise().sum();
  }
  Mat dq(t.q.rows(), t.q.cols()), dk(t.k.rows(), t.k.cols()), dv(t.v.rows(), t.v.cols());
  for (int h = 0; h < cfg.heads; ++h) {
    const Mat& a = t.attn[h];
    const auto dctx_h = dctx.middleCols(h * dh, dh);
    const Mat da = dctx_h * t.v.middleCols(h * dh, dh).transpose();
    dv.middleCols(h * dh, dh) = a.transpose() * dctx_h;
    const Eigen::VectorXd row_dot = (da.array() * a.array()).rowwise().sum();
    const Mat ds = (a.array() * (da.array().colwise() - row_dot.array())) * scale;
    dq.middleCols(h * dh, dh) = ds * t.k.middleCols(h * dh, dh);
    dk.middleCols(h * dh, dh) = ds.transpose() * t.q.middleCols(h * dh, dh);
  }
  if (g) {
    g->wq.noalias() += t.h1.transpose() * dq;
    g->bq.row(0) += dq.colwise().sum();
    g->wk.noalias() += t.h1.transpose() * dk;
    g->bk.row(0) += dk.colwise().sum();
    g->wv.noalias() += t.h1.transpose() * dv;
    g->bv.row(0) += dv.colwise().sum();
  }
  const Mat dh1 = dq * b.wq.transpose() + dk * b.wk.transpose() + dv * b.wv.transpose();
  dx += layer_norm_backward(dh1, b.ln1_gamma, t.ln1, g ? &g->ln1_gamma : nullptr, g ? &g->ln1_beta : nullptr);
  return dx;
}

}  // namespace

void ModelConfig::validate() const {
  require(n_tokens > 0 && d_in > 0 && emb > 0 && heads > 0 && blocks >= 0 && mlp_ratio > 0 && classes > 0,
          ErrorCode::kInvalidArgument, "model dimensions must be positive");
  require(emb % heads == 0, ErrorCode::kInvalidArgument,
          "embedding width " + std::to_string(emb) + " is not divisible by " + std::to_string(heads) + " heads");
  require(weight_decay >= 0 && std::isfinite(weight_decay), ErrorCode::kInvalidArgument,
          "weight decay must be finite and non-negative");
}

ModelParams zero_params(const ModelConfig& config) {
  config.validate();
  const int e = config.emb, hidden = config.mlp_ratio * config.emb;
  ModelParams p;
  p.config = config;
  p.patch_w = Mat::Zero(config.d_in, e);
  p.patch_b = Mat::Zero(1, e);
  p.pos = Mat::Zero(config.n_tokens, e);
  if (config.pooling == Pooling::kClassToken) p.cls = Mat::Zero(1, e);
  p.blocks.resize(static_cast<std::size_t>(config.blocks));
  for (BlockParams& b : p.blocks) {
    b.ln1_gamma = Mat::Zero(1, e);
    b.ln1_beta = Mat::Zero(1, e);
    b.wq = Mat::Zero(e, e);
    b.bq = Mat::Zero(1, e);
    b.wk = Mat::Zero(e, e);
    b.bk = Mat::Zero(1, e);
    b.wv = Mat::Zero(e, e);
    b.bv = Mat::Zero(1, e);
    b.wo = Mat::Zero(e, e);
    b.bo = Mat::Zero(1, e);
    b.ln2_gamma = Mat::Zero(1, e);
    b.ln2_beta = Mat::Zero(1, e);
    b.w1 = Mat::Zero(e, hidden);
    b.b1 = Mat::Zero(1, hidden);
    b.w2 = Mat::Zero(hidden, e);
    b.b2 = Mat::Zero(1, e);
  }
  p.head_w = Mat::Zero(e, config.classes);
  p.head_b = Mat::Zero(1, config.classes);
  return p;
}

ModelParams init_params(const ModelConfig& config, std::uint64_t seed) {
  ModelParams p = zero_params(config);
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, kInitStd);
  auto truncated = [&] {
    for (;;) {
      const double x = normal(rng);
      if (std::abs(x) <= 2.0 * kInitStd) return x;
    }
  };
  p.visit([&](const std::string& name, Mat& m, bool decayed) {
    if (name.ends_with("gamma")) {
      m.setOnes();
    } else if (name == "pos" || name == "cls") {
      for (double& x : m.reshaped<Eigen::RowMajor>()) x = normal(rng);
    } else if (decayed) {
      for (double& x : m.reshaped<Eigen::RowMajor>()) x = truncated();
    }
  });
  return p;
}

std::int64_t param_count(const ModelConfig& config) {
  config.validate();
  const std::int64_t e = config.emb, hidden = static_cast<std::int64_t>(config.mlp_ratio) * e;
  std::int64_t n = static_cast<std::int64_t>(config.d_in) * e + e;
  n += static_cast<std::int64_t>(config.n_tokens) * e;
  if (config.pooling == Pooling::kClassToken) n += e;
  const std::int64_t per_block = 2 * (2 * e) + 4 * (e * e + e) + (e * hidden + hidden) + (hidden * e + e);
  n += config.blocks * per_block;
  n += e * config.classes + config.classes;
  return n;
}

Mat token_matrix(const ReducedMds& x) {
  const RTensor& t = x.data;
  require(t.rank() == 3, ErrorCode::kShapeMismatch, "reduced MDS must be rank 3");
  const Eigen::Index rows = static_cast<Eigen::Index>(t.dim(0));
  const Eigen::Index cols = static_cast<Eigen::Index>(t.dim(1) * t.dim(2));
  return Eigen::Map<const Mat>(t.data(), rows, cols);
}

RowVec forward(const ModelParams& params, const Mat& x, ForwardTape* tape) {
  const ModelConfig& cfg = params.config;
  require(x.rows() == cfg.n_tokens && x.cols() == cfg.d_in, ErrorCode::kShapeMismatch,
          "input is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) + ", model expects " +
              std::to_string(cfg.n_tokens) + "x" + std::to_string(cfg.d_in));
  ForwardTape local;
  ForwardTape& t = tape ? *tape : local;
  t.input = x;
  Mat tokens = add_row(x * params.patch_w, params.patch_b) + params.pos;
  if (cfg.pooling == Pooling::kClassToken) {
    Mat seq(cfg.n_tokens + 1, cfg.emb);
    seq.row(0) = params.cls.row(0);
    seq.bottomRows(cfg.n_tokens) = tokens;
    tokens = std::move(seq);
  }
  check_finite(tokens, "patch");
  t.blocks.resize(params.blocks.size());
  for (std::size_t l = 0; l < params.blocks.size(); ++l) {
    tokens = block_forward(params.blocks[l], cfg, tokens, t.blocks[l], static_cast<int>(l));
  }
  t.pooled = cfg.pooling == Pooling::kMean ? RowVec(tokens.colwise().mean()) : RowVec(tokens.row(0));
  t.logits = t.pooled * params.head_w + params.head_b.row(0);
  require(t.logits.allFinite(), ErrorCode::kNumeric, "non-finite activation at head");
  t.probs = softmax(t.logits);
  return t.logits;
}

RowVec softmax(const RowVec& logits) {
  RowVec p = (logits.array() - logits.maxCoeff()).exp();
  return p / p.sum();
}

double cross_entropy(const RowVec& logits, int label) {
  require(label >= 0 && label < logits.size(), ErrorCode::kOutOfRange,
          "label " + std::to_string(label) + " outside [0, " + std::to_string(logits.size()) + ")");
  Eigen::Index top = 0;
  const double mx = logits.maxCoeff(&top);
  double tail = 0;
  for (Eigen::Index j = 0; j < logits.size(); ++j) {
    if (j != top) tail += std::exp(logits(j) - mx);
  }
  // log-sum-exp minus the label logit, with log1p keeping tiny tails exact
  return (mx - logits(label)) + std::log1p(tail);
}

double l2_penalty(const ModelParams& params) {
  double sum = 0;
  params.visit([&](const std::string&, const Mat& m, bool decayed) {
    if (decayed || params.config.decay_all) sum += m.squaredNorm();
  });
  return params.config.weight_decay * sum;
}

double loss(const RowVec& logits, int label, const ModelParams& params) {
  return cross_entropy(logits, label) + l2_penalty(params);
}

void backward_from_logits(const ModelParams& params, const ForwardTape& tape, const RowVec& dlogits,
                          ModelParams* grads, std::vector<Mat>* block_output_grads) {
  const ModelConfig& cfg = params.config;
  require(dlogits.size() == cfg.classes, ErrorCode::kShapeMismatch, "logit gradient has the wrong length");
  require(tape.blocks.size() == params.blocks.size(), ErrorCode::kState, "tape does not match the model");
  if (grads) {
    grads->head_w.noalias() += tape.pooled.transpose() * dlogits;
    grads->head_b.row(0) += dlogits;
  }
  const RowVec dpooled = dlogits * params.head_w.transpose();
  const Eigen::Index seq = cfg.sequence_length();
  Mat dtokens = Mat::Zero(seq, cfg.emb);
  if (cfg.pooling == Pooling::kMean) {
    dtokens.rowwise() = dpooled / static_cast<double>(seq);
  } else {
    dtokens.row(0) = dpooled;
  }
  if (block_output_grads) block_output_grads->assign(params.blocks.size(), Mat());
  for (std::size_t l = params.blocks.size(); l-- > 0;) {
    if (block_output_grads) (*block_output_grads)[l] = dtokens;
    dtokens = block_backward(params.blocks[l], cfg, tape.blocks[l], dtokens, grads ? &grads->blocks[l] : nullptr);
  }
  if (!grads) return;
  Mat dpatch = dtokens;
  if (cfg.pooling == Pooling::kClassToken) {
    grads->cls.row(0) += dtokens.row(0);
    dpatch = dtokens.bottomRows(cfg.n_tokens);
  }
  grads->pos += dpatch;
  grads->patch_b.row(0) += dpatch.colwise().sum();
  grads->patch_w.noalias() += tape.input.transpose() * dpatch;
}

void add_l2_gradient(const ModelParams& params, ModelParams& grads) {
  const double two_lambda = 2.0 * params.config.weight_decay;
  if (two_lambda == 0.0) return;
  const auto src = tensors(params);
  const auto dst = tensors(grads);
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (dst[i].decayed || params.config.decay_all) *dst[i].value += two_lambda * *src[i];
  }
}

ModelParams backward(const ForwardTape& tape, int label, const ModelParams& params) {
  require(label >= 0 && label < params.config.classes, ErrorCode::kOutOfRange, "label out of range");
  RowVec d = tape.probs;
  d(label) -= 1.0;
  ModelParams g = zero_params(params.config);
  backward_from_logits(params, tape, d, &g);
  add_l2_gradient(params, g);
  return g;
}

OptState make_opt_state(const ModelParams& params, const AdamHyper& hyper) {
  OptState s;
  s.m = zero_params(params.config);
  s.v = zero_params(params.config);
  s.hyper = hyper;
  return s;
}

void adam_step(ModelParams& params, const ModelParams& grads, OptState& opt) {
  const AdamHyper& h = opt.hyper;
  opt.t += 1;
  const double bc1 = 1.0 - std::pow(h.beta1, static_cast<double>(opt.t));
  const double bc2 = 1.0 - std::pow(h.beta2, static_cast<double>(opt.t));
  auto p = tensors(params);
  const auto g = tensors(grads);
  auto m = tensors(opt.m);
  auto v = tensors(opt.v);
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto pa = p[i].value->array();
    const auto ga = g[i]->array();
    auto ma = m[i].value->array();
    auto va = v[i].value->array();
    ma = h.beta1 * ma + (1.0 - h.beta1) * ga;
    va = h.beta2 * va + (1.0 - h.beta2) * ga.square();
    pa -= h.lr * (ma / bc1) / ((va / bc2).sqrt() + h.eps);
  }
}

int predict(const ModelParams& params, const Mat& x) {
  Eigen::Index k = 0;
  forward(params, x).maxCoeff(&k);
  return static_cast<int>(k);
}

}  // namespace mdslab
