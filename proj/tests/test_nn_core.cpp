#include <cmath>

#include "doctest.h"
#include "gradcheck.hpp"
#include "mdslab/nn_core.hpp"

using namespace mdslab;

namespace {

ModelConfig tiny(Pooling pooling = Pooling::kMean) {
  ModelConfig c;
  c.n_tokens = 5;
  c.d_in = 12;
  c.emb = 8;
  c.heads = 2;
  c.blocks = 2;
  c.mlp_ratio = 2;
  c.classes = 3;
  c.pooling = pooling;
  return c;
}

}  // namespace

TEST_SUITE("nn_core") {

TEST_CASE("L2 term arithmetic") {
  ModelConfig c = tiny();
  ModelParams p = zero_params(c);
  p.head_w(0, 0) = 3;
  p.head_w(1, 2) = -4;
  CHECK(l2_penalty(p) == doctest::Approx(0.25));
  ModelParams g = zero_params(c);
  add_l2_gradient(p, g);
  CHECK(g.head_w(0, 0) == doctest::Approx(0.06));
  CHECK(g.head_w(1, 2) == doctest::Approx(-0.08));
}

TEST_CASE("decay_all=false leaves biases and LayerNorm out") {
  ModelConfig c = tiny();
  c.decay_all = false;
  ModelParams p = zero_params(c);
  p.head_b(0, 0) = 10;
  p.blocks[0].ln1_gamma(0, 0) = 10;
  CHECK(l2_penalty(p) == 0.0);
  p.blocks[0].wq(0, 0) = 2;
  CHECK(l2_penalty(p) == doctest::Approx(0.04));
}

TEST_CASE("softmax and cross entropy are stable") {
  RowVec z(3);
  z << 1000, 999, -1000;
  const RowVec s = softmax(z);
  CHECK(s.sum() == doctest::Approx(1.0));
  CHECK(cross_entropy(z, 0) == doctest::Approx(std::log1p(std::exp(-1.0))));
  CHECK(std::isfinite(cross_entropy(z, 2)));
  CHECK(cross_entropy(z, 2) == doctest::Approx(2000 + std::log1p(std::exp(-1.0))));
}

TEST_CASE("finite differences agree with backprop") {
  for (Pooling pooling : {Pooling::kMean, Pooling::kClassToken}) {
    for (bool decay_all : {true, false}) {
      ModelConfig c = tiny(pooling);
      c.decay_all = decay_all;
      ModelParams p = gradcheck::jittered(c, 17);
      const Mat x = gradcheck::random_input(c.n_tokens, c.d_in, 18);
      const auto r = gradcheck::check_all(p, x, 2);
      INFO("worst at " << r.where);
      CHECK(r.worst < 1e-5);
      CHECK(r.checked == static_cast<std::size_t>(param_count(c)));
    }
  }
}

TEST_CASE("adam first step moves each entry by about lr against the gradient sign") {
  ModelConfig c = tiny();
  ModelParams p = init_params(c, 1);
  const ModelParams before = p;
  ModelParams g = zero_params(c);
  g.head_w.setConstant(0.5);
  g.head_b.setConstant(-2.0);
  OptState opt = make_opt_state(p, AdamHyper{});
  adam_step(p, g, opt);
  const double step = 1e-3 * 0.5 / (0.5 + 1e-8);
  CHECK((before.head_w - p.head_w).cwiseAbs().maxCoeff() == doctest::Approx(step).epsilon(1e-9));
  CHECK((p.head_b - before.head_b).minCoeff() == doctest::Approx(1e-3 * 2.0 / (2.0 + 1e-8)).epsilon(1e-9));
  CHECK(p.patch_w == before.patch_w);
}

TEST_CASE("zero gradient leaves params fixed and decays moments") {
  ModelConfig c = tiny();
  ModelParams p = init_params(c, 2);
  ModelParams g = zero_params(c);
  g.head_w.setConstant(1.0);
  OptState opt = make_opt_state(p, AdamHyper{});
  adam_step(p, g, opt);
  const ModelParams after_one = p;
  const double m1 = opt.m.head_w(0, 0);
  adam_step(p, zero_params(c), opt);
  CHECK(opt.m.head_w(0, 0) == doctest::Approx(0.9 * m1));
  CHECK(p.patch_w == after_one.patch_w);
}

TEST_CASE("adam on phi^2 matches a scalar simulation and shrinks |phi|") {
  ModelConfig c = tiny();
  ModelParams p = zero_params(c);
  p.head_b(0, 0) = 1.0;
  AdamHyper h;
  h.lr = 0.1;
  OptState opt = make_opt_state(p, h);
  double phi = 1.0, m = 0, v = 0;
  double prev = 1.0;
  for (int t = 1; t <= 10; ++t) {
    ModelParams g = zero_params(c);
    g.head_b(0, 0) = 2 * p.head_b(0, 0);
    adam_step(p, g, opt);
    const double gs = 2 * phi;
    m = 0.9 * m + 0.1 * gs;
    v = 0.999 * v + 0.001 * gs * gs;
    phi -= 0.1 * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.999, t))) + 1e-8);
    CHECK(p.head_b(0, 0) == doctest::Approx(phi).epsilon(1e-12));
    CHECK(std::abs(p.head_b(0, 0)) < prev);
    prev = std::abs(p.head_b(0, 0));
  }
}

TEST_CASE("init is deterministic with truncated weights and unit gamma") {
  const ModelConfig c = tiny();
  const ModelParams a = init_params(c, 5), b = init_params(c, 5), d = init_params(c, 6);
  CHECK(a.patch_w == b.patch_w);
  CHECK_FALSE(a.patch_w == d.patch_w);
  CHECK(a.patch_w.cwiseAbs().maxCoeff() <= 0.04);
  CHECK(a.blocks[1].ln2_gamma.minCoeff() == 1.0);
  CHECK(a.head_b.cwiseAbs().maxCoeff() == 0.0);
  std::int64_t n = 0;
  a.visit([&](const std::string&, const Mat& m, bool) { n += m.size(); });
  CHECK(n == param_count(c));
}

TEST_CASE("non-finite input is reported") {
  const ModelConfig c = tiny();
  const ModelParams p = init_params(c, 1);
  Mat x = Mat::Zero(c.n_tokens, c.d_in);
  x(1, 1) = NAN;
  try {
    forward(p, x);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNumeric);
  }
  CHECK_THROWS_AS(forward(p, Mat::Zero(3, c.d_in)), Error);
}

TEST_CASE("invalid model configs are rejected") {
  ModelConfig c = tiny();
  c.heads = 3;
  CHECK_THROWS_AS(c.validate(), Error);
}

}  // TEST_SUITE
