#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "mdslab/nn_core.hpp"
#include "mdslab/rng.hpp"

namespace gradcheck {

struct Result {
  double worst = 0;  // largest relative error over all checked entries
  std::string where;
  std::size_t checked = 0;
};

// Central differences, h = 1e-5. The relative error denominator is floored at
// 1e-5 so entries with near-zero gradient are judged on absolute error.
inline Result check_all(mdslab::ModelParams& p, const mdslab::Mat& x, int label, double h = 1e-5,
                        double floor = 1e-5) {
  mdslab::ForwardTape tape;
  mdslab::forward(p, x, &tape);
  const mdslab::ModelParams g = mdslab::backward(tape, label, p);
  std::vector<const mdslab::Mat*> grads;
  g.visit([&](const std::string&, const mdslab::Mat& m, bool) { grads.push_back(&m); });
  Result r;
  std::size_t t = 0;
  p.visit([&](const std::string& name, mdslab::Mat& m, bool) {
    const mdslab::Mat& gm = *grads[t++];
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double keep = m.data()[i];
      m.data()[i] = keep + h;
      const double up = mdslab::loss(mdslab::forward(p, x), label, p);
      m.data()[i] = keep - h;
      const double down = mdslab::loss(mdslab::forward(p, x), label, p);
      m.data()[i] = keep;
      const double fd = (up - down) / (2 * h);
      const double a = gm.data()[i];
      const double rel = std::abs(fd - a) / std::max({std::abs(fd), std::abs(a), floor});
      ++r.checked;
      if (rel > r.worst) {
        r.worst = rel;
        r.where = name + "[" + std::to_string(i) + "]";
      }
    }
  });
  return r;
}

// Initialized model with every entry nudged by N(0, scale) so no gradient is
// structurally zero.
inline mdslab::ModelParams jittered(const mdslab::ModelConfig& c, std::uint64_t seed, double scale = 0.2) {
  mdslab::ModelParams p = mdslab::init_params(c, seed);
  mdslab::Rng rng(mdslab::derive_seed(seed, "jitter"));
  std::normal_distribution<double> g(0.0, scale);
  p.visit([&](const std::string&, mdslab::Mat& m, bool) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] += g(rng);
  });
  return p;
}

inline mdslab::Mat random_input(int rows, int cols, std::uint64_t seed) {
  mdslab::Rng rng(mdslab::derive_seed(seed, "input"));
  std::normal_distribution<double> g;
  mdslab::Mat x(rows, cols);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
  return x;
}

}  // namespace gradcheck
