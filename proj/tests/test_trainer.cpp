#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "mdslab/parallel.hpp"
#include "mdslab/rng.hpp"
#include "mdslab/trainer.hpp"

using namespace mdslab;

namespace {

// Two classes of one-bin-by-two crops holding a tone at bin 1 or bin 5 plus
// noise, pushed through the STFT and reduction like real data.
std::vector<Sample> two_tone_set(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, 0.3);
  std::vector<Sample> out;
  const StftParams sp{8, 2, 8};
  for (int i = 0; i < n; ++i) {
    const int label = i % 2;
    const int bin = label ? 5 : 1;
    CTensor bbox({1, 2, 22});
    for (std::size_t j = 0; j < 2; ++j) {
      for (std::size_t t = 0; t < 22; ++t) {
        bbox(0, j, t) = std::polar(1.0, 2 * M_PI * bin * double(t) / 8) + Complex(g(rng), g(rng));
      }
    }
    out.push_back({token_matrix(reduce_dim(build_mds(bbox, sp))), label});
  }
  return out;
}

ModelConfig toy_model() {
  ModelConfig c;
  c.n_tokens = 2;
  c.d_in = 64;
  c.emb = 16;
  c.heads = 2;
  c.blocks = 1;
  c.mlp_ratio = 2;
  c.classes = 2;
  return c;
}

}  // namespace

TEST_SUITE("trainer") {

TEST_CASE("k-fold split is a balanced partition") {
  for (int n : {10, 11, 60, 61}) {
    for (int k : {2, 3, 5}) {
      const FoldPlan p = kfold_split(n, k, 77);
      std::multiset<int> all;
      std::size_t lo = n, hi = 0;
      for (int j = 0; j < k; ++j) {
        all.insert(p.val[j].begin(), p.val[j].end());
        lo = std::min(lo, p.val[j].size());
        hi = std::max(hi, p.val[j].size());
        CHECK(p.train[j].size() + p.val[j].size() == static_cast<std::size_t>(n));
        std::set<int> tr(p.train[j].begin(), p.train[j].end());
        for (int v : p.val[j]) CHECK(tr.count(v) == 0);
      }
      CHECK(all.size() == static_cast<std::size_t>(n));
      CHECK(std::set<int>(all.begin(), all.end()).size() == static_cast<std::size_t>(n));
      CHECK(hi - lo <= 1);
    }
  }
  CHECK_THROWS_AS(kfold_split(3, 5, 1), Error);
  CHECK_THROWS_AS(kfold_split(10, 1, 1), Error);
}

TEST_CASE("confusion matrix identities") {
  Rng rng(4);
  std::uniform_int_distribution<int> cls(0, 3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> t(50), p(50);
    for (int i = 0; i < 50; ++i) t[i] = cls(rng), p[i] = cls(rng);
    const EvalResult r = evaluate_predictions(t, p, 4);
    const auto& cm = r.confusion;
    CHECK(cm.total() == 50);
    int correct = 0;
    for (int i = 0; i < 50; ++i) correct += t[i] == p[i];
    CHECK(cm.trace() == correct);
    CHECK(r.accuracy == static_cast<double>(correct) / 50);
    for (int k = 0; k < 4; ++k) {
      const ClassCounts& c = r.per_class[k];
      CHECK(c.tp + c.fn == std::count(t.begin(), t.end(), k));
      CHECK(c.tp + c.fp == std::count(p.begin(), p.end(), k));
      CHECK(c.tp + c.fp + c.fn + c.tn == 50);
    }
  }
  const std::vector<int> bad = {0, 9};
  CHECK_THROWS_AS(evaluate_predictions(bad, bad, 3), Error);
}

TEST_CASE("separable two-tone set is learned perfectly") {
  const auto data = two_tone_set(24, 8);
  TrainHyper h;
  h.epochs = 30;
  h.batch = 4;
  const TrainReport r = run_cv(data, toy_model(), h, 3, 21);
  CHECK(r.acc_avg == 1.0);
  CHECK(r.acc_best == 1.0);
  for (const FoldResult& f : r.folds) {
    const double lead = std::accumulate(f.epoch_loss.begin(), f.epoch_loss.begin() + 10, 0.0) / 10;
    const double trail = std::accumulate(f.epoch_loss.end() - 10, f.epoch_loss.end(), 0.0) / 10;
    CHECK(trail < lead);
  }
}

TEST_CASE("untrained models score near chance") {
  const auto data = two_tone_set(24, 9);
  TrainHyper h;
  h.epochs = 0;
  h.batch = 4;
  double sum = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) sum += run_cv(data, toy_model(), h, 3, seed).acc_avg;
  // 20 seeds x 24 predictions; 3 binomial standard errors is about 0.07.
  CHECK(std::abs(sum / 20 - 0.5) < 0.15);
}

TEST_CASE("same seed, same report, regardless of thread count") {
  const auto data = two_tone_set(12, 10);
  TrainHyper h;
  h.epochs = 3;
  h.batch = 3;
  set_thread_count(1);
  const TrainReport a = run_cv(data, toy_model(), h, 3, 5);
  set_thread_count(3);
  const TrainReport b = run_cv(data, toy_model(), h, 3, 5);
  set_thread_count(0);
  CHECK(a.acc_avg == b.acc_avg);
  CHECK(a.best_fold == b.best_fold);
  for (std::size_t j = 0; j < a.folds.size(); ++j) CHECK(a.folds[j].epoch_loss == b.folds[j].epoch_loss);
  CHECK(a.best_params.patch_w == b.best_params.patch_w);
}

TEST_CASE("batch larger than the fold's training set is rejected") {
  const auto data = two_tone_set(6, 11);
  TrainHyper h;
  h.batch = 5;
  CHECK_THROWS_AS(run_cv(data, toy_model(), h, 3, 1), Error);
}

TEST_CASE("partial last batch is kept") {
  const auto data = two_tone_set(10, 12);
  TrainHyper h;
  h.epochs = 1;
  h.batch = 4;  // 5 training samples per fold at K=2: batches of 4 and 1
  std::vector<int> tr = {0, 1, 2, 3, 4}, va = {5, 6, 7, 8, 9};
  ModelParams a, b;
  train_fold(data, tr, va, toy_model(), h, 3, &a);
  h.batch = 5;
  train_fold(data, tr, va, toy_model(), h, 3, &b);
  CHECK_FALSE(a.patch_w == b.patch_w);  // two updates versus one
}

}  // TEST_SUITE
