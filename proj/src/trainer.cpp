#include "mdslab/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "mdslab/parallel.hpp"
#include "mdslab/rng.hpp"

namespace mdslab {

std::int64_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t t = 0;
  for (int k = 0; k < classes; ++k) t += at(k, k);
  return t;
}

std::int64_t ConfusionMatrix::row_sum(int truth) const {
  std::int64_t s = 0;
  for (int q = 0; q < classes; ++q) s += at(truth, q);
  return s;
}

std::int64_t ConfusionMatrix::col_sum(int pred) const {
  std::int64_t s = 0;
  for (int p = 0; p < classes; ++p) s += at(p, pred);
  return s;
}

FoldPlan kfold_split(int n, int k_fold, std::uint64_t seed) {
  require(k_fold >= 2, ErrorCode::kInvalidArgument, "K_fold must be at least 2");
  require(n >= k_fold, ErrorCode::kInvalidArgument,
          "cannot split " + std::to_string(n) + " samples into " + std::to_string(k_fold) + " folds");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "kfold"));
  std::shuffle(order.begin(), order.end(), rng);

  FoldPlan plan;
  plan.k_fold = k_fold;
  plan.seed = seed;
  plan.val.resize(static_cast<std::size_t>(k_fold));
  std::size_t pos = 0;
  for (int j = 0; j < k_fold; ++j) {
    const int size = n / k_fold + (j < n % k_fold ? 1 : 0);
    plan.val[j].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                       order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += static_cast<std::size_t>(size);
  }
  plan.train.resize(static_cast<std::size_t>(k_fold));
  for (int j = 0; j < k_fold; ++j) {
    for (int i = 0; i < k_fold; ++i) {
      if (i != j) plan.train[j].insert(plan.train[j].end(), plan.val[i].begin(), plan.val[i].end());
    }
  }
  return plan;
}

EvalResult evaluate_predictions(std::span<const int> truth, std::span<const int> predicted, int classes) {
  require(!truth.empty(), ErrorCode::kInvalidArgument, "evaluation set is empty");
  require(truth.size() == predicted.size(), ErrorCode::kShapeMismatch, "truth and prediction counts differ");
  require(classes >= 1, ErrorCode::kInvalidArgument, "class count must be positive");
  EvalResult r;
  r.confusion = ConfusionMatrix(classes);
  std::int64_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    require(truth[i] >= 0 && truth[i] < classes && predicted[i] >= 0 && predicted[i] < classes,
            ErrorCode::kOutOfRange, "class index out of range at sample " + std::to_string(i));
    r.confusion.at(truth[i], predicted[i]) += 1;
    correct += truth[i] == predicted[i] ? 1 : 0;
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  const std::int64_t total = r.confusion.total();
  r.per_class.resize(static_cast<std::size_t>(classes));
  for (int k = 0; k < classes; ++k) {
    ClassCounts& c = r.per_class[k];
    c.tp = r.confusion.at(k, k);
    c.fp = r.confusion.col_sum(k) - c.tp;
    c.fn = r.confusion.row_sum(k) - c.tp;
    c.tn = total - c.tp - c.fp - c.fn;
  }
  return r;
}

EvalResult evaluate(const ModelParams& params, std::span<const Sample> test_set) {
  require(!test_set.empty(), ErrorCode::kInvalidArgument, "evaluation set is empty");
  std::vector<int> truth, pred;
  for (const Sample& s : test_set) {
    truth.push_back(s.label);
    pred.push_back(predict(params, s.x));
  }
  return evaluate_predictions(truth, pred, params.config.classes);
}

FoldResult train_fold(std::span<const Sample> dataset, const std::vector<int>& train_idx,
                      const std::vector<int>& val_idx, const ModelConfig& config, const TrainHyper& hyper,
                      std::uint64_t seed, ModelParams* params_out) {
  require(hyper.batch >= 1, ErrorCode::kInvalidArgument, "batch size must be positive");
  require(hyper.epochs >= 0, ErrorCode::kInvalidArgument, "epoch count must be non-negative");
  require(!train_idx.empty() && !val_idx.empty(), ErrorCode::kInvalidArgument, "fold has an empty split");
  require(hyper.batch <= static_cast<int>(train_idx.size()), ErrorCode::kInvalidArgument,
          "batch size exceeds the fold's training set");

  ModelParams params = init_params(config, derive_seed(seed, "init"));
  OptState opt = make_opt_state(params, hyper.adam);
  Rng shuffle_rng(derive_seed(seed, "shuffle"));
  std::vector<int> order = train_idx;
  FoldResult result;
  ForwardTape tape;
  ModelParams grads = zero_params(config);

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(hyper.batch)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(hyper.batch));
      const double inv_b = 1.0 / static_cast<double>(end - start);
      grads.visit([](const std::string&, Mat& m, bool) { m.setZero(); });
      double ce = 0;
      for (std::size_t i = start; i < end; ++i) {
        const Sample& s = dataset[static_cast<std::size_t>(order[i])];
        forward(params, s.x, &tape);
        ce += cross_entropy(tape.logits, s.label);
        RowVec d = tape.probs;
        d(s.label) -= 1.0;
        backward_from_logits(params, tape, d * inv_b, &grads);
      }
      const double batch_loss = ce * inv_b + l2_penalty(params);
      if (!std::isfinite(batch_loss)) {
        std::ostringstream os;
        os << "training diverged: non-finite loss at epoch " << epoch << ", batch " << batches;
        fail(ErrorCode::kNumeric, os.str());
      }
      add_l2_gradient(params, grads);
      adam_step(params, grads, opt);
      loss_sum += batch_loss;
      ++batches;
    }
    result.epoch_loss.push_back(loss_sum / batches);
  }

  std::vector<int> truth, pred;
  for (int i : val_idx) {
    const Sample& s = dataset[static_cast<std::size_t>(i)];
    truth.push_back(s.label);
    pred.push_back(predict(params, s.x));
  }
  result.eval = evaluate_predictions(truth, pred, config.classes);
  result.accuracy = result.eval.accuracy;
  if (params_out) *params_out = std::move(params);
  return result;
}

TrainReport run_cv(std::span<const Sample> dataset, const ModelConfig& config, const TrainHyper& hyper,
                   int k_fold, std::uint64_t seed) {
  config.validate();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    require(dataset[i].label >= 0 && dataset[i].label < config.classes, ErrorCode::kOutOfRange,
            "sample " + std::to_string(i) + " has an out-of-range label");
  }
  const FoldPlan plan = kfold_split(static_cast<int>(dataset.size()), k_fold, seed);
  std::vector<FoldResult> folds(static_cast<std::size_t>(k_fold));
  std::vector<ModelParams> fold_params(static_cast<std::size_t>(k_fold));
  parallel_for(static_cast<std::size_t>(k_fold), [&](std::size_t j) {
    try {
      folds[j] = train_fold(dataset, plan.train[j], plan.val[j], config, hyper,
                            derive_seed(seed, "fold", j), &fold_params[j]);
    } catch (const Error& e) {
      fail(e.code(), "fold " + std::to_string(j) + ": " + e.what());
    }
  });

  TrainReport report;
  report.parameters = param_count(config);
  double sum = 0;
  // A fold replaces the stored model only when it strictly beats the running best,
  // which starts at 0; fold 0 stands in when every fold scores 0.
  report.best_fold = 0;
  for (int j = 0; j < k_fold; ++j) {
    sum += folds[j].accuracy;
    if (folds[j].accuracy > report.acc_best) {
      report.acc_best = folds[j].accuracy;
      report.best_fold = j;
    }
  }
  report.acc_avg = sum / k_fold;
  report.best_params = std::move(fold_params[static_cast<std::size_t>(report.best_fold)]);
  report.folds = std::move(folds);
  return report;
}

}  // namespace mdslab
