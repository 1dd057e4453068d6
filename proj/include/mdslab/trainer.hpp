#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mdslab/nn_core.hpp"

namespace mdslab {

struct FoldPlan {
  int k_fold = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<int>> val;    // fold j validation indices
  std::vector<std::vector<int>> train;  // union of the other folds
};

// Shuffled partition; the first n % K folds get one extra sample.
FoldPlan kfold_split(int n, int k_fold, std::uint64_t seed);

struct Sample {
  Mat x;  // [n_tokens, d_in]
  int label = 0;
};

struct TrainHyper {
  AdamHyper adam;
  int batch = 8;
  int epochs = 40;
};

struct ConfusionMatrix {
  int classes = 0;
  std::vector<std::int64_t> counts;  // row = true class, column = predicted

  explicit ConfusionMatrix(int k = 0) : classes(k), counts(static_cast<std::size_t>(k) * k, 0) {}
  std::int64_t& at(int truth, int pred) { return counts[static_cast<std::size_t>(truth) * classes + pred]; }
  std::int64_t at(int truth, int pred) const { return counts[static_cast<std::size_t>(truth) * classes + pred]; }
  std::int64_t total() const;
  std::int64_t trace() const;
  std::int64_t row_sum(int truth) const;
  std::int64_t col_sum(int pred) const;
};

struct ClassCounts {
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct EvalResult {
  double accuracy = 0;
  ConfusionMatrix confusion;
  std::vector<ClassCounts> per_class;
};

// Metrics from (truth, prediction) pairs.
EvalResult evaluate_predictions(std::span<const int> truth, std::span<const int> predicted, int classes);

EvalResult evaluate(const ModelParams& params, std::span<const Sample> test_set);

struct FoldResult {
  double accuracy = 0;
  std::vector<double> epoch_loss;  // mean batch loss per epoch
  EvalResult eval;
};

struct TrainReport {
  std::vector<FoldResult> folds;
  double acc_avg = 0;
  double acc_best = 0;
  int best_fold = -1;
  ModelParams best_params;
  std::int64_t parameters = 0;
};

// Trains one fold from a fold-derived seed; exposed for callers that want a
// single split.
FoldResult train_fold(std::span<const Sample> dataset, const std::vector<int>& train_idx,
                      const std::vector<int>& val_idx, const ModelConfig& config, const TrainHyper& hyper,
                      std::uint64_t seed, ModelParams* params_out);

// K-fold cross-validation with best-by-validation-accuracy model selection.
// Folds may run on parallel workers; results are identical either way.
TrainReport run_cv(std::span<const Sample> dataset, const ModelConfig& config, const TrainHyper& hyper,
                   int k_fold, std::uint64_t seed);

}  // namespace mdslab
