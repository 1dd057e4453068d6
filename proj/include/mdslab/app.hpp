#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdslab/config.hpp"

namespace mdslab {

// Stage drivers behind the CLI. Each reads the previous stage's directory and
// writes its own; every file is written atomically.
//
//   simulate: labels.csv, scenes/<sample>.scene, adc/<sample>.tensor
//   process:  labels.csv, centroids/<sample>.csv, bbox/<sample>.tensor
//   mds:      labels.csv, reduced/<sample>.tensor, preview/<sample>.pgm
//   train:    model.ckpt, report.txt, loss_trace.csv
//   eval:     metrics.csv, confusion.csv, predictions.csv
//   explain:  <sample>_{mds,relevance}.pgm, <sample>_overlay.ppm, <sample>_relevance.csv, explain.csv
//
// Random streams: dataset = derive_seed(train.seed, "dataset"),
// cross-validation = derive_seed(train.seed, "cv").
void run_simulate(const RunConfig& config, const std::string& out_dir);
void run_process(const RunConfig& config, const std::string& in_dir, const std::string& out_dir);
void run_mds(const RunConfig& config, const std::string& in_dir, const std::string& out_dir);
TrainReport run_train(const RunConfig& config, const std::string& in_dir, const std::string& out_dir);
EvalResult run_eval(const RunConfig& config, const std::string& in_dir, const std::string& checkpoint,
                    const std::string& out_dir);
// target_class < 0 explains the predicted class; block 0 selects the last block.
void run_explain(const RunConfig& config, const std::string& in_dir, const std::string& checkpoint,
                 int target_class, int block, const std::string& out_dir);

struct DatasetItem {
  Sample sample;
  ReducedMds reduced;
  std::vector<double> bin_energy;  // sum of |S|^2 per range-angle bin, before normalization
  Centroid centroid;
};

// simulate -> process -> mds in memory, with the same seeds and stages as the
// CLI (ADC samples are not rounded to float32 here).
std::vector<DatasetItem> build_dataset(const RunConfig& config, std::uint64_t dataset_seed, int n_samples);

std::string format_axes(const AxisSpec& axes);

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Oracle spot checks plus a compact simulate-to-explain run under out_dir.
// Output depends only on seed.
std::vector<SelftestCheck> run_selftest(std::uint64_t seed, const std::string& out_dir);

}  // namespace mdslab
