#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdslab/mds_gen.hpp"
#include "mdslab/nn_core.hpp"
#include "mdslab/rva_pipeline.hpp"
#include "mdslab/scene_sim.hpp"
#include "mdslab/trainer.hpp"

namespace mdslab {

struct DatasetConfig {
  int samples = 60;
  double noise_sigma = 1.0;
};

struct TrainConfig {
  TrainHyper hyper{AdamHyper{}, 8, 50};
  int k_fold = 5;
  std::uint64_t seed = 1;  // root of every random stream in a run
};

// Everything a CLI run needs. model.n_tokens, model.d_in and model.classes are
// derived from the pipeline, STFT and class templates by resolve().
struct RunConfig {
  RadarConfig radar;
  PipelineParams pipeline;
  int stft_overlap = 125;
  int stft_n_fft = 128;
  NormMode norm = NormMode::kLog1pMinMax;
  ModelConfig model;
  TrainConfig train;
  DatasetConfig dataset;

  StftParams stft() const;
  // Fills the derived model fields; throws kInvalidArgument on any
  // cross-section inconsistency.
  void resolve();
};

// Keys look like "radar.chirps"; see config_keys() for the full list.
std::vector<std::string> config_keys();
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& config, const std::string& key);

// "key = value" lines, '#' starts a comment. Unknown keys and malformed values
// are kParse errors naming the line; the result is resolved.
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
// "default" (or empty) yields the built-in configuration.
RunConfig load_config(const std::string& path);
std::string format_config(const RunConfig& config);

// Compact configuration used by selftest: 32 chirps, 32 samples per chirp.
RunConfig small_config();

// Shortest text that parses back to the same double.
std::string format_double(double v);

}  // namespace mdslab
