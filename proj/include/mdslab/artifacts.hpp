#pragma once

#include <string>
#include <vector>

#include "mdslab/rva_pipeline.hpp"
#include "mdslab/scene_sim.hpp"
#include "mdslab/trainer.hpp"
#include "mdslab/xai.hpp"

namespace mdslab {

// Scene text file: one "key = value" per line, scatterers as bracketed lists
// [range_offset, angle_offset, amplitude, micro_freq, micro_amp, micro_phase].
std::string format_scene(const Scene& scene);
Scene parse_scene(const std::string& text, const std::string& origin = "<scene>");
void write_scene(const std::string& path, const Scene& scene);
Scene read_scene(const std::string& path);

// Checkpoint container: tensor "config" (i64 hyperparameters), "weight_decay"
// (f64), then every parameter under its visit() name.
void write_checkpoint(const std::string& path, const ModelParams& params);
ModelParams read_checkpoint(const std::string& path);

// CSV exports; all written atomically.
void write_centroids_csv(const std::string& path, const std::vector<Centroid>& centroids);
void write_confusion_csv(const std::string& path, const ConfusionMatrix& cm);
void write_metrics_csv(const std::string& path, const EvalResult& eval);
void write_loss_trace_csv(const std::string& path, const TrainReport& report);
void write_relevance_csv(const std::string& path, const RelevanceMap& map, const std::vector<double>& energy);
void write_train_report(const std::string& path, const TrainReport& report);

struct LabelRow {
  std::string sample;  // file stem, e.g. sample_0003
  int class_id = 0;
};

void write_labels_csv(const std::string& path, const std::vector<LabelRow>& rows,
                      const std::vector<std::string>& class_names);
std::vector<LabelRow> read_labels_csv(const std::string& path);

}  // namespace mdslab
