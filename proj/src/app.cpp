#include "mdslab/app.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "mdslab/artifacts.hpp"
#include "mdslab/fft.hpp"
#include "mdslab/fs_util.hpp"
#include "mdslab/image_io.hpp"
#include "mdslab/parallel.hpp"
#include "mdslab/rng.hpp"
#include "mdslab/tensor_io.hpp"
#include "mdslab/xai.hpp"

namespace mdslab {

namespace {

namespace fs = std::filesystem;

std::string join_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::string sample_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "sample_%04zu", i);
  return buf;
}

std::vector<std::string> class_names() {
  std::vector<std::string> names;
  for (const ClassTemplate& t : default_class_templates()) names.push_back(t.name);
  return names;
}

void copy_labels(const std::string& in_dir, const std::string& out_dir) {
  write_file_atomic(join_path(out_dir, "labels.csv"), read_file(join_path(in_dir, "labels.csv")));
}

CTensor pack_cube(const AdcCube& cube) {
  const Shape& f = cube.frames.at(0).shape();
  CTensor out({cube.frames.size(), f[0], f[1], f[2], f[3]});
  const std::size_t n = cube.frames[0].size();
  for (std::size_t k = 0; k < cube.frames.size(); ++k) {
    std::copy(cube.frames[k].data(), cube.frames[k].data() + n, out.data() + k * n);
  }
  return out;
}

AdcCube unpack_cube(const CTensor& t) {
  AdcCube cube;
  const Shape frame_shape(t.shape().begin() + 1, t.shape().end());
  const std::size_t n = shape_elements(frame_shape);
  for (std::size_t k = 0; k < t.dim(0); ++k) {
    cube.frames.emplace_back(frame_shape, std::vector<Complex>(t.data() + k * n, t.data() + (k + 1) * n));
  }
  return cube;
}

Sample load_reduced(const std::string& path, int label, ReducedMds* keep = nullptr) {
  const Container box = read_container(path);
  const std::vector<std::int64_t> grid = box.ints("grid");
  require(grid.size() == 2, ErrorCode::kShapeMismatch, "'" + path + "': grid must hold 2 values");
  ReducedMds r;
  r.data = box.real("mds");
  r.n_res_s = static_cast<int>(grid[0]);
  r.n_res_theta = static_cast<int>(grid[1]);
  require(r.data.rank() == 3 && r.data.dim(0) == static_cast<std::size_t>(r.bins()), ErrorCode::kShapeMismatch,
          "'" + path + "': mds tensor does not match its grid");
  Sample s{token_matrix(r), label};
  if (keep) *keep = std::move(r);
  return s;
}

std::vector<double> token_energy(const Mat& x) {
  std::vector<double> e(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index t = 0; t < x.rows(); ++t) e[t] = x.row(t).squaredNorm();
  return e;
}

void check_model_matches(const ModelParams& params, const Mat& x, const std::string& sample) {
  require(x.rows() == params.config.n_tokens && x.cols() == params.config.d_in, ErrorCode::kShapeMismatch,
          sample + ": token matrix " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
              " does not fit the checkpoint's " + std::to_string(params.config.n_tokens) + "x" +
              std::to_string(params.config.d_in));
}

}  // namespace

void run_simulate(const RunConfig& config, const std::string& out_dir) {
  const std::vector<LabeledScene> scenes =
      sample_scenes(config.radar, default_class_templates(), config.dataset.samples,
                    derive_seed(config.train.seed, "dataset"), config.dataset.noise_sigma);
  std::vector<LabelRow> labels(scenes.size());
  parallel_for(scenes.size(), [&](std::size_t i) {
    const std::string name = sample_name(i);
    write_scene(join_path(out_dir, "scenes/" + name + ".scene"), scenes[i].scene);
    write_tensor(join_path(out_dir, "adc/" + name + ".tensor"), pack_cube(synth_adc(config.radar, scenes[i].scene)),
                 {"frame", "fast_time", "chirp", "tx", "rx"});
    labels[i] = {name, scenes[i].class_id};
  });
  write_labels_csv(join_path(out_dir, "labels.csv"), labels, class_names());
  write_file_atomic(join_path(out_dir, "config.txt"), format_config(config));
}

void run_process(const RunConfig& config, const std::string& in_dir, const std::string& out_dir) {
  const std::vector<LabelRow> labels = read_labels_csv(join_path(in_dir, "labels.csv"));
  const RadarConfig& rc = config.radar;
  const Shape expected{static_cast<std::size_t>(rc.frames), static_cast<std::size_t>(rc.samples_per_chirp()),
                       static_cast<std::size_t>(rc.chirps), static_cast<std::size_t>(rc.n_tx),
                       static_cast<std::size_t>(rc.n_rx)};
  parallel_for(labels.size(), [&](std::size_t i) {
    const std::string& name = labels[i].sample;
    const CTensor adc = read_container(join_path(in_dir, "adc/" + name + ".tensor")).complex("data", expected);
    const PipelineResult res = run_pipeline(rc, unpack_cube(adc), config.pipeline, 1);
    write_centroids_csv(join_path(out_dir, "centroids/" + name + ".csv"), res.centroids);
    const TargetCrop& crop = res.crops.at(0);
    Container box;
    box.add("bbox", crop.bbox, {"range", "angle", "slow_time"});
    box.add("centroid", {crop.centroid.k_r, crop.centroid.k_v, crop.centroid.k_theta}, {3}, {"bin"});
    write_container(join_path(out_dir, "bbox/" + name + ".tensor"), box);
  });
  copy_labels(in_dir, out_dir);
}

void run_mds(const RunConfig& config, const std::string& in_dir, const std::string& out_dir) {
  const std::vector<LabelRow> labels = read_labels_csv(join_path(in_dir, "labels.csv"));
  const StftParams sp = config.stft();
  const std::size_t n_time = static_cast<std::size_t>(config.radar.chirps) * config.radar.frames;
  const Shape expected{static_cast<std::size_t>(config.pipeline.n_res_s),
                       static_cast<std::size_t>(config.pipeline.n_res_theta), n_time};
  parallel_for(labels.size(), [&](std::size_t i) {
    const std::string& name = labels[i].sample;
    const CTensor bbox = read_container(join_path(in_dir, "bbox/" + name + ".tensor")).complex("bbox", expected);
    const ReducedMds r = reduce_dim(build_mds(bbox, sp), config.norm);
    Container box;
    box.add("mds", r.data, {"bin", "freq", "frame"});
    box.add("grid", {r.n_res_s, r.n_res_theta}, {2}, {"dim"});
    write_container(join_path(out_dir, "reduced/" + name + ".tensor"), box);
    write_pgm(join_path(out_dir, "preview/" + name + ".pgm"), to_gray(summed_mds_image(r)));
  });
  copy_labels(in_dir, out_dir);
}

TrainReport run_train(const RunConfig& config, const std::string& in_dir, const std::string& out_dir) {
  const std::vector<LabelRow> labels = read_labels_csv(join_path(in_dir, "labels.csv"));
  std::vector<Sample> data(labels.size());
  parallel_for(labels.size(), [&](std::size_t i) {
    data[i] = load_reduced(join_path(in_dir, "reduced/" + labels[i].sample + ".tensor"), labels[i].class_id);
    check_model_matches(zero_params(config.model), data[i].x, labels[i].sample);
  });
  TrainReport report =
      run_cv(data, config.model, config.train.hyper, config.train.k_fold, derive_seed(config.train.seed, "cv"));
  write_checkpoint(join_path(out_dir, "model.ckpt"), report.best_params);
  write_train_report(join_path(out_dir, "report.txt"), report);
  write_loss_trace_csv(join_path(out_dir, "loss_trace.csv"), report);
  write_file_atomic(join_path(out_dir, "config.txt"), format_config(config));
  return report;
}

EvalResult run_eval(const RunConfig& /*config*/, const std::string& in_dir, const std::string& checkpoint,
                    const std::string& out_dir) {
  const ModelParams params = read_checkpoint(checkpoint);
  const std::vector<LabelRow> labels = read_labels_csv(join_path(in_dir, "labels.csv"));
  std::vector<int> truth(labels.size()), pred(labels.size());
  parallel_for(labels.size(), [&](std::size_t i) {
    const Sample s = load_reduced(join_path(in_dir, "reduced/" + labels[i].sample + ".tensor"), labels[i].class_id);
    check_model_matches(params, s.x, labels[i].sample);
    truth[i] = s.label;
    pred[i] = predict(params, s.x);
  });
  const EvalResult eval = evaluate_predictions(truth, pred, params.config.classes);
  std::string rows = "sample,true,pred\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    rows += labels[i].sample + "," + std::to_string(truth[i]) + "," + std::to_string(pred[i]) + "\n";
  }
  write_file_atomic(join_path(out_dir, "predictions.csv"), rows);
  write_metrics_csv(join_path(out_dir, "metrics.csv"), eval);
  write_confusion_csv(join_path(out_dir, "confusion.csv"), eval.confusion);
  return eval;
}

void run_explain(const RunConfig& /*config*/, const std::string& in_dir, const std::string& checkpoint,
                 int target_class, int block, const std::string& out_dir) {
  const ModelParams params = read_checkpoint(checkpoint);
  const int blk = block == 0 ? params.config.blocks : block;
  require(blk >= 1 && blk <= params.config.blocks, ErrorCode::kOutOfRange,
          "block " + std::to_string(block) + " outside [1, " + std::to_string(params.config.blocks) + "]");
  require(target_class < params.config.classes, ErrorCode::kOutOfRange,
          "class " + std::to_string(target_class) + " outside [0, " + std::to_string(params.config.classes) + ")");
  const std::vector<LabelRow> labels = read_labels_csv(join_path(in_dir, "labels.csv"));
  std::vector<std::string> rows(labels.size());
  parallel_for(labels.size(), [&](std::size_t i) {
    const std::string& name = labels[i].sample;
    ReducedMds r;
    const Sample s = load_reduced(join_path(in_dir, "reduced/" + name + ".tensor"), labels[i].class_id, &r);
    check_model_matches(params, s.x, name);
    const int k = target_class < 0 ? predict(params, s.x) : target_class;
    const RelevanceMap map = grad_cam(params, r, k, blk);
    const std::vector<double> energy = token_energy(s.x);
    render_overlay(r, map,
                   {join_path(out_dir, name + "_mds.pgm"), join_path(out_dir, name + "_relevance.pgm"),
                    join_path(out_dir, name + "_overlay.ppm")});
    write_relevance_csv(join_path(out_dir, name + "_relevance.csv"), map, energy);
    rows[i] = name + "," + std::to_string(k) + "," + format_double(spearman(map.tokens, energy)) + "\n";
  });
  std::string out = "sample,class,spearman_relevance_energy\n";
  for (const auto& r : rows) out += r;
  write_file_atomic(join_path(out_dir, "explain.csv"), out);
}

std::vector<DatasetItem> build_dataset(const RunConfig& config, std::uint64_t dataset_seed, int n_samples) {
  const std::vector<LabeledScene> scenes = sample_scenes(config.radar, default_class_templates(), n_samples,
                                                         dataset_seed, config.dataset.noise_sigma);
  const StftParams sp = config.stft();
  std::vector<DatasetItem> items(scenes.size());
  parallel_for(scenes.size(), [&](std::size_t i) {
    const PipelineResult res = run_pipeline(config.radar, synth_adc(config.radar, scenes[i].scene), config.pipeline, 1);
    const MdsTensor mds = build_mds(res.crops.at(0).bbox, sp);
    DatasetItem& item = items[i];
    item.reduced = reduce_dim(mds, config.norm);
    item.sample = {token_matrix(item.reduced), scenes[i].class_id};
    item.centroid = res.crops[0].centroid;
    const std::size_t per_bin = mds.data.size() / static_cast<std::size_t>(item.reduced.bins());
    item.bin_energy.assign(static_cast<std::size_t>(item.reduced.bins()), 0.0);
    for (std::size_t k = 0; k < mds.data.size(); ++k) item.bin_energy[k / per_bin] += std::norm(mds.data.flat()[k]);
  });
  return items;
}

std::string format_axes(const AxisSpec& a) {
  std::ostringstream os;
  os.precision(17);
  os << "range_resolution_m " << a.range_resolution << "\n"
     << "range_max_m " << a.range_max << "\n"
     << "velocity_resolution_mps " << a.velocity_resolution << "\n"
     << "velocity_max_mps " << a.velocity_max << "\n"
     << "angle_resolution_sin " << a.angle_resolution << "\n";
  return os.str();
}

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

SelftestCheck check_dft(Rng& rng) {
  double worst = 0;
  for (std::size_t n : {7u, 32u, 48u, 128u}) {
    std::vector<Complex> x(n);
    std::normal_distribution<double> g;
    for (Complex& v : x) v = {g(rng), g(rng)};
    std::vector<Complex> y = x;
    fft_inplace(y);
    double num = 0, den = 0;
    for (std::size_t k = 0; k < n; ++k) {
      Complex ref = 0;
      for (std::size_t i = 0; i < n; ++i) ref += x[i] * std::polar(1.0, -2.0 * M_PI * double(k * i % n) / double(n));
      num = std::max(num, std::abs(ref - y[k]));
      den = std::max(den, std::abs(ref));
    }
    worst = std::max(worst, num / den);
  }
  return {"dft_vs_naive", worst < 1e-9, "max_rel_err " + sci(worst)};
}

SelftestCheck check_cfar_scale(Rng& rng) {
  RTensor p({24, 24});
  std::exponential_distribution<double> e;
  for (double& v : p.flat()) v = e(rng);
  p(12, 5) = 200;
  const CfarWindow w;
  const double alpha = cfar_alpha(1e-3, cfar_training_cells(w));
  const DetectionSet a = ca_cfar(p, w, alpha);
  RTensor q = p;
  for (double& v : q.flat()) v *= 7.5;
  const DetectionSet b = ca_cfar(q, w, alpha);
  bool hit = false;
  for (const Cell& c : a.cells) hit = hit || (c.k_r == 12 && c.k_v == 5);
  const bool same = a.cells.size() == b.cells.size() &&
                    std::equal(a.cells.begin(), a.cells.end(), b.cells.begin(),
                               [](const Cell& x, const Cell& y) { return x.k_r == y.k_r && x.k_v == y.k_v; });
  return {"cfar_scale_invariance", same && hit, "detections " + std::to_string(a.cells.size())};
}

SelftestCheck check_stft_tone() {
  const StftParams sp{32, 3, 32};
  const int bin = 5;
  std::vector<Complex> x(128);
  for (std::size_t n = 0; n < x.size(); ++n) x[n] = std::polar(1.0, 2.0 * M_PI * bin * double(n) / 32.0);
  const CTensor s = stft_cell(x, sp);
  bool ok = true;
  for (std::size_t f = 0; f < s.dim(1); ++f) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < s.dim(0); ++k) {
      if (std::abs(s(k, f)) > std::abs(s(best, f))) best = k;
    }
    ok = ok && best == bin;
  }
  return {"stft_tone_argmax", ok, "frames " + std::to_string(s.dim(1))};
}

SelftestCheck check_gradient(std::uint64_t seed) {
  ModelConfig c;
  c.n_tokens = 4;
  c.d_in = 6;
  c.emb = 8;
  c.heads = 2;
  c.blocks = 1;
  c.mlp_ratio = 2;
  ModelParams p = init_params(c, seed);
  p.visit([&](const std::string&, Mat& m, bool) {
    Rng r(derive_seed(seed, "selftest-perturb", static_cast<std::uint64_t>(m.size())));
    std::normal_distribution<double> g(0.0, 0.3);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] += g(r);
  });
  Rng r(derive_seed(seed, "selftest-input"));
  std::normal_distribution<double> g;
  Mat x(c.n_tokens, c.d_in);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(r);
  const int label = 1;
  ForwardTape tape;
  forward(p, x, &tape);
  const ModelParams grads = backward(tape, label, p);
  double worst = 0;
  const double h = 1e-5;
  std::vector<std::pair<std::string, double>> analytic;
  grads.visit([&](const std::string& name, const Mat& m, bool) { analytic.emplace_back(name, m.data()[0]); });
  std::size_t idx = 0;
  p.visit([&](const std::string&, Mat& m, bool) {
    const double keep = m.data()[0];
    m.data()[0] = keep + h;
    const double up = loss(forward(p, x), label, p);
    m.data()[0] = keep - h;
    const double down = loss(forward(p, x), label, p);
    m.data()[0] = keep;
    const double fd = (up - down) / (2 * h);
    const double a = analytic[idx++].second;
    worst = std::max(worst, std::abs(fd - a) / std::max(1e-6, std::max(std::abs(fd), std::abs(a))));
  });
  return {"gradient_vs_finite_difference", worst < 1e-4, "max_rel_err " + sci(worst)};
}

SelftestCheck check_container(Rng& rng, const std::string& dir) {
  RTensor t({3, 5, 2});
  std::normal_distribution<double> g;
  for (double& v : t.flat()) v = g(rng);
  const std::string path = join_path(dir, "roundtrip.tensor");
  write_tensor(path, t, {"a", "b", "c"});
  const bool same = read_real_tensor(path) == t;
  std::string bytes = read_file(path);
  bytes.pop_back();
  bool size_error = false;
  try {
    decode_container(bytes);
  } catch (const Error& e) {
    size_error = e.code() == ErrorCode::kSizeMismatch;
  }
  return {"container_roundtrip", same && size_error, same ? "bitwise equal" : "mismatch"};
}

}  // namespace

std::vector<SelftestCheck> run_selftest(std::uint64_t seed, const std::string& out_dir) {
  std::vector<SelftestCheck> checks;
  Rng rng(derive_seed(seed, "selftest"));
  checks.push_back(check_dft(rng));
  checks.push_back(check_cfar_scale(rng));
  checks.push_back(check_stft_tone());
  checks.push_back(check_gradient(derive_seed(seed, "selftest-model")));
  checks.push_back(check_container(rng, out_dir));

  RunConfig c = small_config();
  c.train.seed = seed;
  const std::string root = join_path(out_dir, "pipeline");
  SelftestCheck chain{"pipeline_end_to_end", false, ""};
  try {
    run_simulate(c, join_path(root, "simulate"));
    run_process(c, join_path(root, "simulate"), join_path(root, "process"));
    run_mds(c, join_path(root, "process"), join_path(root, "mds"));
    const TrainReport report = run_train(c, join_path(root, "mds"), join_path(root, "train"));
    const EvalResult eval =
        run_eval(c, join_path(root, "mds"), join_path(root, "train/model.ckpt"), join_path(root, "eval"));
    run_explain(c, join_path(root, "mds"), join_path(root, "train/model.ckpt"), -1, 0, join_path(root, "explain"));
    chain.passed = eval.confusion.total() == c.dataset.samples && eval.confusion.trace() <= eval.confusion.total();
    chain.detail = "cv_acc_avg " + format_double(report.acc_avg) + " eval_acc " + format_double(eval.accuracy);
  } catch (const Error& e) {
    chain.detail = std::string(error_code_name(e.code())) + ": " + e.what();
  }
  checks.push_back(chain);

  std::string summary;
  for (const auto& ch : checks) summary += ch.name + " " + (ch.passed ? "pass" : "FAIL") + " " + ch.detail + "\n";
  write_file_atomic(join_path(out_dir, "selftest.txt"), summary);
  return checks;
}

}  // namespace mdslab
