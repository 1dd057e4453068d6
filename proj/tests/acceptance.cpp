// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "gradcheck.hpp"
#include "mdslab/app.hpp"
#include "mdslab/config.hpp"
#include "mdslab/mds_gen.hpp"
#include "mdslab/nn_core.hpp"
#include "mdslab/parallel.hpp"
#include "mdslab/rng.hpp"
#include "mdslab/rva_pipeline.hpp"
#include "mdslab/scene_sim.hpp"
#include "mdslab/trainer.hpp"
#include "mdslab/xai.hpp"
#include "oracles.hpp"

using namespace mdslab;
namespace fs = std::filesystem;

namespace {

// Tolerances and limits.
constexpr double kAxisTol = 1e-9;
constexpr double kDftTol = 1e-9;
constexpr double kPhaseTol = 1e-6;  // rad
constexpr double kPfaDesign = 1e-3;
constexpr double kPfaLo = 0.5e-3, kPfaHi = 2e-3;
constexpr std::size_t kMinNoiseCells = 1'000'000;
constexpr int kLocScenes = 200;
constexpr double kLocRate = 0.95;
constexpr double kStftTol = 1e-9;
constexpr double kGradTol = 1e-4;
constexpr double kGradFloor = 1e-5;
constexpr double kAccTarget = 0.90;
constexpr int kMaxEpochs = 50;
constexpr int kTestSamples = 30;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void report(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = limit_s <= 0 || secs < limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++g_failures;
  char timing[96];
  if (limit_s > 0)
    std::snprintf(timing, sizeof timing, "%.2f s (limit %.0f s)", secs, limit_s);
  else
    std::snprintf(timing, sizeof timing, "%.2f s", secs);
  std::printf("criterion %2d %s  %-26s %s; %s\n", id, pass ? "PASS" : "FAIL", name, o.detail.c_str(), timing);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(long double got, long double want) {
  return static_cast<double>(std::fabs(got - want) / std::fabs(want));
}

std::vector<Complex> random_series(Rng& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<Complex> v(n);
  for (auto& z : v) z = {g(rng), g(rng)};
  return v;
}

// --- 1 ---------------------------------------------------------------------

Outcome axis_formulas() {
  Rng rng(derive_seed(101, "axes"));
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    RadarConfig c;
    c.carrier_hz = uniform(rng, 24e9, 81e9);
    c.bandwidth_hz = uniform(rng, 100e6, 4e9);
    c.chirp_s = uniform(rng, 10e-6, 200e-6);
    c.adc_rate_hz = uniform(rng, 1e6, 20e6);
    c.chirp_interval_s = c.chirp_s * uniform(rng, 1.0, 1.5);
    c.chirps = std::uniform_int_distribution<int>(8, 512)(rng);
    c.angle_fft = std::uniform_int_distribution<int>(8, 512)(rng);
    const AxisSpec a = derive_axes(c);
    const long double cl = 299792458.0L;
    const long double slope = static_cast<long double>(c.bandwidth_hz) / c.chirp_s;
    const long double lambda = cl / c.carrier_hz;
    const long double n_s = std::lround(static_cast<long double>(c.chirp_s) * c.adc_rate_hz);
    const long double r_max = cl * c.adc_rate_hz / (2 * slope);
    worst = std::max({worst, rel(a.range_max, r_max), rel(a.range_resolution, r_max / n_s),
                      rel(a.velocity_resolution, lambda / (2 * static_cast<long double>(c.chirp_s) * c.chirps)),
                      rel(a.velocity_max, lambda / (4 * static_cast<long double>(c.chirp_s))),
                      rel(a.angle_resolution, 2.0L / c.angle_fft)});
  }
  return {worst <= kAxisTol, fmt("100 configs, max rel err %.2e (tol %.0e)", worst, kAxisTol)};
}

// --- 2 ---------------------------------------------------------------------

Outcome dft_equivalence() {
  Rng rng(derive_seed(102, "dft"));
  double worst = 0;
  int checked = 0;
  for (const bool window : {false, true}) {
    // range: fast time of length 256
    const int n_s = 256, m_c = 3, n_tx = 2, n_rx = 2;
    CTensor adc({std::size_t(n_s), std::size_t(m_c), std::size_t(n_tx), std::size_t(n_rx)});
    for (auto& z : adc.flat()) z = random_series(rng, 1)[0];
    const RdCube rs = range_fft(adc, window);
    for (int m = 0; m < m_c; ++m) {
      for (int tx = 0; tx < n_tx; ++tx) {
        for (int rx = 0; rx < n_rx; ++rx) {
          std::vector<Complex> in(n_s), got(n_s);
          for (int n = 0; n < n_s; ++n) {
            in[n] = adc(n, m, tx, rx) * (window ? oracle::hann(n, n_s) : 1.0);
            got[n] = rs.data(n, m, tx, rx);
          }
          worst = std::max(worst, oracle::max_rel_err(got, oracle::naive_dft(in)));
          ++checked;
        }
      }
    }
    // angle: 32-element virtual array padded to 256
    const int a_tx = 4, a_rx = 8, n_theta = 256;
    RdCube rd{CTensor({2, 2, std::size_t(a_tx), std::size_t(a_rx)}), RdCube::Stage::kRangeDoppler, true};
    for (auto& z : rd.data.flat()) z = random_series(rng, 1)[0];
    const AngleEstimate est = angle_of(rd, 1, 0, n_theta, window);
    std::vector<Complex> snap(n_theta);
    for (int a = 0; a < a_tx * a_rx; ++a)
      snap[a] = rd.data(1, 0, a / a_rx, a % a_rx) * (window ? oracle::hann(a, a_tx * a_rx) : 1.0);
    worst = std::max(worst, oracle::max_rel_err(est.spectrum, oracle::naive_dft(snap)));
    ++checked;
  }
  // Doppler: slow time of length 256
  const int n_s = 3, m_c = 256, n_tx = 2, n_rx = 2;
  RdCube in{CTensor({std::size_t(n_s), std::size_t(m_c), std::size_t(n_tx), std::size_t(n_rx)}),
            RdCube::Stage::kRange, false};
  for (auto& z : in.data.flat()) z = random_series(rng, 1)[0];
  const RdCube out = doppler_fft(in);
  for (int k = 0; k < n_s; ++k) {
    for (int tx = 0; tx < n_tx; ++tx) {
      for (int rx = 0; rx < n_rx; ++rx) {
        std::vector<Complex> x(m_c), got(m_c);
        for (int m = 0; m < m_c; ++m) {
          x[m] = in.data(k, m, tx, rx);
          got[m] = out.data(k, m, tx, rx);
        }
        worst = std::max(worst, oracle::max_rel_err(got, oracle::naive_dft(x)));
        ++checked;
      }
    }
  }
  return {worst <= kDftTol, fmt("%d transforms (N=256), max rel err %.2e (tol %.0e)", checked, worst, kDftTol)};
}

// --- 3 ---------------------------------------------------------------------

// Largest deviation of the virtual-array phase progression from pi * a * sin(theta).
double array_phase_residual(const RdCube& rd, int k_r, int k_v, int n_tx, int n_rx, double sin_az) {
  const Complex ref = rd.data(k_r, k_v, 0, 0);
  double worst = 0;
  for (int a = 1; a < n_tx * n_rx; ++a) {
    const Complex y = rd.data(k_r, k_v, a / n_rx, a % n_rx);
    const double ph = std::arg(y * std::conj(ref) * std::polar(1.0, -std::numbers::pi * a * sin_az));
    worst = std::max(worst, std::abs(ph));
  }
  return worst;
}

Outcome tdm_compensation() {
  RadarConfig c;
  c.frames = 1;
  c.n_tx = 3;
  const double v_bin = c.wavelength() / (2.0 * c.chirps * c.chirp_interval_s);
  const struct {
    int bin;
    double sin_az;
  } cases[] = {{9, 0.3}, {-17, -0.45}, {31, 0.05}, {-3, 0.7}, {1, -0.2}};
  double worst = 0, uncompensated = 0;
  for (const auto& k : cases) {
    Scene scene;
    TargetTrack t;
    t.range = 17.0;
    t.velocity = k.bin * v_bin;
    t.sin_azimuth = k.sin_az;
    t.scatterers = {Scatterer{}};
    scene.tracks = {t};
    const RdCube rs = range_fft(synth_frame_clean(c, scene, 0));
    const RdCube raw = doppler_fft(rs);
    const RdCube rd = compensate(raw, c);
    const RTensor p = power_map(rd);
    const int k_v = velocity_to_doppler_bin(c, t.velocity);
    int k_r = 0;
    for (int r = 1; r < c.samples_per_chirp(); ++r)
      if (p(r, k_v) > p(k_r, k_v)) k_r = r;
    worst = std::max(worst, array_phase_residual(rd, k_r, k_v, c.n_tx, c.n_rx, k.sin_az));
    uncompensated = std::max(uncompensated, array_phase_residual(raw, k_r, k_v, c.n_tx, c.n_rx, k.sin_az));
  }
  return {worst < kPhaseTol,
          fmt("5 on-bin movers, residual %.2e rad (tol %.0e; %.2f rad uncompensated)", worst, kPhaseTol,
              uncompensated)};
}

// --- 4 ---------------------------------------------------------------------

Outcome cfar_calibration() {
  const CfarWindow window;
  const double alpha = cfar_alpha(kPfaDesign, cfar_training_cells(window));
  Rng rng(derive_seed(104, "cfar"));
  std::exponential_distribution<double> expo(1.0);
  const std::size_t rows = 256, cols = 128;
  std::size_t cells = 0, alarms = 0;
  while (cells < kMinNoiseCells) {
    RTensor p({rows, cols});
    for (auto& v : p.flat()) v = expo(rng);
    alarms += ca_cfar(p, window, alpha).cells.size();
    cells += rows * cols;
  }
  const double pfa = static_cast<double>(alarms) / static_cast<double>(cells);
  return {pfa >= kPfaLo && pfa <= kPfaHi,
          fmt("%zu cells, %zu alarms, Pfa %.3e (accept [%.1e, %.1e])", cells, alarms, pfa, kPfaLo, kPfaHi)};
}

// --- 5 ---------------------------------------------------------------------

double circ_dist(double a, double b, int n) {
  const double d = std::fmod(std::fabs(a - b), static_cast<double>(n));
  return std::min(d, n - d);
}

Outcome localization() {
  const RadarConfig c;
  const PipelineParams params;
  const AxisSpec axes = derive_axes(c);
  const double v_lim = std::min(axes.velocity_max, c.slow_time_speed_limit());
  const int n_s = c.samples_per_chirp();
  Rng rng(derive_seed(105, "scenes"));
  std::vector<Scene> scenes(kLocScenes);
  for (auto& s : scenes) {
    TargetTrack t;
    t.range = uniform(rng, 1.0, 0.9 * axes.range_max);
    t.velocity = uniform(rng, -0.9 * v_lim, 0.9 * v_lim);
    t.sin_azimuth = uniform(rng, -0.9, 0.9);
    t.scatterers = {Scatterer{}};
    s.tracks = {t};
  }
  std::vector<int> hit(scenes.size(), 0);
  parallel_for(scenes.size(), [&](std::size_t i) {
    const TargetTrack& t = scenes[i].tracks[0];
    const PipelineResult res = run_pipeline(c, synth_adc(c, scenes[i]), params, 1);
    if (res.centroids.empty()) return;
    const Centroid& got = res.centroids[0];
    const double fd = doppler_hz(c, t.velocity);
    const double want_r = (c.slope() * 2.0 * t.range / kSpeedOfLight + fd) * n_s / c.adc_rate_hz;
    const double want_v = fd * c.chirps * c.chirp_interval_s;
    const double want_a = t.sin_azimuth * c.angle_fft / 2.0;
    hit[i] = std::fabs(got.k_r - want_r) <= 1.0 && circ_dist(got.k_v, want_v, c.chirps) <= 1.0 &&
             circ_dist(got.k_theta, want_a, c.angle_fft) <= 1.0;
  });
  int hits = 0;
  for (int h : hit) hits += h;
  const double rate = static_cast<double>(hits) / kLocScenes;
  return {rate >= kLocRate, fmt("%d/%d scenes within 1 bin on all axes (%.1f%%, need %.0f%%)", hits, kLocScenes,
                                100 * rate, 100 * kLocRate)};
}

// --- 6 ---------------------------------------------------------------------

Outcome stft_correctness() {
  const StftParams sp = StftParams::from_overlap(128, 125);
  const int n_time = 128 * 4;
  const int frames = sp.n_fft;
  int wrong_argmax = 0, tone_frames = 0;
  for (const int k0 : {0, 5, 37, 64, 100, 127}) {
    std::vector<Complex> x(n_time);
    for (int n = 0; n < n_time; ++n) x[n] = std::polar(1.3, 2 * std::numbers::pi * k0 * n / sp.n_fft);
    const CTensor s = stft_cell(x, sp);
    for (int f = 0; f < frames; ++f) {
      int best = 0;
      for (int k = 1; k < sp.n_fft; ++k)
        if (std::abs(s(k, f)) > std::abs(s(best, f))) best = k;
      wrong_argmax += best != k0;
      ++tone_frames;
    }
  }
  Rng rng(derive_seed(106, "stft"));
  double worst_energy = 0, worst_spec = 0;
  for (int trial = 0; trial < 3; ++trial) {
    const std::vector<Complex> x = random_series(rng, n_time);
    const CTensor s = stft_cell(x, sp);
    for (int f = 0; f < frames; ++f) {
      const std::vector<Complex> ref = oracle::stft_frame(x, sp.window, sp.hop, f);
      std::vector<Complex> got(sp.n_fft);
      long double e_got = 0, e_ref = 0;
      for (int k = 0; k < sp.n_fft; ++k) {
        got[k] = s(k, f);
        e_got += std::norm(got[k]);
        e_ref += std::norm(ref[k]);
      }
      worst_energy = std::max(worst_energy, rel(e_got, e_ref));
      worst_spec = std::max(worst_spec, oracle::max_rel_err(got, ref));
    }
  }
  const bool ok = wrong_argmax == 0 && worst_energy <= kStftTol && worst_spec <= kStftTol;
  return {ok, fmt("argmax %d/%d exact, frame energy rel err %.2e, spectrum %.2e (tol %.0e)",
                  tone_frames - wrong_argmax, tone_frames, worst_energy, worst_spec, kStftTol)};
}

// --- 7 ---------------------------------------------------------------------

Outcome gradient_exactness() {
  ModelConfig mc;
  mc.n_tokens = 6;
  mc.d_in = 20;
  mc.emb = 16;
  mc.heads = 2;
  mc.blocks = 1;
  mc.mlp_ratio = 4;
  mc.classes = 3;
  mc.weight_decay = 0.01;
  double worst = 0;
  std::size_t checked = 0;
  std::string where;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ModelParams p = gradcheck::jittered(mc, seed);
    const Mat x = gradcheck::random_input(mc.n_tokens, mc.d_in, seed);
    const gradcheck::Result r = gradcheck::check_all(p, x, static_cast<int>(seed % 3), 1e-5, kGradFloor);
    checked += r.checked;
    if (r.worst > worst) {
      worst = r.worst;
      where = r.where;
    }
  }
  return {worst <= kGradTol, fmt("5 seeds, %zu entries, worst rel err %.2e at %s (tol %.0e)", checked, worst,
                                 where.c_str(), kGradTol)};
}

// --- 8, 9, 10 ----------------------------------------------------------------

std::string confusion_violation(const EvalResult& e, std::span<const int> truth) {
  const ConfusionMatrix& m = e.confusion;
  const auto n = static_cast<std::int64_t>(truth.size());
  if (m.total() != n) return "total";
  std::int64_t rows = 0, cols = 0;
  for (int c = 0; c < m.classes; ++c) {
    std::int64_t support = 0;
    for (int t : truth) support += t == c;
    if (m.row_sum(c) != support) return "row sum";
    rows += m.row_sum(c);
    cols += m.col_sum(c);
    const ClassCounts& k = e.per_class.at(c);
    if (k.tp != m.at(c, c) || k.fp != m.col_sum(c) - k.tp || k.fn != m.row_sum(c) - k.tp) return "per-class";
    if (k.tp + k.fp + k.fn + k.tn != n) return "partition";
  }
  if (rows != n || cols != n) return "margins";
  if (e.accuracy != static_cast<double>(m.trace()) / static_cast<double>(n)) return "trace";
  return {};
}

struct TrainedRun {
  RunConfig config;
  TrainReport report;
  std::vector<std::vector<int>> val_truth;
  bool ok = false;
};

Outcome classification(TrainedRun& run) {
  RunConfig& cfg = run.config;
  cfg = load_config("default");
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<DatasetItem> items =
      build_dataset(cfg, derive_seed(cfg.train.seed, "dataset"), cfg.dataset.samples);
  const double t_data = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::vector<Sample> data;
  for (const auto& it : items) data.push_back(it.sample);
  const std::uint64_t cv_seed = derive_seed(cfg.train.seed, "cv");
  run.report = run_cv(data, cfg.model, cfg.train.hyper, cfg.train.k_fold, cv_seed);
  const FoldPlan plan = kfold_split(static_cast<int>(data.size()), cfg.train.k_fold, cv_seed);
  for (const auto& v : plan.val) {
    std::vector<int> truth;
    for (int i : v) truth.push_back(data[static_cast<std::size_t>(i)].label);
    run.val_truth.push_back(truth);
  }
  std::string folds;
  for (const auto& f : run.report.folds) folds += fmt("%s%.3f", folds.empty() ? "" : " ", f.accuracy);
  run.ok = run.report.acc_avg >= kAccTarget && cfg.train.hyper.epochs <= kMaxEpochs;
  return {run.ok && cfg.dataset.samples == 60 && cfg.train.k_fold == 5,
          fmt("%d samples, %d-fold, %d epochs, mean acc %.3f (need %.2f), folds [%s], data %.0f s",
              cfg.dataset.samples, cfg.train.k_fold, cfg.train.hyper.epochs, run.report.acc_avg, kAccTarget,
              folds.c_str(), t_data)};
}

Outcome confusion_identities(const TrainedRun& run) {
  int evaluations = 0;
  for (std::size_t j = 0; j < run.report.folds.size(); ++j) {
    const std::string bad = confusion_violation(run.report.folds[j].eval, run.val_truth.at(j));
    if (!bad.empty()) return {false, fmt("fold %zu violates %s", j, bad.c_str())};
    ++evaluations;
  }
  Rng rng(derive_seed(109, "confusion"));
  for (int trial = 0; trial < 500; ++trial) {
    const int classes = std::uniform_int_distribution<int>(2, 6)(rng);
    const int n = std::uniform_int_distribution<int>(1, 80)(rng);
    std::uniform_int_distribution<int> pick(0, classes - 1);
    std::vector<int> truth(n), pred(n);
    for (int i = 0; i < n; ++i) {
      truth[i] = pick(rng);
      pred[i] = rng() % 3 == 0 ? truth[i] : pick(rng);
    }
    const EvalResult e = evaluate_predictions(truth, pred, classes);
    std::string bad = confusion_violation(e, truth);
    for (int i = 0; i < n && bad.empty(); ++i) {
      std::int64_t cell = 0;
      for (int k = 0; k < n; ++k) cell += truth[k] == truth[i] && pred[k] == pred[i];
      if (e.confusion.at(truth[i], pred[i]) != cell) bad = "cell count";
    }
    if (!bad.empty()) return {false, fmt("random evaluation %d violates %s", trial, bad.c_str())};
    ++evaluations;
  }
  return {true, fmt("%d evaluations (%zu CV folds + random), all identities exact", evaluations,
                    run.report.folds.size())};
}

Outcome grad_cam_check(const TrainedRun& run) {
  if (!run.ok) return {false, "no model met criterion 8"};
  const RunConfig& cfg = run.config;
  const ModelParams& model = run.report.best_params;
  const std::vector<DatasetItem> test = build_dataset(cfg, derive_seed(cfg.train.seed, "test"), kTestSamples);
  int negative = 0, maps = 0, positive = 0, correct = 0;
  double rho_sum = 0;
  for (const DatasetItem& it : test) {
    const int pred = predict(model, it.sample.x);
    correct += pred == it.sample.label;
    for (int block = 1; block <= cfg.model.blocks; ++block) {
      for (int c = 0; c < cfg.model.classes; ++c) {
        const RelevanceMap rm = grad_cam(model, it.reduced, c, block);
        for (double v : rm.tokens) negative += !(v >= 0.0);
        ++maps;
      }
    }
    const RelevanceMap rm = grad_cam(model, it.reduced, pred, cfg.model.blocks);
    const double rho = spearman(rm.tokens, it.bin_energy);
    rho_sum += rho;
    positive += rho > 0;
  }
  const double mean_rho = rho_sum / kTestSamples;
  return {negative == 0 && mean_rho > 0,
          fmt("%d maps, %d negative; mean Spearman %.3f over %d held-out samples (%d positive), test acc %.3f",
              maps, negative, mean_rho, kTestSamples, positive, static_cast<double>(correct) / kTestSamples)};
}

// --- 11 ----------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism(const std::string& cli) {
  if (cli.empty()) return {false, "no --cli given"};
  const fs::path root = fs::temp_directory_path() / ("mdslab_accept_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const fs::path a = root / "a", b = root / "b";
  for (const auto& [dir, threads] : {std::pair{a, 1}, std::pair{b, 4}}) {
    const std::string cmd = "\"" + cli + "\" selftest --seed 5 --threads " + std::to_string(threads) + " --out \"" +
                            dir.string() + "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "selftest exited nonzero: " + cmd};
  }
  std::vector<fs::path> files_a, files_b;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) files_a.push_back(fs::relative(e.path(), a));
  for (const auto& e : fs::recursive_directory_iterator(b))
    if (e.is_regular_file()) files_b.push_back(fs::relative(e.path(), b));
  std::sort(files_a.begin(), files_a.end());
  std::sort(files_b.begin(), files_b.end());
  std::string bad;
  if (files_a != files_b) bad = "file lists differ";
  std::uintmax_t bytes = 0;
  for (const auto& f : files_a) {
    if (!bad.empty()) break;
    const std::string x = slurp(a / f);
    if (x != slurp(b / f)) bad = f.string() + " differs";
    bytes += x.size();
  }
  fs::remove_all(root);
  if (!bad.empty()) return {false, bad};
  return {true, fmt("2 runs (1 and 4 threads), %zu files, %ju bytes identical", files_a.size(), bytes)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mdslab acceptance run"};
  std::string cli;
  int threads = 0;
  app.add_option("--cli", cli, "path to the mdslab executable");
  app.add_option("--threads", threads, "worker threads (0 = hardware)");
  CLI11_PARSE(app, argc, argv);
  set_thread_count(threads);

  report(1, "axis formulas", 1, axis_formulas);
  report(2, "DFT oracle", 30, dft_equivalence);
  report(3, "TDM-MIMO compensation", 5, tdm_compensation);
  report(4, "CFAR false alarms", 60, cfar_calibration);
  report(5, "end-to-end localization", 300, localization);
  report(6, "STFT", 10, stft_correctness);
  report(7, "gradient exactness", 120, gradient_exactness);
  TrainedRun run;
  report(8, "classification", 600, [&] { return classification(run); });
  report(9, "confusion identities", 0, [&] { return confusion_identities(run); });
  report(10, "Grad-CAM", 60, [&] { return grad_cam_check(run); });
  report(11, "determinism", 0, [&] { return determinism(cli); });

  std::printf("%d of 11 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
