// mdslab command-line front end. Talks to the library only through mdslab.h.
#include <cinttypes>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "mdslab/mdslab.h"

namespace {

int exit_for(mdslab_status s) {
  if (s == MDSLAB_OK) return 0;
  std::fprintf(stderr, "error (%s): %s\n", mdslab_status_name(s), mdslab_last_error());
  return mdslab_is_validation_error(s) ? 2 : 1;
}

struct Options {
  std::string config = "default";
  std::string in;
  std::string out;
  std::string checkpoint;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0;
  int target_class = -1;
  int block = 0;
};

// Loads the config and applies --seed. Returns 0 or an exit status.
int load(const Options& o, mdslab_config** cfg) {
  mdslab_status s = mdslab_config_load(o.config.c_str(), cfg);
  if (s != MDSLAB_OK) return exit_for(s);
  if (o.seed_given) {
    s = mdslab_config_set(*cfg, "train.seed", std::to_string(o.seed).c_str());
    if (s != MDSLAB_OK) return exit_for(s);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mdslab: radar micro-Doppler simulation, processing and classification"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool needs_in, bool needs_out) {
    sub->add_option("--config", o.config, "config file, or 'default'");
    sub->add_option("--seed", o.seed, "root seed (overrides train.seed)")->each([&](const std::string&) {
      o.seed_given = true;
    });
    sub->add_option("--threads", o.threads, "worker cap (default: MDSLAB_THREADS or 1)")->check(CLI::NonNegativeNumber);
    if (needs_in) sub->add_option("--in", o.in, "input stage directory")->required();
    if (needs_out) sub->add_option("--out", o.out, "output directory")->required();
  };

  auto* simulate = app.add_subcommand("simulate", "synthesize labeled ADC cubes");
  common(simulate, false, true);
  auto* process = app.add_subcommand("process", "range/Doppler/CFAR/angle chain and target crops");
  common(process, true, true);
  auto* mds = app.add_subcommand("mds", "micro-Doppler spectrograms and reduced tensors");
  common(mds, true, true);
  auto* train = app.add_subcommand("train", "k-fold training, writes the best checkpoint");
  common(train, true, true);
  auto* eval = app.add_subcommand("eval", "accuracy and confusion matrix of a checkpoint");
  common(eval, true, true);
  eval->add_option("--checkpoint", o.checkpoint, "model checkpoint")->required();
  auto* explain = app.add_subcommand("explain", "Grad-CAM relevance maps and overlays");
  common(explain, true, true);
  explain->add_option("--checkpoint", o.checkpoint, "model checkpoint")->required();
  explain->add_option("--class", o.target_class, "class to explain (default: predicted)");
  explain->add_option("--block", o.block, "1-based transformer block (default: last)");
  auto* axes = app.add_subcommand("axes", "print derived axis resolutions and limits");
  common(axes, false, false);
  auto* selftest = app.add_subcommand("selftest", "oracle checks and a compact end-to-end run");
  common(selftest, false, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (mdslab_status s = mdslab_set_threads(o.threads); s != MDSLAB_OK) return exit_for(s);

  if (*selftest) {
    int failures = 0;
    const mdslab_status s = mdslab_selftest(o.seed, o.out.c_str(), &failures);
    if (s != MDSLAB_OK) return exit_for(s);
    std::printf("selftest: %d failed check(s); report in %s/selftest.txt\n", failures, o.out.c_str());
    return failures == 0 ? 0 : 1;
  }

  mdslab_config* cfg = nullptr;
  if (int rc = load(o, &cfg); rc != 0) return rc;

  mdslab_status s = MDSLAB_OK;
  if (*axes) {
    mdslab_axes a{};
    s = mdslab_axes_derive(cfg, &a);
    if (s == MDSLAB_OK) {
      std::printf("range_resolution_m %.17g\nrange_max_m %.17g\nvelocity_resolution_mps %.17g\n"
                  "velocity_max_mps %.17g\nangle_resolution_sin %.17g\n",
                  a.range_resolution, a.range_max, a.velocity_resolution, a.velocity_max, a.angle_resolution);
    }
  } else if (*simulate) {
    s = mdslab_simulate(cfg, o.out.c_str());
  } else if (*process) {
    s = mdslab_process(cfg, o.in.c_str(), o.out.c_str());
  } else if (*mds) {
    s = mdslab_mds(cfg, o.in.c_str(), o.out.c_str());
  } else if (*train) {
    double acc = 0;
    s = mdslab_train(cfg, o.in.c_str(), o.out.c_str(), &acc);
    if (s == MDSLAB_OK) std::printf("cv mean accuracy %.4f\n", acc);
  } else if (*eval) {
    double acc = 0;
    s = mdslab_eval(cfg, o.in.c_str(), o.checkpoint.c_str(), o.out.c_str(), &acc);
    if (s == MDSLAB_OK) std::printf("accuracy %.4f\n", acc);
  } else if (*explain) {
    s = mdslab_explain(cfg, o.in.c_str(), o.checkpoint.c_str(), o.target_class, o.block, o.out.c_str());
  }
  mdslab_config_free(cfg);
  return exit_for(s);
}
