#include "mdslab/mdslab.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "mdslab/app.hpp"
#include "mdslab/artifacts.hpp"
#include "mdslab/fs_util.hpp"
#include "mdslab/parallel.hpp"

struct mdslab_config {
  mdslab::RunConfig value;
};

struct mdslab_model {
  mdslab::ModelParams params;
};

namespace {

thread_local std::string g_last_error;

template <class F>
mdslab_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return MDSLAB_OK;
  } catch (const mdslab::Error& e) {
    g_last_error = e.what();
    return static_cast<mdslab_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MDSLAB_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MDSLAB_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  mdslab::require(p != nullptr, mdslab::ErrorCode::kInvalidArgument, std::string(what) + " must not be null");
}

}  // namespace

extern "C" {

const char* mdslab_last_error(void) { return g_last_error.c_str(); }

const char* mdslab_status_name(mdslab_status status) {
  if (status == MDSLAB_INTERNAL) return "internal";
  return mdslab::error_code_name(static_cast<mdslab::ErrorCode>(status));
}

int mdslab_is_validation_error(mdslab_status status) {
  return status != MDSLAB_INTERNAL && mdslab::is_validation_error(static_cast<mdslab::ErrorCode>(status));
}

mdslab_status mdslab_set_threads(int threads) {
  return guarded([&] {
    mdslab::require(threads >= 0, mdslab::ErrorCode::kInvalidArgument, "thread count must be non-negative");
    mdslab::set_thread_count(threads);
  });
}

mdslab_status mdslab_config_load(const char* path, mdslab_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    auto* c = new mdslab_config{mdslab::load_config(path ? path : "")};
    *out = c;
  });
}

mdslab_status mdslab_config_set(mdslab_config* config, const char* key, const char* value) {
  return guarded([&] {
    need(config, "config");
    need(key, "key");
    need(value, "value");
    mdslab::RunConfig next = config->value;
    mdslab::set_config_value(next, key, value);
    next.resolve();
    config->value = next;
  });
}

mdslab_status mdslab_config_get(const mdslab_config* config, const char* key, char* buf, size_t size,
                                size_t* needed) {
  return guarded([&] {
    need(config, "config");
    need(key, "key");
    const std::string v = mdslab::get_config_value(config->value, key);
    if (needed) *needed = v.size();
    if (buf && size > 0) {
      const std::size_t n = std::min(size - 1, v.size());
      std::memcpy(buf, v.data(), n);
      buf[n] = '\0';
    }
  });
}

mdslab_status mdslab_config_write(const mdslab_config* config, const char* path) {
  return guarded([&] {
    need(config, "config");
    need(path, "path");
    mdslab::write_file_atomic(path, mdslab::format_config(config->value));
  });
}

void mdslab_config_free(mdslab_config* config) { delete config; }

mdslab_status mdslab_axes_derive(const mdslab_config* config, mdslab_axes* out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    const mdslab::AxisSpec a = mdslab::derive_axes(config->value.radar);
    *out = {a.range_resolution, a.range_max, a.velocity_resolution, a.velocity_max, a.angle_resolution};
  });
}

mdslab_status mdslab_simulate(const mdslab_config* config, const char* out_dir) {
  return guarded([&] {
    need(config, "config");
    need(out_dir, "out_dir");
    mdslab::run_simulate(config->value, out_dir);
  });
}

mdslab_status mdslab_process(const mdslab_config* config, const char* in_dir, const char* out_dir) {
  return guarded([&] {
    need(config, "config");
    need(in_dir, "in_dir");
    need(out_dir, "out_dir");
    mdslab::run_process(config->value, in_dir, out_dir);
  });
}

mdslab_status mdslab_mds(const mdslab_config* config, const char* in_dir, const char* out_dir) {
  return guarded([&] {
    need(config, "config");
    need(in_dir, "in_dir");
    need(out_dir, "out_dir");
    mdslab::run_mds(config->value, in_dir, out_dir);
  });
}

mdslab_status mdslab_train(const mdslab_config* config, const char* in_dir, const char* out_dir, double* acc_avg) {
  return guarded([&] {
    need(config, "config");
    need(in_dir, "in_dir");
    need(out_dir, "out_dir");
    const mdslab::TrainReport r = mdslab::run_train(config->value, in_dir, out_dir);
    if (acc_avg) *acc_avg = r.acc_avg;
  });
}

mdslab_status mdslab_eval(const mdslab_config* config, const char* in_dir, const char* checkpoint,
                          const char* out_dir, double* accuracy) {
  return guarded([&] {
    need(config, "config");
    need(in_dir, "in_dir");
    need(checkpoint, "checkpoint");
    need(out_dir, "out_dir");
    const mdslab::EvalResult r = mdslab::run_eval(config->value, in_dir, checkpoint, out_dir);
    if (accuracy) *accuracy = r.accuracy;
  });
}

mdslab_status mdslab_explain(const mdslab_config* config, const char* in_dir, const char* checkpoint,
                             int target_class, int block, const char* out_dir) {
  return guarded([&] {
    need(config, "config");
    need(in_dir, "in_dir");
    need(checkpoint, "checkpoint");
    need(out_dir, "out_dir");
    mdslab::run_explain(config->value, in_dir, checkpoint, target_class, block, out_dir);
  });
}

mdslab_status mdslab_selftest(uint64_t seed, const char* out_dir, int* failures) {
  return guarded([&] {
    need(out_dir, "out_dir");
    int failed = 0;
    for (const auto& c : mdslab::run_selftest(seed, out_dir)) failed += c.passed ? 0 : 1;
    if (failures) *failures = failed;
  });
}

mdslab_status mdslab_model_load(const char* checkpoint, mdslab_model** out) {
  return guarded([&] {
    need(checkpoint, "checkpoint");
    need(out, "out");
    *out = nullptr;
    *out = new mdslab_model{mdslab::read_checkpoint(checkpoint)};
  });
}

mdslab_status mdslab_model_predict(const mdslab_model* model, const double* tokens, size_t n, int* predicted_class) {
  return guarded([&] {
    need(model, "model");
    need(tokens, "tokens");
    need(predicted_class, "predicted_class");
    const mdslab::ModelConfig& c = model->params.config;
    mdslab::require(n == static_cast<size_t>(c.n_tokens) * c.d_in, mdslab::ErrorCode::kShapeMismatch,
                    "expected " + std::to_string(c.n_tokens) + "x" + std::to_string(c.d_in) + " token values");
    const mdslab::Mat x = Eigen::Map<const mdslab::Mat>(tokens, c.n_tokens, c.d_in);
    *predicted_class = mdslab::predict(model->params, x);
  });
}

void mdslab_model_free(mdslab_model* model) { delete model; }

}  // extern "C"
