#ifndef MDSLAB_MDSLAB_H
#define MDSLAB_MDSLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MDSLAB_API __declspec(dllexport)
#else
#define MDSLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mdslab_status {
  MDSLAB_OK = 0,
  MDSLAB_INVALID_ARGUMENT = 1,
  MDSLAB_OUT_OF_RANGE = 2,
  MDSLAB_NUMERIC = 3,
  MDSLAB_IO = 4,
  MDSLAB_VERSION_MISMATCH = 5,
  MDSLAB_SHAPE_MISMATCH = 6,
  MDSLAB_SIZE_MISMATCH = 7,
  MDSLAB_TRUNCATED = 8,
  MDSLAB_PARSE = 9,
  MDSLAB_STATE = 10,
  MDSLAB_INTERNAL = 99
} mdslab_status;

typedef struct mdslab_config mdslab_config;
typedef struct mdslab_model mdslab_model;

typedef struct mdslab_axes {
  double range_resolution;
  double range_max;
  double velocity_resolution;
  double velocity_max;
  double angle_resolution;
} mdslab_axes;

/* Message of the last failed call on this thread ("" if none). */
MDSLAB_API const char* mdslab_last_error(void);
MDSLAB_API const char* mdslab_status_name(mdslab_status status);
/* Nonzero for bad input (arguments, ranges, shapes, parse errors). */
MDSLAB_API int mdslab_is_validation_error(mdslab_status status);

/* Worker cap for parallel stages; 0 restores the MDSLAB_THREADS default. */
MDSLAB_API mdslab_status mdslab_set_threads(int threads);

/* path NULL, "" or "default" loads the built-in configuration. */
MDSLAB_API mdslab_status mdslab_config_load(const char* path, mdslab_config** out);
/* Sets one "section.key"; the configuration is re-validated. */
MDSLAB_API mdslab_status mdslab_config_set(mdslab_config* config, const char* key, const char* value);
/* Copies the value as text into buf (NUL-terminated); *needed gets the full length. */
MDSLAB_API mdslab_status mdslab_config_get(const mdslab_config* config, const char* key, char* buf, size_t size,
                                           size_t* needed);
MDSLAB_API mdslab_status mdslab_config_write(const mdslab_config* config, const char* path);
MDSLAB_API void mdslab_config_free(mdslab_config* config);

MDSLAB_API mdslab_status mdslab_axes_derive(const mdslab_config* config, mdslab_axes* out);

MDSLAB_API mdslab_status mdslab_simulate(const mdslab_config* config, const char* out_dir);
MDSLAB_API mdslab_status mdslab_process(const mdslab_config* config, const char* in_dir, const char* out_dir);
MDSLAB_API mdslab_status mdslab_mds(const mdslab_config* config, const char* in_dir, const char* out_dir);
/* acc_avg may be NULL. */
MDSLAB_API mdslab_status mdslab_train(const mdslab_config* config, const char* in_dir, const char* out_dir,
                                      double* acc_avg);
MDSLAB_API mdslab_status mdslab_eval(const mdslab_config* config, const char* in_dir, const char* checkpoint,
                                     const char* out_dir, double* accuracy);
/* target_class < 0 explains the predicted class; block 0 means the last block. */
MDSLAB_API mdslab_status mdslab_explain(const mdslab_config* config, const char* in_dir, const char* checkpoint,
                                        int target_class, int block, const char* out_dir);
/* *failures receives the number of failed checks; a report lands in out_dir/selftest.txt. */
MDSLAB_API mdslab_status mdslab_selftest(uint64_t seed, const char* out_dir, int* failures);

MDSLAB_API mdslab_status mdslab_model_load(const char* checkpoint, mdslab_model** out);
/* tokens: row-major n_tokens x d_in values; n must equal n_tokens * d_in. */
MDSLAB_API mdslab_status mdslab_model_predict(const mdslab_model* model, const double* tokens, size_t n,
                                              int* predicted_class);
MDSLAB_API void mdslab_model_free(mdslab_model* model);

#ifdef __cplusplus
}
#endif

#endif
