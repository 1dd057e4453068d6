#include "mdslab/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

namespace mdslab {
namespace {

// fftw_plan creation is not thread-safe; execution with new arrays is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    fftw_complex* scratch = fftw_alloc_complex(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), scratch, scratch, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    require(plan != nullptr, ErrorCode::kState, "fftw failed to plan a transform");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

void fft_inplace(std::span<Complex> data, FftDirection direction) {
  if (data.empty()) return;
  const int sign = direction == FftDirection::kForward ? FFTW_FORWARD : FFTW_BACKWARD;
  fftw_plan plan = plan_cache().get(data.size(), sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

std::vector<double> hann_window(std::size_t length) {
  std::vector<double> w(length);
  for (std::size_t n = 0; n < length; ++n) {
    w[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                 static_cast<double>(length)));
  }
  return w;
}

}  // namespace mdslab
