#include "chaoslab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace chaoslab {

namespace {

struct PlanCache {
  std::mutex mutex;
  std::map<std::pair<std::vector<int>, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }

  fftw_plan get(const std::vector<int>& dims, int sign, std::size_t total) {
    std::lock_guard lock(mutex);
    auto key = std::make_pair(dims, sign);
    if (auto it = plans.find(key); it != plans.end()) return it->second;
    std::vector<cplx> scratch(total);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw std::runtime_error("fftw: plan creation failed");
    plans.emplace(std::move(key), plan);
    return plan;
  }
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void fft_inplace(std::span<cplx> data, std::span<const std::size_t> shape, FftDirection dir) {
  std::vector<int> dims;
  std::size_t total = 1;
  for (std::size_t n : shape) {
    dims.push_back(static_cast<int>(n));
    total *= n;
  }
  if (total != data.size()) throw std::invalid_argument("fft: shape does not match buffer size");
  if (total == 0) return;
  const int sign = dir == FftDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
  fftw_plan plan = cache().get(dims, sign, total);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

std::vector<std::size_t> grid_shape(int dimension, std::size_t points_per_axis) {
  return std::vector<std::size_t>(static_cast<std::size_t>(dimension), points_per_axis);
}

}  // namespace chaoslab
