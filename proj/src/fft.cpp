#include "dqm/detail/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace dqm::detail {
namespace {

struct PlanKey {
  std::vector<int> dims;
  int sign;
  bool operator<(const PlanKey& o) const {
    if (sign != o.sign) return sign < o.sign;
    return dims < o.dims;
  }
};

// FFTW planning is not thread-safe; executing a plan on distinct arrays is.
// Plans are created once per (shape, direction) with FFTW_ESTIMATE, which is
// deterministic for a given platform.
class PlanCache {
 public:
  fftw_plan get(const std::vector<int>& dims, int sign, std::size_t n) {
    std::lock_guard<std::mutex> lock(mutex_);
    PlanKey key{dims, sign};
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    fftw_complex* scratch = fftw_alloc_complex(n);
    if (!scratch) throw std::bad_alloc();
    fftw_plan plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(),
                                   scratch, scratch, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (!plan) throw std::runtime_error("fftw: planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void execute(const Grid& grid, std::vector<Complex>& data, int sign) {
  if (data.size() != grid.size())
    throw std::invalid_argument("fft: data size does not match grid");
  std::vector<int> dims(grid.shape().begin(), grid.shape().end());
  fftw_plan plan = cache().get(dims, sign, grid.size());
  auto* raw = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, raw, raw);
}

}  // namespace

void fft_forward(const Grid& grid, std::vector<Complex>& data) {
  execute(grid, data, FFTW_FORWARD);
}

void fft_backward(const Grid& grid, std::vector<Complex>& data) {
  execute(grid, data, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& v : data) v *= scale;
}

}  // namespace dqm::detail
