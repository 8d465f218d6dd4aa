#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace desync::detail {

namespace {

enum class Kind { r2c, c2c_backward };

// FFTW planning is not thread safe; execution with the new-array interface
// is. Plans are therefore created once per size under a lock and reused.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(Kind kind, int n) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(kind, n);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    fftw_plan plan = nullptr;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (kind == Kind::r2c) {
      auto* in = fftw_alloc_real(n);
      auto* out = fftw_alloc_complex(n / 2 + 1);
      plan = fftw_plan_dft_r2c_1d(n, in, out, flags);
      fftw_free(in);
      fftw_free(out);
    } else {
      auto* in = fftw_alloc_complex(n);
      auto* out = fftw_alloc_complex(n);
      plan = fftw_plan_dft_1d(n, in, out, FFTW_BACKWARD, flags);
      fftw_free(in);
      fftw_free(out);
    }
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<Kind, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void real_dft(std::span<const double> x, std::vector<std::complex<double>>& out) {
  const int n = static_cast<int>(x.size());
  thread_local std::vector<double> in;
  in.assign(x.begin(), x.end());
  out.resize(static_cast<std::size_t>(n / 2 + 1));
  fftw_execute_dft_r2c(cache().get(Kind::r2c, n), in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void analytic_signal(std::span<const double> x, std::vector<std::complex<double>>& out) {
  const std::size_t n = x.size();
  thread_local std::vector<std::complex<double>> half, spec;
  real_dft(x, half);
  spec.assign(n, {0.0, 0.0});
  spec[0] = half[0];
  const std::size_t upper = (n % 2 == 0) ? n / 2 : (n + 1) / 2;
  for (std::size_t k = 1; k < upper; ++k) spec[k] = 2.0 * half[k];
  if (n % 2 == 0) spec[n / 2] = half[n / 2];
  out.resize(n);
  fftw_execute_dft(cache().get(Kind::c2c_backward, static_cast<int>(n)),
                   reinterpret_cast<fftw_complex*>(spec.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& z : out) z *= scale;
}

void inverse_real_dft(std::span<const std::complex<double>> half, std::size_t n, std::vector<double>& out) {
  std::vector<std::complex<double>> spec(n), time(n);
  for (std::size_t k = 0; k < half.size() && k < n; ++k) spec[k] = half[k];
  for (std::size_t k = 1; k < (n + 1) / 2; ++k) spec[n - k] = std::conj(half[k]);
  fftw_execute_dft(cache().get(Kind::c2c_backward, static_cast<int>(n)),
                   reinterpret_cast<fftw_complex*>(spec.data()),
                   reinterpret_cast<fftw_complex*>(time.data()));
  out.resize(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = time[i].real() * scale;
}

}  // namespace desync::detail
