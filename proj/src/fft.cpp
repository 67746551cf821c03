#include "veploop/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace veploop::fft {
namespace {

// FFTW's planner is not thread safe, so plan creation and destruction are
// serialized here. Executing a thread's own plans on its own buffers needs no
// lock. Plans use FFTW_ESTIMATE: deterministic for a given size and alignment,
// which keeps transforms bit-identical across threads and worker counts.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct Plan1d {
  int n = 0;
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  explicit Plan1d(int n_in) : n(n_in) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    real = fftw_alloc_real(static_cast<std::size_t>(n));
    cplx = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
    fwd = fftw_plan_dft_r2c_1d(n, real, cplx, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(n, cplx, real, FFTW_ESTIMATE);
  }
  ~Plan1d() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    fftw_free(real);
    fftw_free(cplx);
  }
  Plan1d(const Plan1d&) = delete;
  Plan1d& operator=(const Plan1d&) = delete;
};

struct Plan2d {
  int h = 0, w = 0;
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr;

  Plan2d(int h_in, int w_in) : h(h_in), w(w_in) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    real = fftw_alloc_real(static_cast<std::size_t>(h) * w);
    cplx = fftw_alloc_complex(static_cast<std::size_t>(h) * (w / 2 + 1));
    fwd = fftw_plan_dft_r2c_2d(h, w, real, cplx, FFTW_ESTIMATE);
  }
  ~Plan2d() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_free(real);
    fftw_free(cplx);
  }
  Plan2d(const Plan2d&) = delete;
  Plan2d& operator=(const Plan2d&) = delete;
};

Plan1d& plan1d_for(int n) {
  thread_local std::map<int, std::unique_ptr<Plan1d>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<Plan1d>(n)).first;
  return *it->second;
}

Plan2d& plan2d_for(int h, int w) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<Plan2d>> cache;
  auto key = std::make_pair(h, w);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<Plan2d>(h, w)).first;
  return *it->second;
}

}  // namespace

std::vector<std::complex<double>> rfft(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  if (n < 2) throw std::invalid_argument("rfft: need at least 2 samples");
  Plan1d& p = plan1d_for(n);
  std::memcpy(p.real, x.data(), sizeof(double) * static_cast<std::size_t>(n));
  fftw_execute(p.fwd);
  const int bins = n / 2 + 1;
  std::vector<std::complex<double>> out(static_cast<std::size_t>(bins));
  for (int k = 0; k < bins; ++k) out[static_cast<std::size_t>(k)] = {p.cplx[k][0], p.cplx[k][1]};
  return out;
}

std::vector<double> irfft(const std::vector<std::complex<double>>& half, int n) {
  if (n < 2) throw std::invalid_argument("irfft: need at least 2 samples");
  const int bins = n / 2 + 1;
  if (static_cast<int>(half.size()) != bins)
    throw std::invalid_argument("irfft: half spectrum size does not match n");
  Plan1d& p = plan1d_for(n);
  for (int k = 0; k < bins; ++k) {
    p.cplx[k][0] = half[static_cast<std::size_t>(k)].real();
    p.cplx[k][1] = half[static_cast<std::size_t>(k)].imag();
  }
  fftw_execute(p.inv);
  std::vector<double> out(static_cast<std::size_t>(n));
  const double scale = 1.0 / n;
  for (int t = 0; t < n; ++t) out[static_cast<std::size_t>(t)] = p.real[t] * scale;
  return out;
}

std::vector<std::complex<double>> rfft2(const std::vector<double>& data, int h, int w) {
  if (h < 2 || w < 2) throw std::invalid_argument("rfft2: need at least 2x2");
  if (static_cast<int>(data.size()) != h * w)
    throw std::invalid_argument("rfft2: data size does not match h*w");
  Plan2d& p = plan2d_for(h, w);
  std::memcpy(p.real, data.data(), sizeof(double) * data.size());
  fftw_execute(p.fwd);
  const std::size_t bins = static_cast<std::size_t>(h) * (w / 2 + 1);
  std::vector<std::complex<double>> out(bins);
  for (std::size_t k = 0; k < bins; ++k) out[k] = {p.cplx[k][0], p.cplx[k][1]};
  return out;
}

}  // namespace veploop::fft
