#include "curveflow/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>

#include "curveflow/errors.hpp"

namespace curveflow {
namespace {

// FFTW's planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

const SpectralOps& SpectralOps::for_size(std::size_t n) {
  static std::mutex cache_mutex;
  static std::map<std::size_t, std::unique_ptr<SpectralOps>> cache;
  std::lock_guard lock(cache_mutex);
  auto& slot = cache[n];
  if (!slot) slot.reset(new SpectralOps(n));
  return *slot;
}

SpectralOps::SpectralOps(std::size_t n) : n_(n) {
  if (n < 2 || n % 2 != 0) {
    throw InvalidGrid("spectral operators need an even sample count, got " + std::to_string(n));
  }
  std::vector<double> real(n);
  ComplexVector spec(n / 2 + 1);
  const int size = static_cast<int>(n);
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_dft_r2c_1d(size, real.data(), as_fftw(spec.data()),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
  inverse_plan_ = fftw_plan_dft_c2r_1d(size, as_fftw(spec.data()), real.data(),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
}

SpectralOps::~SpectralOps() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

ComplexVector SpectralOps::forward(std::span<const double> values) const {
  if (values.size() != n_) throw InvalidParams("forward transform: size mismatch");
  std::vector<double> in(values.begin(), values.end());
  ComplexVector out(n_ / 2 + 1);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), in.data(), as_fftw(out.data()));
  const double scale = 1.0 / static_cast<double>(n_);
  for (auto& c : out) c *= scale;
  return out;
}

std::vector<double> SpectralOps::inverse(std::span<const std::complex<double>> coeffs) const {
  if (coeffs.size() != n_ / 2 + 1) throw InvalidParams("inverse transform: size mismatch");
  // c2r overwrites its input.
  ComplexVector in(coeffs.begin(), coeffs.end());
  std::vector<double> out(n_);
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), as_fftw(in.data()), out.data());
  return out;
}

std::vector<double> SpectralOps::derivative(std::span<const double> values, int order) const {
  if (order != 1 && order != 2) {
    throw InvalidParams("spectral derivative order must be 1 or 2, got " + std::to_string(order));
  }
  ComplexVector c = forward(values);
  const std::size_t nyquist = n_ / 2;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double wave = static_cast<double>(k);
    if (order == 1) {
      c[k] *= std::complex<double>(0.0, wave);
    } else {
      c[k] *= -wave * wave;
    }
  }
  if (order == 1) c[nyquist] = 0.0;
  return inverse(c);
}

std::vector<double> spectral_derivative(std::span<const double> values, int order) {
  return SpectralOps::for_size(values.size()).derivative(values, order);
}

double periodic_integral(std::span<const double> values) {
  const double h = 2.0 * std::numbers::pi / static_cast<double>(values.size());
  return h * std::accumulate(values.begin(), values.end(), 0.0);
}

}  // namespace curveflow
