#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace curveflow {

using ComplexVector = std::vector<std::complex<double>>;

/// Real-to-complex discrete Fourier transforms on a periodic grid of n
/// samples, backed by FFTW. Coefficients are normalized so that
/// f_j = sum_k c_k exp(i k theta_j), k = 0..n/2 holding the half spectrum.
///
/// Instances are cached per size and shared between threads; plan creation
/// is serialized internally, execution uses the thread-safe new-array API.
class SpectralOps {
 public:
  static const SpectralOps& for_size(std::size_t n);

  ~SpectralOps();
  SpectralOps(const SpectralOps&) = delete;
  SpectralOps& operator=(const SpectralOps&) = delete;

  std::size_t size() const noexcept { return n_; }

  ComplexVector forward(std::span<const double> values) const;
  std::vector<double> inverse(std::span<const std::complex<double>> coeffs) const;

  /// Derivative of order 1 or 2. Odd orders drop the Nyquist mode.
  std::vector<double> derivative(std::span<const double> values, int order) const;

 private:
  explicit SpectralOps(std::size_t n);

  std::size_t n_;
  void* forward_plan_;
  void* inverse_plan_;
};

/// Convenience wrapper over SpectralOps::for_size(values.size()).derivative.
std::vector<double> spectral_derivative(std::span<const double> values, int order);

/// Trapezoid rule over one period, h * sum(values) with h = 2*pi/n.
double periodic_integral(std::span<const double> values);

}  // namespace curveflow
