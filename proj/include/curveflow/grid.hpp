#pragma once

#include <cstddef>
#include <numbers>

namespace curveflow {

/// Uniform periodic grid on the tangent angle, theta_j = 2*pi*j/n.
/// n must be even and at least 8.
class AngleGrid {
 public:
  explicit AngleGrid(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return 2.0 * std::numbers::pi / static_cast<double>(n_); }
  double theta(std::size_t j) const noexcept { return spacing() * static_cast<double>(j); }

  friend bool operator==(const AngleGrid&, const AngleGrid&) = default;

 private:
  std::size_t n_;
};

}  // namespace curveflow
