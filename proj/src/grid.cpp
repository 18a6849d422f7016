#include "curveflow/grid.hpp"

#include <string>

#include "curveflow/errors.hpp"

namespace curveflow {

AngleGrid::AngleGrid(std::size_t n) : n_(n) {
  if (n < 8 || n % 2 != 0) {
    throw InvalidGrid("angle grid size must be even and >= 8, got " + std::to_string(n));
  }
}

}  // namespace curveflow
