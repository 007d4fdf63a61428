#include "polrng/fixtures.hpp"

#include <numbers>

namespace polrng::fixtures {

using C = Complex;

DensityMatrix measured_diagonal_state() {
  return DensityMatrix::measured({{0.493, C(0.449, 0.144)}, {C(0.449, -0.144), 0.507}}, "measured |D> photon");
}

DensityMatrix measured_bell_state() {
  ComplexMatrix m{
      {0.409, C(-0.111, 0.052), C(0.009, -0.148), C(0.360, -0.182)},
      {C(-0.111, -0.052), 0.056, C(-0.003, -0.006), C(-0.052, -0.065)},
      {C(0.009, 0.148), C(-0.003, 0.006), 0.030, C(-0.019, 0.096)},
      {C(0.360, 0.182), C(-0.052, 0.065), C(-0.019, -0.096), 0.505},
  };
  return DensityMatrix::measured(std::move(m), "measured Phi+ pair", TensorOrder::SignalSecond);
}

ComplexMatrix published_subspace_block() {
  return {{0.447, C(0.394, -0.199)}, {C(0.394, 0.199), 0.553}};
}

ComplexMatrix published_reduced_state() {
  return {{0.439, C(-0.130, 0.148)}, {C(-0.130, -0.148), 0.561}};
}

DensityMatrix diagonal_target() {
  const double s = 1.0 / std::numbers::sqrt2;
  return from_pure({{s, s}}, "|D>");
}

DensityMatrix phi_plus_target() {
  const double s = 1.0 / std::numbers::sqrt2;
  return from_pure({{s, 0.0, 0.0, s}}, "|Phi+>");
}

}  // namespace polrng::fixtures
