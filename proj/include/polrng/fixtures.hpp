#pragma once

#include "polrng/state.hpp"

namespace polrng::fixtures {

// Tomographically measured single-photon state prepared close to |D>.
DensityMatrix measured_diagonal_state();

// Tomographically measured two-photon state prepared close to |Phi+>,
// basis order {HH, HV, VH, VV} with the signal photon as second factor.
// Not positive semidefinite (smallest eigenvalue about -0.088).
DensityMatrix measured_bell_state();

// Published HH/VV subspace block and signal-photon reduced state.
ComplexMatrix published_subspace_block();
ComplexMatrix published_reduced_state();

DensityMatrix diagonal_target();  // |D><D|
DensityMatrix phi_plus_target();  // |Phi+><Phi+|

}  // namespace polrng::fixtures
