#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "polrng/linalg.hpp"
#include "polrng/optics.hpp"
#include "polrng/state.hpp"

namespace polrng {

// Stokes parameters. Single photon: 4 values (S0..S3). Two photons: 16
// values, S_ij stored at index 4*i + j. Index 1 is the DA axis (sigma_x),
// 2 the RL axis (sigma_y), 3 the HV axis (sigma_z); S0 and S00 are 1.
struct StokesVector {
  std::vector<double> values;

  double operator[](std::size_t i) const { return values[i]; }
  double at(std::size_t i, std::size_t j) const { return values[4 * i + j]; }
  bool two_photon() const noexcept { return values.size() == 16; }
};

// Pauli index whose eigenbasis a measurement basis resolves.
int pauli_axis(Basis basis);

StokesVector stokes_from_counts_single(const std::vector<CountRecord>& records);
StokesVector stokes_from_counts_two(const std::vector<CountRecord>& records);

// Raw linear inversion; Hermitian and unit trace, not necessarily PSD.
ComplexMatrix reconstruct_single(const StokesVector& s);
ComplexMatrix reconstruct_two(const StokesVector& s);

// Settings required for a complete tomography of the given dimension.
std::vector<MeasurementSetting> tomography_settings(std::size_t dim);

// Labels of required settings absent from `records`.
std::vector<std::string> missing_settings(const std::vector<CountRecord>& records, std::size_t dim);

// Eigenvalues of a Hermitian unit-trace matrix clipped onto the probability
// simplex (Frobenius-closest physical state). Eigenvalues are returned in
// the same order as given.
std::vector<double> truncate_spectrum(const std::vector<double>& eigenvalues);

DensityMatrix project_to_physical(const ComplexMatrix& raw, std::string label = "projected");

struct Reconstruction {
  StokesVector stokes;
  ComplexMatrix raw;
  std::vector<double> raw_eigenvalues;
  DensityMatrix projected;
  std::vector<double> projected_eigenvalues;
};

Reconstruction reconstruct(const std::vector<CountRecord>& records, std::size_t dim);

struct IntervalStats {
  double mean = 0.0;
  double stddev = 0.0;
  double lower = 0.0;  // 2.5th percentile
  double upper = 0.0;  // 97.5th percentile
};

struct BootstrapResult {
  std::size_t resamples = 0;
  std::vector<double> entry_std_real;  // row-major, dim*dim
  std::vector<double> entry_std_imag;
  IntervalStats coherence;
  IntervalStats min_entropy_bound;
  std::optional<IntervalStats> fidelity;
};

struct BootstrapOptions {
  std::size_t resamples = 200;
  std::uint64_t seed = 0;
  // When false every resample reuses the observed frequencies unchanged
  // (the infinite-count limit).
  bool resample = true;
  std::optional<DensityMatrix> target;
  FidelityConvention convention = FidelityConvention::Root;
};

// Multinomial bootstrap over every record, with full reconstruction and
// projection per resample. For dim 4, C is taken from the (HH, VV)
// coincidence subspace.
BootstrapResult bootstrap_uncertainty(const std::vector<CountRecord>& records, std::size_t dim,
                                      const BootstrapOptions& options);

}  // namespace polrng
