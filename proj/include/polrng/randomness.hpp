#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polrng/state.hpp"

namespace polrng {

// -log2 max(p0, p1). Throws InvalidDistribution unless p0, p1 >= 0 and
// p0 + p1 = 1 within 1e-9.
double min_entropy_empirical(double p0, double p1);

// Lower bound on the min-entropy of an HV measurement from the magnitude
// of the HV off-diagonal element: -log2((1 + sqrt(1 - 4c^2)) / 2).
// Coherences up to 0.5 + 1e-12 are clamped; larger values throw.
double min_entropy_bound(double coherence);

// Min-entropy of an HV measurement on a pure state with |<H|psi>|^2 = a_sq.
double min_entropy_pure(double a_sq);

struct ChshAngles {
  double a = 0.0;
  double a_prime = 45.0;
  double b = 22.5;
  double b_prime = 67.5;
};

// E(alpha, beta) = Tr[rho (sigma(alpha) x sigma(beta))] for linear
// analyzers at the given angles (degrees).
double chsh_correlation(const DensityMatrix& rho, double alpha_deg, double beta_deg);

// S = E(a,b) - E(a,b') + E(a',b) + E(a',b').
double chsh_s(const DensityMatrix& rho, const ChshAngles& angles = {});

enum class BitScheme { SingleHV, CoincidenceHHVV };

std::string to_string(BitScheme scheme);
BitScheme bit_scheme_from_string(const std::string& text);

// The 2x2 matrix whose HV statistics generate the bits: the state itself
// (dim 2), the signal-arm reduced state (dim 4, single_HV), or the
// renormalized HH/VV block (dim 4, coincidence).
DensityMatrix bit_generating_state(const DensityMatrix& rho, BitScheme scheme);

struct AuditReport {
  BitScheme scheme = BitScheme::SingleHV;
  std::array<double, 2> probabilities{};
  double coherence_C = 0.0;
  double min_entropy_bound = 0.0;
  double empirical_min_entropy = 0.0;
  std::optional<double> fidelity_to_target;
  std::optional<double> chsh_S;
  // Fraction of coincidences outside HH/VV that the coincidence scheme drops.
  std::optional<double> discard_rate;
  std::uint64_t raw_length = 0;
  std::uint64_t extractable_bits = 0;
  DensityMatrix bit_state = DensityMatrix::make(ComplexMatrix::diagonal({1.0, 0.0}));
};

struct AuditOptions {
  std::optional<DensityMatrix> target;
  FidelityConvention convention = FidelityConvention::Root;
  ChshAngles chsh_angles;
  std::uint64_t raw_length = 0;
};

AuditReport audit(const DensityMatrix& rho, BitScheme scheme, const AuditOptions& options = {});

// floor(bound * raw_length), the Toeplitz output budget.
std::uint64_t entropy_budget(double min_entropy_bound, std::uint64_t raw_length);

}  // namespace polrng
