#include "polrng/randomness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "polrng/error.hpp"
#include "polrng/linalg.hpp"

namespace polrng {

namespace {

// -log2 x, snapping x within 1e-12 of 1 to exactly 0 bits.
double neg_log2(double x) {
  if (std::abs(x - 1.0) <= 1e-12) return 0.0;
  return -std::log2(x);
}

ComplexMatrix linear_observable(double theta_deg) {
  const double t = theta_deg * std::numbers::pi / 180.0;
  const double c = std::cos(t), s = std::sin(t);
  // |t><t| - |t_perp><t_perp| with |t> = (c, s), |t_perp> = (-s, c).
  return {{c * c - s * s, 2.0 * c * s}, {2.0 * c * s, s * s - c * c}};
}

}  // namespace

double min_entropy_empirical(double p0, double p1) {
  if (!(p0 >= 0.0 && p1 >= 0.0) || std::abs(p0 + p1 - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "invalid bit distribution (" << p0 << ", " << p1 << ")";
    throw Error(ErrorKind::InvalidDistribution, msg.str());
  }
  return std::clamp(neg_log2(std::max(p0, p1)), 0.0, 1.0);
}

double min_entropy_bound(double coherence) {
  if (!(coherence >= 0.0) || coherence > 0.5 + 1e-12) {
    std::ostringstream msg;
    msg << "coherence " << coherence << " outside [0, 0.5]";
    throw Error(ErrorKind::InvalidCoherence, msg.str());
  }
  const double c = std::min(coherence, 0.5);
  const double guess = 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - 4.0 * c * c)));
  return std::clamp(neg_log2(guess), 0.0, 1.0);
}

double min_entropy_pure(double a_sq) {
  if (!(a_sq >= 0.0 && a_sq <= 1.0)) {
    std::ostringstream msg;
    msg << "a^2 = " << a_sq << " outside [0, 1]";
    throw Error(ErrorKind::InvalidDistribution, msg.str());
  }
  return neg_log2(std::max(a_sq, 1.0 - a_sq));
}

double chsh_correlation(const DensityMatrix& rho, double alpha_deg, double beta_deg) {
  if (rho.dim() != 4) throw Error(ErrorKind::InvalidDimension, "CHSH needs a two-photon state");
  const ComplexMatrix obs = tensor_product(linear_observable(alpha_deg), linear_observable(beta_deg));
  return (rho.matrix() * obs).trace().real();
}

double chsh_s(const DensityMatrix& rho, const ChshAngles& angles) {
  return chsh_correlation(rho, angles.a, angles.b) - chsh_correlation(rho, angles.a, angles.b_prime) +
         chsh_correlation(rho, angles.a_prime, angles.b) + chsh_correlation(rho, angles.a_prime, angles.b_prime);
}

std::string to_string(BitScheme scheme) {
  return scheme == BitScheme::SingleHV ? "single_HV" : "coincidence_HH_VV";
}

BitScheme bit_scheme_from_string(const std::string& text) {
  if (text == "single_HV") return BitScheme::SingleHV;
  if (text == "coincidence_HH_VV") return BitScheme::CoincidenceHHVV;
  throw Error(ErrorKind::Validation, "unknown scheme '" + text + "' (expected single_HV or coincidence_HH_VV)");
}

DensityMatrix bit_generating_state(const DensityMatrix& rho, BitScheme scheme) {
  if (scheme == BitScheme::CoincidenceHHVV) {
    if (rho.dim() != 4) {
      throw Error(ErrorKind::InvalidDimension, "coincidence_HH_VV needs a two-photon state");
    }
    return subspace_restrict(rho, {0, 3});
  }
  return rho.dim() == 2 ? rho : reduce_to_signal(rho);
}

AuditReport audit(const DensityMatrix& rho, BitScheme scheme, const AuditOptions& options) {
  AuditReport report;
  report.scheme = scheme;
  report.bit_state = bit_generating_state(rho, scheme);
  const auto& bits = report.bit_state;
  report.probabilities = {bits(0, 0).real(), bits(1, 1).real()};
  report.coherence_C = coherence(bits);
  report.min_entropy_bound = min_entropy_bound(report.coherence_C);
  report.empirical_min_entropy = min_entropy_empirical(report.probabilities[0], report.probabilities[1]);
  if (options.target) report.fidelity_to_target = fidelity(rho, *options.target, options.convention);
  if (rho.dim() == 4) report.chsh_S = chsh_s(rho, options.chsh_angles);
  if (scheme == BitScheme::CoincidenceHHVV) report.discard_rate = rho(1, 1).real() + rho(2, 2).real();
  report.raw_length = options.raw_length;
  report.extractable_bits = entropy_budget(report.min_entropy_bound, options.raw_length);
  return report;
}

std::uint64_t entropy_budget(double min_entropy_bound, std::uint64_t raw_length) {
  return static_cast<std::uint64_t>(std::floor(min_entropy_bound * static_cast<double>(raw_length)));
}

}  // namespace polrng
