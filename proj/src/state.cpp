#include "polrng/state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "polrng/error.hpp"

namespace polrng {

namespace {

void check_common(const ComplexMatrix& m) {
  if (m.dim() != 2 && m.dim() != 4) {
    throw Error(ErrorKind::InvalidDimension,
                "density matrix must have dim 2 or 4, got " + std::to_string(m.dim()));
  }
  if (!m.is_hermitian(kEigTol)) {
    throw Error(ErrorKind::Validation, "density matrix is not Hermitian within 1e-9");
  }
  const Complex tr = m.trace();
  if (std::abs(tr.real() - 1.0) > kEigTol || std::abs(tr.imag()) > kEigTol) {
    std::ostringstream msg;
    msg << "density matrix trace is " << tr.real() << ", expected 1 within 1e-9";
    throw Error(ErrorKind::Validation, msg.str());
  }
}

constexpr double kPureRankTol = 1e-14;

}  // namespace

DensityMatrix DensityMatrix::make(ComplexMatrix m, std::string label,
                                  std::optional<TensorOrder> order) {
  check_common(m);
  const double min_eig = hermitian_eig(m).eigenvalues.front();
  if (min_eig < -kEigTol) {
    std::ostringstream msg;
    msg << "density matrix has eigenvalue " << min_eig << " below -1e-9";
    throw Error(ErrorKind::NotPsd, msg.str());
  }
  return DensityMatrix(std::move(m), std::move(label), order, min_eig);
}

DensityMatrix DensityMatrix::measured(ComplexMatrix m, std::string label,
                                      std::optional<TensorOrder> order) {
  check_common(m);
  const double min_eig = hermitian_eig(m).eigenvalues.front();
  return DensityMatrix(std::move(m), std::move(label), order, min_eig);
}

DensityMatrix from_pure(const PureStateSpec& spec, std::string label) {
  const auto& amps = spec.amplitudes;
  if (amps.size() != 2 && amps.size() != 4) {
    throw Error(ErrorKind::InvalidDimension, "pure state needs 2 or 4 amplitudes");
  }
  double norm = 0.0;
  for (const auto& a : amps) norm += std::norm(a);
  if (std::abs(norm - 1.0) > kExactTol) {
    std::ostringstream msg;
    msg << "pure state amplitudes have squared norm " << norm << ", expected 1";
    throw Error(ErrorKind::Normalization, msg.str());
  }
  std::optional<TensorOrder> order;
  if (amps.size() == 4) order = TensorOrder::SignalSecond;
  return DensityMatrix::make(ComplexMatrix::outer(amps), std::move(label), order);
}

double coherence(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw Error(ErrorKind::InvalidDimension, "coherence needs a qubit state");
  return std::abs(rho(0, 1));
}

double coherence_phase(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw Error(ErrorKind::InvalidDimension, "coherence needs a qubit state");
  return std::arg(rho(0, 1));
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma, FidelityConvention convention) {
  if (rho.dim() != sigma.dim()) {
    throw Error(ErrorKind::InvalidDimension, "fidelity: states have different dimensions");
  }
  // Rank-1 argument: F = sqrt(<psi|other|psi>) exactly. The general route
  // takes square roots of round-off eigenvalues and loses ~1e-8 here.
  for (const auto& [pure, other] : {std::pair{&sigma, &rho}, std::pair{&rho, &sigma}}) {
    if (!pure->physical()) continue;
    const auto e = hermitian_eig(pure->matrix());
    const std::size_t top = e.eigenvalues.size() - 1;
    if (e.eigenvalues[top - 1] > kPureRankTol) continue;
    std::vector<Complex> psi(pure->dim());
    for (std::size_t r = 0; r < psi.size(); ++r) psi[r] = e.vectors(r, top);
    const auto other_psi = other->matrix().apply(psi);
    Complex overlap = 0.0;
    for (std::size_t r = 0; r < psi.size(); ++r) overlap += std::conj(psi[r]) * other_psi[r];
    const double f2 = std::clamp(overlap.real() * e.eigenvalues[top], 0.0, 1.0);
    return convention == FidelityConvention::Squared ? f2 : std::sqrt(f2);
  }
  // F is symmetric, so whichever argument is PSD can carry the square roots.
  const DensityMatrix* outer = &rho;
  const DensityMatrix* inner = &sigma;
  if (!rho.physical()) {
    if (!sigma.physical()) {
      throw Error(ErrorKind::NotPsd, "fidelity: neither state is positive semidefinite");
    }
    std::swap(outer, inner);
  }
  const ComplexMatrix root = psd_sqrt(outer->matrix());
  const ComplexMatrix m = root * inner->matrix() * root;
  double f = 0.0;
  for (double lambda : hermitian_eig(m).eigenvalues) {
    if (lambda < -kEigTol) {
      throw Error(ErrorKind::NotPsd, "fidelity: sqrt(rho) sigma sqrt(rho) is not PSD");
    }
    f += std::sqrt(std::max(lambda, 0.0));
  }
  f = std::clamp(f, 0.0, 1.0);
  return convention == FidelityConvention::Squared ? f * f : f;
}

DensityMatrix subspace_restrict(const DensityMatrix& rho, std::pair<std::size_t, std::size_t> indices) {
  const auto [i, j] = indices;
  if (rho.dim() != 4) throw Error(ErrorKind::InvalidDimension, "subspace_restrict needs a 4x4 state");
  if (i == j || i > 3 || j > 3) {
    throw Error(ErrorKind::Validation, "subspace indices must be distinct and in 0..3");
  }
  const double block_trace = rho(i, i).real() + rho(j, j).real();
  if (block_trace <= kEigTol) {
    throw Error(ErrorKind::DegenerateSubspace, "subspace has near-zero weight");
  }
  ComplexMatrix block{{rho(i, i), rho(i, j)}, {rho(j, i), rho(j, j)}};
  block *= 1.0 / block_trace;
  const std::string label = rho.label().empty() ? "subspace" : rho.label() + " subspace";
  return rho.physical() ? DensityMatrix::make(std::move(block), label)
                        : DensityMatrix::measured(std::move(block), label);
}

double purity(const DensityMatrix& rho) {
  double s = 0.0;
  for (const auto& z : rho.matrix().entries()) s += std::norm(z);
  return s;
}

DensityMatrix reduce_to_signal(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw Error(ErrorKind::InvalidDimension, "reduce_to_signal needs a 4x4 state");
  const TensorOrder order = rho.tensor_order().value_or(TensorOrder::SignalSecond);
  const TracedFactor traced =
      order == TensorOrder::SignalSecond ? TracedFactor::First : TracedFactor::Second;
  const std::string label = rho.label().empty() ? "signal" : rho.label() + " signal";
  ComplexMatrix reduced = partial_trace(rho.matrix(), traced);
  return rho.physical() ? DensityMatrix::make(std::move(reduced), label)
                        : DensityMatrix::measured(std::move(reduced), label);
}

std::string to_string(TensorOrder order) {
  return order == TensorOrder::SignalSecond ? "signal_second" : "signal_first";
}

TensorOrder tensor_order_from_string(const std::string& text) {
  if (text == "signal_second") return TensorOrder::SignalSecond;
  if (text == "signal_first") return TensorOrder::SignalFirst;
  throw Error(ErrorKind::Validation, "tensor_order must be signal_second or signal_first, got '" + text + "'");
}

}  // namespace polrng
