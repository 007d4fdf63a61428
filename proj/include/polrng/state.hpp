#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polrng/linalg.hpp"

namespace polrng {

// Which tensor factor of a two-photon matrix holds the signal photon.
enum class TensorOrder { SignalSecond, SignalFirst };

// A polarization density matrix of dimension 2 or 4.
//
// `make` enforces the full physical constraints (Hermitian, unit trace,
// eigenvalues >= -1e-9). `measured` keeps the Hermitian and trace checks
// but admits a slightly unphysical spectrum, which is what linear-inversion
// tomography on finite data produces; such states report physical() ==
// false and their most negative eigenvalue.
class DensityMatrix {
 public:
  static DensityMatrix make(ComplexMatrix m, std::string label = {},
                            std::optional<TensorOrder> order = std::nullopt);
  static DensityMatrix measured(ComplexMatrix m, std::string label = {},
                                std::optional<TensorOrder> order = std::nullopt);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return matrix_.dim(); }
  const std::string& label() const noexcept { return label_; }
  std::optional<TensorOrder> tensor_order() const noexcept { return order_; }
  bool physical() const noexcept { return min_eigenvalue_ >= -kEigTol; }
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

  DensityMatrix with_label(std::string label) const {
    DensityMatrix copy = *this;
    copy.label_ = std::move(label);
    return copy;
  }

  const Complex& operator()(std::size_t r, std::size_t c) const { return matrix_(r, c); }

 private:
  DensityMatrix(ComplexMatrix m, std::string label, std::optional<TensorOrder> order,
                double min_eig)
      : matrix_(std::move(m)), label_(std::move(label)), order_(order), min_eigenvalue_(min_eig) {}

  ComplexMatrix matrix_;
  std::string label_;
  std::optional<TensorOrder> order_;
  double min_eigenvalue_ = 0.0;
};

struct PureStateSpec {
  std::vector<Complex> amplitudes;
};

enum class FidelityConvention { Root, Squared };

DensityMatrix from_pure(const PureStateSpec& spec, std::string label = {});

// |rho(0,1)| for a qubit state.
double coherence(const DensityMatrix& rho);

// arg rho(0,1); the relative phase carried by the off-diagonal element.
double coherence_phase(const DensityMatrix& rho);

// Root: Tr sqrt(sqrt(rho) sigma sqrt(rho)). Squared: the same, squared.
// At least one argument must be physical; it supplies the inner roots.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma,
                FidelityConvention convention = FidelityConvention::Root);

// Renormalized 2x2 block on basis indices (i, j) of a two-photon state.
DensityMatrix subspace_restrict(const DensityMatrix& rho, std::pair<std::size_t, std::size_t> indices);

double purity(const DensityMatrix& rho);

// Single-photon state of the signal arm of a two-photon state.
DensityMatrix reduce_to_signal(const DensityMatrix& rho);

std::string to_string(TensorOrder order);
TensorOrder tensor_order_from_string(const std::string& text);

}  // namespace polrng
