#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace polrng {

using Complex = std::complex<double>;

inline constexpr double kExactTol = 1e-12;
inline constexpr double kEigTol = 1e-9;

// Dense square complex matrix, row-major. Only dimensions 2 and 4 are used
// by the rest of the library but nothing here depends on that.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim);
  ComplexMatrix(std::size_t dim, std::vector<Complex> entries);
  // Row-major nested initializer, e.g. {{1, 0}, {0, 1}}.
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix diagonal(const std::vector<double>& values);
  // |v><v|
  static ComplexMatrix outer(const std::vector<Complex>& v);

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<Complex>& entries() const noexcept { return entries_; }

  Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * dim_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const {
    return entries_[r * dim_ + c];
  }

  ComplexMatrix adjoint() const;
  Complex trace() const;
  bool is_hermitian(double tol = kEigTol) const;
  // Largest absolute entry difference; infinity on dimension mismatch.
  double max_abs_diff(const ComplexMatrix& other) const;
  bool approx_equal(const ComplexMatrix& other, double tol = kExactTol) const {
    return max_abs_diff(other) <= tol;
  }
  double frobenius_norm() const;
  std::vector<Complex> apply(const std::vector<Complex>& v) const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(Complex s);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> entries_;
};

// Columns of `vectors` are orthonormal eigenvectors; eigenvalues ascending.
struct EigenDecomposition {
  std::vector<double> eigenvalues;
  ComplexMatrix vectors;

  ComplexMatrix reconstruct() const;
};

enum class TracedFactor { First, Second };

// Pauli matrices indexed 0..3 as (I, X, Y, Z).
const ComplexMatrix& pauli(int index);

// Kronecker product: result(i*b.dim+k, j*b.dim+l) = a(i,j) * b(k,l).
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

// Reduces a 4x4 two-qubit operator to the remaining 2x2 factor.
ComplexMatrix partial_trace(const ComplexMatrix& rho, TracedFactor traced);

// Cyclic complex Jacobi. Throws Validation on non-Hermitian input.
EigenDecomposition hermitian_eig(const ComplexMatrix& m);

// Principal square root of a PSD matrix. Eigenvalues in [-neg_tol, 0) are
// clamped to zero; anything below that throws NotPsd.
ComplexMatrix psd_sqrt(const ComplexMatrix& m, double neg_tol = kEigTol);

}  // namespace polrng
