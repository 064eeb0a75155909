#pragma once

// Dense complex linear algebra and entropies on multipartite Hilbert spaces.
//
// Conventions used throughout the library:
//   * subsystem 0 is the most significant factor of a Kronecker layout;
//   * entropies are in bits (log base 2).

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace qcap {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Explicit, seeded generator. Nothing in the library owns a global one.
using Rng = std::mt19937_64;

namespace tol {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kNegativeEigen = 1e-10;
inline constexpr double kEigenClip = 1e-12;
}  // namespace tol

class DimLayout {
 public:
  DimLayout() = default;
  explicit DimLayout(std::vector<int> dims);
  DimLayout(std::initializer_list<int> dims) : DimLayout(std::vector<int>(dims)) {}

  const std::vector<int>& dims() const { return dims_; }
  int num_subsystems() const { return static_cast<int>(dims_.size()); }
  int dim(int k) const { return dims_.at(static_cast<std::size_t>(k)); }
  // Product of all subsystem dimensions.
  int total() const { return total_; }

  DimLayout concat(const DimLayout& other) const;
  DimLayout select(std::span<const int> keep) const;

  bool operator==(const DimLayout&) const = default;

 private:
  std::vector<int> dims_;
  int total_ = 1;
};

// Hermitian, PSD, unit-trace matrix with a subsystem layout.
class DensityMatrix {
 public:
  // Validates every invariant; throws InvalidArgument on violation.
  DensityMatrix(Matrix m, DimLayout layout);
  explicit DensityMatrix(Matrix m);

  // For matrices that are valid by construction (channel outputs, decoded
  // parameters). Checks shape and trace, symmetrizes, skips the spectrum.
  static DensityMatrix trusted(Matrix m, DimLayout layout);

  static DensityMatrix flat(const DimLayout& layout);
  static DensityMatrix flat(int d) { return flat(DimLayout{d}); }
  static DensityMatrix pure(const Vector& psi, DimLayout layout);
  static DensityMatrix basis(int d, int k);
  // (1/sqrt d) sum_i |ii>, layout [d, d].
  static DensityMatrix ebit(int d);

  const Matrix& matrix() const { return m_; }
  const DimLayout& layout() const { return layout_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  struct TrustedTag {};
  DensityMatrix(TrustedTag, Matrix m, DimLayout layout);

  Matrix m_;
  DimLayout layout_;
};

Matrix kron(const Matrix& a, const Matrix& b);

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

// Raw partial trace of any square operator carrying `layout`; `keep` lists the
// surviving subsystems in increasing order.
Matrix partial_trace(const Matrix& m, const DimLayout& layout, std::span<const int> keep);
DensityMatrix partial_trace(const DensityMatrix& s, std::span<const int> keep);
inline DensityMatrix partial_trace(const DensityMatrix& s, std::initializer_list<int> keep) {
  return partial_trace(s, std::span<const int>(keep.begin(), keep.size()));
}

// Eigenvalues of a Hermitian matrix, ascending. Throws on non-Hermitian input.
RealVector hermitian_eigenvalues(const Matrix& m);

// -sum p log2 p with p < 1e-12 treated as zero.
double shannon_entropy(std::span<const double> probs);

double von_neumann_entropy(const Matrix& m);
double von_neumann_entropy(const DensityMatrix& s);

// Principal square root of a PSD matrix (negative eigenvalues clipped).
Matrix psd_sqrt(const Matrix& m);

// F(a, b) = || sqrt(a) sqrt(b) ||_1^2, in [0, 1].
double fidelity(const DensityMatrix& a, const DensityMatrix& b);

// (1/2) || a - b ||_1
double trace_distance(const Matrix& a, const Matrix& b);

// Hilbert-Schmidt random state L L^dagger / tr, L lower triangular.
DensityMatrix random_density(Rng& rng, int dim);
DensityMatrix random_density(std::uint64_t seed, int dim);
DensityMatrix random_pure(Rng& rng, int dim);

// Haar-distributed unitary (QR of a Ginibre matrix, phases fixed).
Matrix random_unitary(Rng& rng, int dim);
Matrix random_unitary(std::uint64_t seed, int dim);

// Largest absolute entry of m - m^dagger.
double hermiticity_defect(const Matrix& m);

}  // namespace qcap
