#include "qcap/qmath.hpp"

#include "qcap/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qcap {

DimLayout::DimLayout(std::vector<int> dims) : dims_(std::move(dims)) {
  for (int d : dims_) {
    if (d < 1) throw InvalidArgument("subsystem dimension must be >= 1, got " + std::to_string(d));
    total_ *= d;
  }
}

DimLayout DimLayout::concat(const DimLayout& other) const {
  std::vector<int> dims = dims_;
  dims.insert(dims.end(), other.dims_.begin(), other.dims_.end());
  return DimLayout(std::move(dims));
}

DimLayout DimLayout::select(std::span<const int> keep) const {
  std::vector<int> dims;
  dims.reserve(keep.size());
  for (int k : keep) {
    if (k < 0 || k >= num_subsystems())
      throw InvalidArgument("subsystem index " + std::to_string(k) + " out of range");
    dims.push_back(dims_[static_cast<std::size_t>(k)]);
  }
  return DimLayout(std::move(dims));
}

double hermiticity_defect(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

namespace {

void check_shape(const Matrix& m, const DimLayout& layout) {
  if (m.rows() != m.cols()) throw InvalidArgument("density matrix must be square");
  if (m.rows() != layout.total())
    throw InvalidArgument("matrix side " + std::to_string(m.rows()) +
                          " does not match layout total " + std::to_string(layout.total()));
}

void check_trace(const Matrix& m) {
  const Complex tr = m.trace();
  if (std::abs(tr.real() - 1.0) > tol::kTrace || std::abs(tr.imag()) > tol::kTrace)
    throw InvalidArgument("density matrix trace is " + std::to_string(tr.real()) + ", expected 1");
}

}  // namespace

DensityMatrix::DensityMatrix(Matrix m, DimLayout layout) : m_(std::move(m)), layout_(std::move(layout)) {
  check_shape(m_, layout_);
  const double herm = hermiticity_defect(m_);
  if (herm > tol::kHermitian)
    throw InvalidArgument("density matrix not Hermitian (defect " + std::to_string(herm) + ")");
  check_trace(m_);
  m_ = 0.5 * (m_ + m_.adjoint()).eval();
  const RealVector ev = Eigen::SelfAdjointEigenSolver<Matrix>(m_, Eigen::EigenvaluesOnly).eigenvalues();
  if (ev.size() > 0 && ev.minCoeff() < -tol::kNegativeEigen)
    throw InvalidArgument("density matrix has negative eigenvalue " + std::to_string(ev.minCoeff()));
}

DensityMatrix::DensityMatrix(Matrix m) : DensityMatrix(m, DimLayout{static_cast<int>(m.rows())}) {}

DensityMatrix::DensityMatrix(TrustedTag, Matrix m, DimLayout layout)
    : m_(std::move(m)), layout_(std::move(layout)) {}

DensityMatrix DensityMatrix::trusted(Matrix m, DimLayout layout) {
  check_shape(m, layout);
  Matrix h = 0.5 * (m + m.adjoint());
  const double tr = h.trace().real();
  if (!(std::abs(tr - 1.0) <= 1e-8))
    throw InvariantViolation("state trace drifted to " + std::to_string(tr));
  return DensityMatrix(TrustedTag{}, std::move(h), std::move(layout));
}

DensityMatrix DensityMatrix::flat(const DimLayout& layout) {
  const int d = layout.total();
  return DensityMatrix(TrustedTag{}, Matrix::Identity(d, d) / static_cast<double>(d), layout);
}

DensityMatrix DensityMatrix::pure(const Vector& psi, DimLayout layout) {
  const double n = psi.norm();
  if (n == 0.0) throw InvalidArgument("zero state vector");
  const Vector v = psi / n;
  Matrix m = v * v.adjoint();
  check_shape(m, layout);
  return DensityMatrix(TrustedTag{}, std::move(m), std::move(layout));
}

DensityMatrix DensityMatrix::basis(int d, int k) {
  if (k < 0 || k >= d) throw InvalidArgument("basis index out of range");
  Matrix m = Matrix::Zero(d, d);
  m(k, k) = 1.0;
  return DensityMatrix(TrustedTag{}, std::move(m), DimLayout{d});
}

DensityMatrix DensityMatrix::ebit(int d) {
  Vector v = Vector::Zero(d * d);
  for (int i = 0; i < d; ++i) v(i * d + i) = 1.0;
  return pure(v, DimLayout{d, d});
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix::trusted(kron(a.matrix(), b.matrix()), a.layout().concat(b.layout()));
}

Matrix partial_trace(const Matrix& m, const DimLayout& layout, std::span<const int> keep) {
  if (keep.empty()) throw InvalidArgument("partial_trace needs at least one kept subsystem");
  if (m.rows() != layout.total() || m.cols() != layout.total())
    throw InvalidArgument("partial_trace: matrix does not match layout");
  const int n = layout.num_subsystems();
  std::vector<bool> kept(static_cast<std::size_t>(n), false);
  int prev = -1;
  for (int k : keep) {
    if (k < 0 || k >= n) throw InvalidArgument("partial_trace: index " + std::to_string(k) + " out of range");
    if (k <= prev) throw InvalidArgument("partial_trace: keep indices must be strictly increasing");
    kept[static_cast<std::size_t>(k)] = true;
    prev = k;
  }

  // Split every full index into (kept, traced) mixed-radix components.
  const int total = layout.total();
  std::vector<int> kept_idx(static_cast<std::size_t>(total)), traced_idx(static_cast<std::size_t>(total));
  int kept_total = 1, traced_total = 1;
  for (int k = 0; k < n; ++k) (kept[static_cast<std::size_t>(k)] ? kept_total : traced_total) *= layout.dim(k);
  for (int r = 0; r < total; ++r) {
    int rem = r, kmul = 1, tmul = 1, ki = 0, ti = 0;
    for (int k = n - 1; k >= 0; --k) {
      const int d = layout.dim(k);
      const int digit = rem % d;
      rem /= d;
      if (kept[static_cast<std::size_t>(k)]) {
        ki += digit * kmul;
        kmul *= d;
      } else {
        ti += digit * tmul;
        tmul *= d;
      }
    }
    kept_idx[static_cast<std::size_t>(r)] = ki;
    traced_idx[static_cast<std::size_t>(r)] = ti;
  }
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(traced_total));
  for (int r = 0; r < total; ++r) groups[static_cast<std::size_t>(traced_idx[static_cast<std::size_t>(r)])].push_back(r);

  Matrix out = Matrix::Zero(kept_total, kept_total);
  for (const auto& g : groups)
    for (int r : g)
      for (int c : g) out(kept_idx[static_cast<std::size_t>(r)], kept_idx[static_cast<std::size_t>(c)]) += m(r, c);
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& s, std::span<const int> keep) {
  Matrix out = partial_trace(s.matrix(), s.layout(), keep);
  return DensityMatrix::trusted(std::move(out), s.layout().select(keep));
}

RealVector hermitian_eigenvalues(const Matrix& m) {
  const double herm = hermiticity_defect(m);
  if (herm > tol::kHermitian)
    throw InvalidArgument("matrix not Hermitian (defect " + std::to_string(herm) + ")");
  return Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

double shannon_entropy(std::span<const double> probs) {
  double s = 0.0;
  for (double p : probs)
    if (p > tol::kEigenClip) s -= p * std::log2(p);
  return s;
}

double von_neumann_entropy(const Matrix& m) {
  const RealVector ev = hermitian_eigenvalues(m);
  if (ev.size() > 0 && ev.minCoeff() < -tol::kNegativeEigen)
    throw InvariantViolation("entropy of a matrix with negative eigenvalue " + std::to_string(ev.minCoeff()));
  return shannon_entropy(std::span<const double>(ev.data(), static_cast<std::size_t>(ev.size())));
}

double von_neumann_entropy(const DensityMatrix& s) { return von_neumann_entropy(s.matrix()); }

Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const RealVector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("fidelity: dimension mismatch");
  // sqrt F is the trace norm of sqrt(a) sqrt(b); singular values avoid taking
  // square roots of rounding noise in the rank-deficient case.
  const Matrix m = psd_sqrt(a.matrix()) * psd_sqrt(b.matrix());
  const double s = Eigen::JacobiSVD<Matrix>(m).singularValues().sum();
  return std::clamp(s * s, 0.0, 1.0);
}

double trace_distance(const Matrix& a, const Matrix& b) {
  Matrix diff = a - b;
  diff = 0.5 * (diff + diff.adjoint()).eval();
  const RealVector ev = Eigen::SelfAdjointEigenSolver<Matrix>(diff, Eigen::EigenvaluesOnly).eigenvalues();
  return 0.5 * ev.cwiseAbs().sum();
}

namespace {

Complex complex_normal(Rng& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

}  // namespace

DensityMatrix random_density(Rng& rng, int dim) {
  if (dim < 1) throw InvalidArgument("random_density: dim must be >= 1");
  // Bartlett factor of a complex Wishart matrix: |L_ii|^2 ~ Gamma(dim - i),
  // strictly lower entries standard complex normal.
  Matrix l = Matrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    std::gamma_distribution<double> g(static_cast<double>(dim - i), 1.0);
    l(i, i) = std::sqrt(g(rng));
    for (int j = 0; j < i; ++j) l(i, j) = complex_normal(rng);
  }
  Matrix a = l * l.adjoint();
  a /= a.trace().real();
  return DensityMatrix::trusted(std::move(a), DimLayout{dim});
}

DensityMatrix random_density(std::uint64_t seed, int dim) {
  Rng rng(seed);
  return random_density(rng, dim);
}

DensityMatrix random_pure(Rng& rng, int dim) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = complex_normal(rng);
  return DensityMatrix::pure(v, DimLayout{dim});
}

Matrix random_unitary(Rng& rng, int dim) {
  if (dim < 1) throw InvalidArgument("random_unitary: dim must be >= 1");
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = complex_normal(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const Complex rjj = r(j, j);
    const double mag = std::abs(rjj);
    q.col(j) *= (mag > 0.0) ? rjj / mag : Complex(1.0);
  }
  return q;
}

Matrix random_unitary(std::uint64_t seed, int dim) {
  Rng rng(seed);
  return random_unitary(rng, dim);
}

}  // namespace qcap
