#include "qcap/channels.hpp"

#include "qcap/error.hpp"

#include <cmath>
#include <cstring>
#include <string>

namespace qcap {

namespace {

constexpr double kProbTol = 1e-12;

void check_probability(double p, const char* what) {
  if (!(p >= -kProbTol && p <= 1.0 + kProbTol))
    throw InvalidArgument(std::string(what) + " must lie in [0, 1], got " + std::to_string(p));
}

double clamp01(double p) { return std::min(1.0, std::max(0.0, p)); }

// Drops operators that are exactly zero, keeping at least one.
std::vector<Matrix> drop_zero(std::vector<Matrix> ks) {
  std::vector<Matrix> out;
  for (auto& k : ks)
    if (k.cwiseAbs().maxCoeff() > 0.0) out.push_back(std::move(k));
  if (out.empty() && !ks.empty()) out.push_back(std::move(ks.front()));
  return out;
}

}  // namespace

KrausChannel::KrausChannel(std::vector<Matrix> kraus, double tp_tol) : kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw InvalidArgument("channel needs at least one Kraus operator");
  dim_out_ = static_cast<int>(kraus_.front().rows());
  dim_in_ = static_cast<int>(kraus_.front().cols());
  if (dim_in_ < 1 || dim_out_ < 1) throw InvalidArgument("Kraus operators must be non-empty");
  for (const auto& k : kraus_)
    if (k.rows() != dim_out_ || k.cols() != dim_in_)
      throw InvalidArgument("Kraus operators must share dimensions");
  const double defect = trace_preservation_defect();
  if (!(defect <= tp_tol))
    throw InvalidArgument("channel is not trace preserving (defect " + std::to_string(defect) + ")");
}

double KrausChannel::trace_preservation_defect() const {
  Matrix sum = Matrix::Zero(dim_in_, dim_in_);
  for (const auto& k : kraus_) sum.noalias() += k.adjoint() * k;
  sum -= Matrix::Identity(dim_in_, dim_in_);
  return sum.cwiseAbs().maxCoeff();
}

std::uint64_t KrausChannel::content_hash() const {
  // FNV-1a over the raw bytes.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  mix(&dim_in_, sizeof dim_in_);
  mix(&dim_out_, sizeof dim_out_);
  for (const auto& k : kraus_) mix(k.data(), sizeof(Complex) * static_cast<std::size_t>(k.size()));
  return h;
}

bool KrausChannel::operator==(const KrausChannel& o) const {
  if (dim_in_ != o.dim_in_ || dim_out_ != o.dim_out_ || kraus_.size() != o.kraus_.size()) return false;
  for (std::size_t i = 0; i < kraus_.size(); ++i)
    if (kraus_[i] != o.kraus_[i]) return false;
  return true;
}

double choi_marginal_defect(const Matrix& m, int d_out, int d_in) {
  const int keep_input[] = {1};
  const Matrix marg = partial_trace(m, DimLayout{d_out, d_in}, keep_input);
  return (marg - Matrix::Identity(d_in, d_in) / static_cast<double>(d_in)).cwiseAbs().maxCoeff();
}

ChoiState::ChoiState(DensityMatrix state, double marginal_tol) : state_(std::move(state)) {
  if (state_.layout().num_subsystems() != 2)
    throw InvalidArgument("Choi state needs a bipartite [output, input] layout");
  const double defect = choi_marginal_defect(state_.matrix(), dim_out(), dim_in());
  if (!(defect <= marginal_tol))
    throw InvariantViolation("Choi marginal constraint violated (defect " + std::to_string(defect) + ")");
}

ChoiState::ChoiState(const Matrix& m, int d_out, int d_in, double marginal_tol)
    : ChoiState(DensityMatrix(m, DimLayout{d_out, d_in}), marginal_tol) {}

Matrix apply(const KrausChannel& ch, const Matrix& rho) {
  if (rho.rows() != ch.dim_in() || rho.cols() != ch.dim_in())
    throw InvalidArgument("apply: state dimension " + std::to_string(rho.rows()) +
                          " does not match channel input " + std::to_string(ch.dim_in()));
  Matrix out = Matrix::Zero(ch.dim_out(), ch.dim_out());
  for (const auto& k : ch.kraus()) out.noalias() += k * rho * k.adjoint();
  return out;
}

DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& rho) {
  return DensityMatrix::trusted(apply(ch, rho.matrix()), DimLayout{ch.dim_out()});
}

ChoiState choi_of(const KrausChannel& ch) {
  const int d_in = ch.dim_in();
  const int d_out = ch.dim_out();
  // (K (x) 1)|omega> is the row-major flattening of K / sqrt(d_in).
  Matrix omega = Matrix::Zero(d_out * d_in, d_out * d_in);
  for (const auto& k : ch.kraus()) {
    Vector v(d_out * d_in);
    for (int a = 0; a < d_out; ++a)
      for (int i = 0; i < d_in; ++i) v(a * d_in + i) = k(a, i);
    omega.noalias() += v * v.adjoint();
  }
  omega /= static_cast<double>(d_in);
  return ChoiState(DensityMatrix::trusted(std::move(omega), DimLayout{d_out, d_in}), 1e-9);
}

KrausChannel kraus_from_choi(const ChoiState& omega) {
  const int d_in = omega.dim_in();
  const int d_out = omega.dim_out();
  Eigen::SelfAdjointEigenSolver<Matrix> es(static_cast<double>(d_in) * omega.matrix());
  std::vector<Matrix> ks;
  // Largest eigenvalue first so the dominant operator leads the list.
  for (Eigen::Index e = es.eigenvalues().size() - 1; e >= 0; --e) {
    const double lam = es.eigenvalues()(e);
    if (lam <= tol::kKrausRank) continue;
    Matrix k(d_out, d_in);
    for (int a = 0; a < d_out; ++a)
      for (int i = 0; i < d_in; ++i) k(a, i) = std::sqrt(lam) * es.eigenvectors()(a * d_in + i, e);
    ks.push_back(std::move(k));
  }
  if (ks.empty()) throw InvalidArgument("kraus_from_choi: Choi state has no support");
  try {
    return KrausChannel(std::move(ks), tol::kKrausFromChoiDefect);
  } catch (const InvalidArgument& e) {
    throw InvariantViolation(std::string("kraus_from_choi: ") + e.what());
  }
}

KrausChannel complementary(const KrausChannel& ch) {
  const int n = ch.num_kraus();
  std::vector<Matrix> ks;
  ks.reserve(static_cast<std::size_t>(ch.dim_out()));
  for (int k = 0; k < ch.dim_out(); ++k) {
    Matrix c(n, ch.dim_in());
    for (int i = 0; i < n; ++i) c.row(i) = ch.kraus()[static_cast<std::size_t>(i)].row(k);
    ks.push_back(std::move(c));
  }
  return KrausChannel(std::move(ks), 1e-9);
}

StinespringDilation stinespring(const KrausChannel& ch) {
  StinespringDilation s;
  s.dim_in = ch.dim_in();
  s.dim_out = ch.dim_out();
  s.dim_env = ch.num_kraus();
  s.isometry = Matrix::Zero(s.dim_out * s.dim_env, s.dim_in);
  for (int i = 0; i < s.dim_env; ++i)
    for (int a = 0; a < s.dim_out; ++a)
      s.isometry.row(a * s.dim_env + i) = ch.kraus()[static_cast<std::size_t>(i)].row(a);
  return s;
}

DensityMatrix purified_choi(const KrausChannel& ch) {
  const StinespringDilation s = stinespring(ch);
  const int d = s.dim_in;
  Vector v(s.dim_out * s.dim_env * d);
  // (V (x) 1) (1/sqrt d) sum_i |i>|i>
  for (int r = 0; r < s.dim_out * s.dim_env; ++r)
    for (int i = 0; i < d; ++i) v(r * d + i) = s.isometry(r, i) / std::sqrt(static_cast<double>(d));
  return DensityMatrix::pure(v, DimLayout{s.dim_out, s.dim_env, d});
}

DensityMatrix isi_readout(const ChoiState& omega, const DensityMatrix& rho) {
  const int d_in = omega.dim_in();
  if (rho.dim() != d_in)
    throw InvalidArgument("isi_readout: state dimension does not match Choi input");
  const Matrix prod = omega.matrix() * kron(Matrix::Identity(omega.dim_out(), omega.dim_out()),
                                            rho.matrix().transpose());
  const int keep_output[] = {0};
  Matrix out = static_cast<double>(d_in) * partial_trace(prod, omega.state().layout(), keep_output);
  return DensityMatrix::trusted(std::move(out), DimLayout{omega.dim_out()});
}

KrausChannel compose(const KrausChannel& outer, const KrausChannel& inner) {
  if (outer.dim_in() != inner.dim_out()) throw InvalidArgument("compose: dimension mismatch");
  std::vector<Matrix> ks;
  for (const auto& a : outer.kraus())
    for (const auto& b : inner.kraus()) ks.push_back(a * b);
  KrausChannel out(std::move(ks), 1e-9);
  if (out.num_kraus() > out.dim_in() * out.dim_out()) return kraus_from_choi(choi_of(out));
  return out;
}

KrausChannel tensor(const KrausChannel& a, const KrausChannel& b) {
  std::vector<Matrix> ks;
  ks.reserve(a.kraus().size() * b.kraus().size());
  for (const auto& x : a.kraus())
    for (const auto& y : b.kraus()) ks.push_back(kron(x, y));
  return KrausChannel(std::move(ks), 1e-9);
}

KrausChannel tensor_power(const KrausChannel& ch, int n) {
  if (n < 1) throw InvalidArgument("tensor_power: n must be >= 1");
  KrausChannel out = ch;
  for (int i = 1; i < n; ++i) out = tensor(out, ch);
  return out;
}

KrausChannel unitary_channel(const Matrix& u) { return KrausChannel({u}, 1e-9); }

Matrix pauli_matrix(int k) {
  Matrix m = Matrix::Zero(2, 2);
  switch (k) {
    case 0: m(0, 0) = 1; m(1, 1) = 1; break;
    case 1: m(0, 1) = 1; m(1, 0) = 1; break;
    case 2: m(0, 1) = Complex(0, -1); m(1, 0) = Complex(0, 1); break;
    case 3: m(0, 0) = 1; m(1, 1) = -1; break;
    default: throw InvalidArgument("pauli index must be 0..3");
  }
  return m;
}

namespace zoo {

KrausChannel identity(int d) {
  if (d < 1) throw InvalidArgument("identity: d must be >= 1");
  return KrausChannel({Matrix::Identity(d, d)});
}

KrausChannel pauli(double p0, double p1, double p2, double p3) {
  const double ps[] = {p0, p1, p2, p3};
  double sum = 0.0;
  for (double p : ps) {
    check_probability(p, "pauli probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-10)
    throw InvalidArgument("pauli probabilities must sum to 1, got " + std::to_string(sum));
  std::vector<Matrix> ks;
  for (int i = 0; i < 4; ++i) ks.push_back(std::sqrt(clamp01(ps[i]) / sum) * pauli_matrix(i));
  return KrausChannel(drop_zero(std::move(ks)));
}

KrausChannel dephasing(double p) {
  check_probability(p, "dephasing p");
  return pauli(1.0 - clamp01(p), 0.0, 0.0, clamp01(p));
}

KrausChannel depolarizing(double lambda, int d) {
  check_probability(lambda, "depolarizing lambda");
  if (d < 1) throw InvalidArgument("depolarizing: d must be >= 1");
  lambda = clamp01(lambda);
  // Weyl operators X^a Z^b average any state to 1/d.
  const double two_pi = 2.0 * std::acos(-1.0);
  const double d2 = static_cast<double>(d) * d;
  std::vector<Matrix> ks;
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      Matrix w = Matrix::Zero(d, d);
      for (int j = 0; j < d; ++j) w((j + a) % d, j) = std::polar(1.0, two_pi * b * j / d);
      const double weight = (a == 0 && b == 0) ? 1.0 - lambda + lambda / d2 : lambda / d2;
      ks.push_back(std::sqrt(weight) * w);
    }
  }
  return KrausChannel(drop_zero(std::move(ks)));
}

KrausChannel erasure(double q, int d) {
  check_probability(q, "erasure q");
  if (d < 1) throw InvalidArgument("erasure: d must be >= 1");
  q = clamp01(q);
  std::vector<Matrix> ks;
  Matrix keep = Matrix::Zero(d + 1, d);
  keep.topRows(d) = Matrix::Identity(d, d);
  ks.push_back(std::sqrt(1.0 - q) * keep);
  for (int j = 0; j < d; ++j) {
    Matrix e = Matrix::Zero(d + 1, d);
    e(d, j) = std::sqrt(q);
    ks.push_back(std::move(e));
  }
  return KrausChannel(drop_zero(std::move(ks)));
}

KrausChannel amplitude_damping(double gamma) {
  check_probability(gamma, "amplitude damping gamma");
  gamma = clamp01(gamma);
  Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  k1(0, 1) = std::sqrt(gamma);
  return KrausChannel(drop_zero({k0, k1}));
}

KrausChannel dephrasure(double p, double q) {
  check_probability(p, "dephrasure p");
  check_probability(q, "dephrasure q");
  p = clamp01(p);
  q = clamp01(q);
  Matrix embed = Matrix::Zero(3, 2);
  embed.topRows(2) = Matrix::Identity(2, 2);
  std::vector<Matrix> ks;
  ks.push_back(std::sqrt((1.0 - q) * (1.0 - p)) * embed);
  ks.push_back(std::sqrt((1.0 - q) * p) * embed * pauli_matrix(3));
  for (int j = 0; j < 2; ++j) {
    Matrix e = Matrix::Zero(3, 2);
    e(2, j) = std::sqrt(q);
    ks.push_back(std::move(e));
  }
  return KrausChannel(drop_zero(std::move(ks)));
}

KrausChannel replacer(const DensityMatrix& target, int dim_in) {
  if (dim_in < 1) throw InvalidArgument("replacer: dim_in must be >= 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(target.matrix());
  std::vector<Matrix> ks;
  for (Eigen::Index k = es.eigenvalues().size() - 1; k >= 0; --k) {
    const double lam = es.eigenvalues()(k);
    if (lam <= tol::kKrausRank) continue;
    for (int j = 0; j < dim_in; ++j) {
      Matrix m = Matrix::Zero(target.dim(), dim_in);
      m.col(j) = std::sqrt(lam) * es.eigenvectors().col(k);
      ks.push_back(std::move(m));
    }
  }
  return KrausChannel(std::move(ks), 1e-9);
}

}  // namespace zoo

}  // namespace qcap
