#include "qcap/qec.hpp"

#include "qcap/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qcap {

CodeProjector::CodeProjector(Matrix p) : p_(std::move(p)) {
  if (p_.rows() != p_.cols() || p_.rows() == 0) throw InvalidArgument("code projector must be square");
  if (hermiticity_defect(p_) > 1e-10) throw InvalidArgument("code projector is not Hermitian");
  if ((p_ * p_ - p_).cwiseAbs().maxCoeff() > 1e-10) throw InvalidArgument("code projector is not idempotent");
  const double tr = p_.trace().real();
  k_ = static_cast<int>(std::lround(tr));
  if (std::abs(tr - k_) > 1e-9 || k_ < 1)
    throw InvalidArgument("code projector trace " + std::to_string(tr) + " is not a positive integer");
  Eigen::SelfAdjointEigenSolver<Matrix> es(p_);
  // Eigenvalues ascend, so the code space is the last k columns.
  v_ = es.eigenvectors().rightCols(k_);
}

Matrix repetition3_isometry() {
  Matrix v = Matrix::Zero(8, 2);
  v(0, 0) = 1.0;
  v(7, 1) = 1.0;
  return v;
}

CodeProjector CodeProjector::repetition3() {
  const Matrix v = repetition3_isometry();
  CodeProjector code(v * v.adjoint());
  code.v_ = v;
  return code;
}

KLReport kl_check(const CodeProjector& code, const KrausChannel& ch, double tol) {
  if (code.dim() != ch.dim_in())
    throw InvalidArgument("code dimension " + std::to_string(code.dim()) + " does not match channel input " +
                          std::to_string(ch.dim_in()));
  const auto& e = ch.kraus();
  const int n = ch.num_kraus();
  KLReport r;
  r.c_matrix = Matrix::Zero(n, n);
  // Everything lives on the code space, so work with V^dagger E_i^dagger E_j V.
  const Matrix& v = code.isometry();
  const int k = code.code_dim();
  std::vector<Matrix> ek(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ek[static_cast<std::size_t>(i)] = e[static_cast<std::size_t>(i)] * v;
  // Block operator [V^dag E_i^dag E_j V - c_ij 1]_{ij}; its norm does not change
  // under unitary remixing of the Kraus list.
  Matrix blocks(n * k, n * k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Matrix block = ek[static_cast<std::size_t>(i)].adjoint() * ek[static_cast<std::size_t>(j)];
      const Complex c = block.trace() / static_cast<double>(k);
      r.c_matrix(i, j) = c;
      block.diagonal().array() -= c;
      blocks.block(i * k, j * k, k, k) = block;
    }
  blocks = 0.5 * (blocks + blocks.adjoint()).eval();
  r.residual = hermitian_eigenvalues(blocks).cwiseAbs().maxCoeff();
  r.satisfied = r.residual <= tol;
  const RealVector ev = hermitian_eigenvalues(r.c_matrix);
  for (Eigen::Index i = ev.size() - 1; i >= 0; --i)
    if (ev(i) > 1e-10) r.effective_error_probs.push_back(ev(i));
  r.degeneracy_rank = static_cast<int>(r.effective_error_probs.size());
  return r;
}

Superchannel encoder(const Matrix& isometry) {
  const KrausChannel v({isometry});
  return Superchannel::pre_processing(v, static_cast<int>(isometry.rows()));
}

KrausChannel exact_recovery(const CodeProjector& code, const KrausChannel& ch) {
  const KLReport kl = kl_check(code, ch);
  if (!kl.satisfied)
    throw InvalidArgument("channel is not exactly correctable (residual " + std::to_string(kl.residual) + ")");
  const Matrix& p = code.projector();
  const int d = code.dim();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (kl.c_matrix + kl.c_matrix.adjoint()));
  const Matrix& w = es.eigenvectors();
  std::vector<Matrix> ops;
  Matrix covered = Matrix::Zero(d, d);
  for (int k = 0; k < ch.num_kraus(); ++k) {
    const double dk = es.eigenvalues()(k);
    if (dk <= 1e-10) continue;
    Matrix f = Matrix::Zero(d, d);
    for (int i = 0; i < ch.num_kraus(); ++i) f += w(i, k) * ch.kraus()[static_cast<std::size_t>(i)];
    const Matrix r = p * f.adjoint() / std::sqrt(dk);
    covered += r.adjoint() * r;
    ops.push_back(r);
  }
  // Send the uncovered complement to the first code basis state.
  const Matrix rest = Matrix::Identity(d, d) - covered;
  Eigen::SelfAdjointEigenSolver<Matrix> rs(0.5 * (rest + rest.adjoint()));
  const Vector target = code.isometry().col(0);
  for (int j = 0; j < d; ++j)
    if (rs.eigenvalues()(j) > 0.5) ops.push_back(target * rs.eigenvectors().col(j).adjoint());
  return KrausChannel(std::move(ops));
}

KrausChannel exact_decoder(const CodeProjector& code, const KrausChannel& ch) {
  const Matrix vdag = code.isometry().adjoint();
  std::vector<Matrix> ops;
  const KrausChannel recovery = exact_recovery(code, ch);
  for (const auto& r : recovery.kraus()) ops.push_back(vdag * r);
  return KrausChannel(std::move(ops));
}

double entanglement_fidelity(const Superchannel& encode, const KrausChannel& ch, const KrausChannel& decode, int k) {
  if (k < 1) throw InvalidArgument("number of logical qubits must be >= 1");
  const int logical = 1 << k;
  int n = 0;
  long long dim = 1;
  while (dim < encode.dim_in() && n < 64) {
    dim *= ch.dim_in();
    ++n;
  }
  if (dim != encode.dim_in())
    throw InvalidArgument("encoder input dimension " + std::to_string(encode.dim_in()) +
                          " is not a power of the channel input " + std::to_string(ch.dim_in()));
  if (encode.dim_in_new() != logical || decode.dim_out() != logical)
    throw InvalidArgument("logical dimension mismatch: expected " + std::to_string(logical));
  const KrausChannel physical = induced_channel(encode, tensor_power(ch, n));
  if (physical.dim_out() != decode.dim_in())
    throw InvalidArgument("decoder input " + std::to_string(decode.dim_in()) + " does not match channel output " +
                          std::to_string(physical.dim_out()));
  const ChoiState omega = choi_of(compose(decode, physical));
  return fidelity(DensityMatrix::ebit(logical), omega.state());
}

}  // namespace qcap
