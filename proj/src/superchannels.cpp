#include "qcap/superchannels.hpp"

#include "qcap/error.hpp"

#include <string>

namespace qcap {

Superchannel::Superchannel(std::vector<Matrix> pre, std::vector<std::vector<Matrix>> post)
    : pre_(std::move(pre)), post_(std::move(post)) {
  if (pre_.empty()) throw InvalidArgument("superchannel needs at least one memory index");
  if (post_.size() != pre_.size())
    throw InvalidArgument("superchannel: pre and post families disagree on the memory dimension");
  const auto in_rows = pre_.front().rows(), in_cols = pre_.front().cols();
  for (const auto& k : pre_)
    if (k.rows() != in_rows || k.cols() != in_cols) throw InvalidArgument("superchannel: pre operators differ in shape");
  if (post_.front().empty()) throw InvalidArgument("superchannel: empty post family");
  const std::size_t n_mu = post_.front().size();
  const auto out_rows = post_.front().front().rows(), out_cols = post_.front().front().cols();
  for (const auto& fam : post_) {
    if (fam.size() != n_mu) throw InvalidArgument("superchannel: post families differ in length");
    for (const auto& k : fam)
      if (k.rows() != out_rows || k.cols() != out_cols)
        throw InvalidArgument("superchannel: post operators differ in shape");
  }
}

Superchannel Superchannel::from_unitaries(const Matrix& u1, const Matrix& u2, int d_in, int d_out,
                                          int memory_dim, int extra_dim) {
  if (d_in < 1 || d_out < 1 || memory_dim < 1 || extra_dim < 1)
    throw InvalidArgument("from_unitaries: dimensions must be positive");
  const int a1 = memory_dim;
  const int a = memory_dim * extra_dim;
  if (u1.rows() != d_in * a1 || u1.cols() != d_in * a1)
    throw InvalidArgument("from_unitaries: U1 must act on d_in * memory_dim");
  if (u2.rows() != d_out * a || u2.cols() != d_out * a)
    throw InvalidArgument("from_unitaries: U2 must act on d_out * memory_dim * extra_dim");

  std::vector<Matrix> pre;
  for (int m = 0; m < a1; ++m) {
    Matrix k(d_in, d_in);
    for (int i = 0; i < d_in; ++i)
      for (int j = 0; j < d_in; ++j) k(i, j) = u1(i * a1 + m, j * a1);
    pre.push_back(std::move(k));
  }
  std::vector<std::vector<Matrix>> post(static_cast<std::size_t>(a1));
  for (int m = 0; m < a1; ++m) {
    for (int mu = 0; mu < a; ++mu) {
      Matrix k(d_out, d_out);
      // Ancilla input |m, 0>, output <mu|.
      for (int r = 0; r < d_out; ++r)
        for (int c = 0; c < d_out; ++c) k(r, c) = u2(r * a + mu, c * a + m * extra_dim);
      post[static_cast<std::size_t>(m)].push_back(std::move(k));
    }
  }
  return Superchannel(std::move(pre), std::move(post));
}

Superchannel Superchannel::identity(int d_in, int d_out) {
  return Superchannel({Matrix::Identity(d_in, d_in)}, {{Matrix::Identity(d_out, d_out)}});
}

Superchannel Superchannel::post_processing(const KrausChannel& lambda, int d_in) {
  return Superchannel({Matrix::Identity(d_in, d_in)}, {lambda.kraus()});
}

Superchannel Superchannel::pre_processing(const KrausChannel& e, int d_out) {
  std::vector<Matrix> pre;
  std::vector<std::vector<Matrix>> post;
  for (const auto& k : e.kraus()) {
    pre.push_back(k.transpose());
    post.push_back({Matrix::Identity(d_out, d_out)});
  }
  // Each memory value must reach a distinct output of the post stage, otherwise
  // the Kraus terms would interfere; spread them over the mu index.
  const std::size_t n = pre.size();
  if (n > 1) {
    for (std::size_t m = 0; m < n; ++m) {
      std::vector<Matrix> fam(n, Matrix::Zero(d_out, d_out));
      fam[m] = Matrix::Identity(d_out, d_out);
      post[m] = std::move(fam);
    }
  }
  return Superchannel(std::move(pre), std::move(post));
}

namespace {

std::vector<Matrix> compute_s(const Superchannel& s) {
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(s.num_mu()));
  for (int mu = 0; mu < s.num_mu(); ++mu) {
    Matrix sm = Matrix::Zero(s.dim_out_new() * s.dim_in_new(), s.dim_out() * s.dim_in());
    for (int m = 0; m < s.memory_dim(); ++m)
      sm += kron(s.post()[static_cast<std::size_t>(m)][static_cast<std::size_t>(mu)], s.pre()[static_cast<std::size_t>(m)]);
    out.push_back(std::move(sm));
  }
  return out;
}

}  // namespace

double Superchannel::completeness_defect() const {
  const auto ss = compute_s(*this);
  const int n = dim_out() * dim_in();
  Matrix sum = Matrix::Zero(n, n);
  for (const auto& sm : ss) sum.noalias() += sm.adjoint() * sm;
  return (sum - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

std::vector<Matrix> bipartite_kraus(const Superchannel& s) {
  auto ss = compute_s(s);
  const int n = s.dim_out() * s.dim_in();
  Matrix sum = Matrix::Zero(n, n);
  for (const auto& sm : ss) sum.noalias() += sm.adjoint() * sm;
  const double defect = (sum - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (!(defect <= tol::kSuperCompleteness))
    throw InvariantViolation("superchannel Kraus operators are not complete (defect " + std::to_string(defect) + ")");
  return ss;
}

ChoiState apply_to_choi(const Superchannel& s, const ChoiState& omega) {
  if (omega.dim_in() != s.dim_in() || omega.dim_out() != s.dim_out())
    throw InvalidArgument("apply_to_choi: Choi state dimensions do not match the superchannel");
  const auto ss = bipartite_kraus(s);
  Matrix out = Matrix::Zero(ss.front().rows(), ss.front().rows());
  for (const auto& sm : ss) out.noalias() += sm * omega.matrix() * sm.adjoint();
  DensityMatrix state = DensityMatrix::trusted(std::move(out), DimLayout{s.dim_out_new(), s.dim_in_new()});
  return ChoiState(std::move(state), tol::kSuperChoiMarginal);
}

KrausChannel induced_channel(const Superchannel& s, const KrausChannel& ch) {
  if (ch.dim_in() != s.dim_in() || ch.dim_out() != s.dim_out())
    throw InvalidArgument("induced_channel: channel dimensions do not match the superchannel");
  std::vector<Matrix> fs;
  for (const auto& k : ch.kraus()) {
    for (int mu = 0; mu < s.num_mu(); ++mu) {
      Matrix f = Matrix::Zero(s.dim_out_new(), s.dim_in_new());
      for (int m = 0; m < s.memory_dim(); ++m)
        f += s.post()[static_cast<std::size_t>(m)][static_cast<std::size_t>(mu)] * k *
             s.pre()[static_cast<std::size_t>(m)].transpose();
      fs.push_back(std::move(f));
    }
  }
  try {
    return KrausChannel(std::move(fs), 1e-9);
  } catch (const InvalidArgument& e) {
    throw InvariantViolation(std::string("induced channel is not trace preserving: ") + e.what());
  }
}

}  // namespace qcap
