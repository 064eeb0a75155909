#pragma once

#include "qcap/superchannels.hpp"

namespace fixture {

using namespace qcap;

// U1 |j>|0> = sum_m sqrt(q_m) U_m |j> |m>: a random-unitary pre stage, so the
// pre operators are unital as well as complete.
inline Matrix mixing_pre_unitary(Rng& rng, int d, int memory) {
  std::vector<double> q(static_cast<std::size_t>(memory));
  double total = 0.0;
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (auto& x : q) total += (x = u(rng));
  Matrix w = random_unitary(rng, memory);
  Vector first(memory);
  for (int m = 0; m < memory; ++m) first(m) = std::sqrt(q[static_cast<std::size_t>(m)] / total);
  // Complete `first` to a unitary whose first column it is.
  Matrix basis = Matrix::Zero(memory, memory);
  basis.col(0) = first;
  for (int m = 1; m < memory; ++m) basis.col(m) = w.col(m);
  Eigen::HouseholderQR<Matrix> qr(basis);
  Matrix wq = qr.householderQ();
  // Fix the phase so the first column equals `first` exactly.
  const Complex ph = first.dot(wq.col(0));
  wq.col(0) *= std::conj(ph);
  Matrix c = Matrix::Zero(d * memory, d * memory);
  for (int m = 0; m < memory; ++m) {
    const Matrix um = random_unitary(rng, d);
    Matrix proj = Matrix::Zero(memory, memory);
    proj(m, m) = 1.0;
    c += kron(um, proj);
  }
  return c * kron(Matrix::Identity(d, d), wq);
}

}  // namespace fixture
