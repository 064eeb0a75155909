#pragma once

// Exact error-correction conditions and coding fidelity for small codes.

#include "qcap/superchannels.hpp"

#include <vector>

namespace qcap {

class CodeProjector {
 public:
  // Hermitian, idempotent within 1e-10, integer trace within 1e-9.
  explicit CodeProjector(Matrix p);

  const Matrix& projector() const { return p_; }
  int code_dim() const { return k_; }
  int dim() const { return static_cast<int>(p_.rows()); }
  // Columns form an orthonormal basis of the code space; encoders and
  // decoders built from the same projector agree on it.
  const Matrix& isometry() const { return v_; }

  // span{|000>, |111>}
  static CodeProjector repetition3();

 private:
  Matrix p_;
  Matrix v_;
  int k_ = 0;
};

struct KLReport {
  bool satisfied = false;
  Matrix c_matrix;  // c_ij = tr(P E_i^dagger E_j P) / K
  // Operator norm of the block matrix [P E_i^dagger E_j P - c_ij P]_{ij}.
  double residual = 0.0;
  int degeneracy_rank = 0;
  std::vector<double> effective_error_probs;  // eigenvalues of c above 1e-10, descending
};

KLReport kl_check(const CodeProjector& code, const KrausChannel& ch, double tol = 1e-8);

// |0> -> |000>, |1> -> |111>
Matrix repetition3_isometry();
// Encoding as a superchannel: Phi -> Phi o V.
Superchannel encoder(const Matrix& isometry);

// Recovery for an exactly correctable channel, built from the diagonalized
// c-matrix; vectors outside every error subspace are sent to a fixed code
// state. Throws InvalidArgument when kl_check fails.
KrausChannel exact_recovery(const CodeProjector& code, const KrausChannel& ch);
// V^dagger o recovery, mapping back to the logical space.
KrausChannel exact_decoder(const CodeProjector& code, const KrausChannel& ch);

// F(ebit(2^k), choi(decode o induced(encode, ch^{(x) n}))), with n fixed by
// the encoder's input dimension.
double entanglement_fidelity(const Superchannel& encode, const KrausChannel& ch, const KrausChannel& decode, int k);

}  // namespace qcap
