#pragma once

// Quantum channels in Kraus, Choi and Stinespring form.
//
// Choi layout: a ChoiState of a channel d_in -> d_out lives on [d_out, d_in],
// i.e. (Phi (x) id)(omega) with the ebit's second half "bent over" onto the
// input factor. Subsystem 0 is the output, subsystem 1 the input. Hence
//   tr_input  omega_Phi = Phi(1)/d_in      (partial_trace(.., {0}))
//   tr_output omega_Phi = 1/d_in           (partial_trace(.., {1}))
// This is the only place the convention is spelled out.

#include "qcap/qmath.hpp"

#include <cstdint>
#include <vector>

namespace qcap {

namespace tol {
inline constexpr double kTracePreserving = 1e-10;
inline constexpr double kChoiMarginal = 1e-9;
inline constexpr double kKrausRank = 1e-10;
inline constexpr double kKrausFromChoiDefect = 1e-8;
}  // namespace tol

class KrausChannel {
 public:
  // Throws InvalidArgument if the operators disagree in shape or
  // sum K^dagger K deviates from the identity by more than tp_tol.
  explicit KrausChannel(std::vector<Matrix> kraus, double tp_tol = tol::kTracePreserving);

  const std::vector<Matrix>& kraus() const { return kraus_; }
  int dim_in() const { return dim_in_; }
  int dim_out() const { return dim_out_; }
  int num_kraus() const { return static_cast<int>(kraus_.size()); }

  // max |sum K^dagger K - 1|
  double trace_preservation_defect() const;

  // Content hash over dimensions and Kraus entries.
  std::uint64_t content_hash() const;

  bool operator==(const KrausChannel&) const;

 private:
  std::vector<Matrix> kraus_;
  int dim_in_ = 0;
  int dim_out_ = 0;
};

// Bipartite state on [d_out, d_in] with maximally mixed input marginal.
class ChoiState {
 public:
  ChoiState(DensityMatrix state, double marginal_tol = tol::kChoiMarginal);
  // Layout [d_out, d_in] is attached to m.
  ChoiState(const Matrix& m, int d_out, int d_in, double marginal_tol = tol::kChoiMarginal);

  const DensityMatrix& state() const { return state_; }
  const Matrix& matrix() const { return state_.matrix(); }
  int dim_out() const { return state_.layout().dim(0); }
  int dim_in() const { return state_.layout().dim(1); }

 private:
  DensityMatrix state_;
};

// max |tr_output(m) - 1/d_in| for an operator on [d_out, d_in].
double choi_marginal_defect(const Matrix& m, int d_out, int d_in);

struct StinespringDilation {
  Matrix isometry;  // rows indexed by (out, env), env least significant
  int dim_in = 0;
  int dim_out = 0;
  int dim_env = 0;
};

DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& rho);
// Raw action; no validity checks beyond the shape.
Matrix apply(const KrausChannel& ch, const Matrix& rho);

ChoiState choi_of(const KrausChannel& ch);
KrausChannel kraus_from_choi(const ChoiState& omega);

// Environment channel of the Stinespring dilation: output entry (i, j) is
// tr(K_i rho K_j^dagger).
KrausChannel complementary(const KrausChannel& ch);

StinespringDilation stinespring(const KrausChannel& ch);
// Pure state (V (x) 1)|omega> on layout [d_out, d_env, d_in].
DensityMatrix purified_choi(const KrausChannel& ch);

// d * tr_input[omega (1 (x) rho^t)]
DensityMatrix isi_readout(const ChoiState& omega, const DensityMatrix& rho);

// outer o inner; the Kraus list is compressed through the Choi state when it
// exceeds dim_in * dim_out.
KrausChannel compose(const KrausChannel& outer, const KrausChannel& inner);
KrausChannel tensor(const KrausChannel& a, const KrausChannel& b);
KrausChannel tensor_power(const KrausChannel& ch, int n);

// rho -> U rho U^dagger (U may be an isometry).
KrausChannel unitary_channel(const Matrix& u);

// Zoo.
namespace zoo {

KrausChannel identity(int d);
// Kraus sqrt(p_i) sigma_i with sigma = (1, X, Y, Z).
KrausChannel pauli(double p0, double p1, double p2, double p3);
// rho -> (1 - p) rho + p Z rho Z
KrausChannel dephasing(double p);
// rho -> (1 - lambda) rho + lambda 1/d, lambda in [0, 1]
KrausChannel depolarizing(double lambda, int d);
// d -> d + 1, erasure flag is the last basis vector.
KrausChannel erasure(double q, int d);
KrausChannel amplitude_damping(double gamma);
// (1 - q)[(1 - p) rho + p Z rho Z] + q |e><e|, qubit -> qutrit.
KrausChannel dephrasure(double p, double q);
// rho -> target for every input of dimension dim_in.
KrausChannel replacer(const DensityMatrix& target, int dim_in = 2);

}  // namespace zoo

// Single-qubit Paulis.
Matrix pauli_matrix(int k);

}  // namespace qcap
