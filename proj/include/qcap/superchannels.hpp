#pragma once

// Superchannels in bipartite Kraus form.
//
// A superchannel is given by pre-operators K1[m] and post-operators K2[m][mu],
// m indexing the memory carried from the pre- to the post-processing stage.
// On Choi states (layout [out, in]) it acts with
//     S_mu = sum_m K2[m][mu] (x) K1[m],
// so K1[m] acts on the input factor of the Choi state. On channels the same
// superchannel produces Kraus operators
//     F_{i,mu} = sum_m K2[m][mu] K_i K1[m]^t,
// the transpose coming from moving K1 across the ebit.

#include "qcap/channels.hpp"

#include <vector>

namespace qcap {

namespace tol {
inline constexpr double kSuperCompleteness = 1e-9;
inline constexpr double kSuperChoiMarginal = 1e-8;
}  // namespace tol

class Superchannel {
 public:
  // pre[m]:      d_in_new x d_in     (acts on the Choi input factor)
  // post[m][mu]: d_out_new x d_out   (same number of mu for every m)
  // Shapes are validated here. Completeness of the S_mu is checked where it is
  // needed (bipartite_kraus, apply_to_choi); isometric encoders with
  // d_in_new < d_in are legal inputs to induced_channel.
  Superchannel(std::vector<Matrix> pre, std::vector<std::vector<Matrix>> post);

  // K1[m] = <m|U1|0> with U1 on (d_in (x) memory), and
  // K2[m][mu] = <mu|U2|m,0> with U2 on (d_out (x) memory (x) extra), mu running
  // over memory * extra.
  static Superchannel from_unitaries(const Matrix& u1, const Matrix& u2, int d_in, int d_out,
                                     int memory_dim, int extra_dim);
  static Superchannel identity(int d_in, int d_out);
  // Phi -> Lambda o Phi
  static Superchannel post_processing(const KrausChannel& lambda, int d_in);
  // Phi -> Phi o E
  static Superchannel pre_processing(const KrausChannel& e, int d_out);

  const std::vector<Matrix>& pre() const { return pre_; }
  const std::vector<std::vector<Matrix>>& post() const { return post_; }
  int memory_dim() const { return static_cast<int>(pre_.size()); }
  int num_mu() const { return static_cast<int>(post_.front().size()); }
  // Dimensions of the channels it consumes (in, out) and produces (in_new, out_new).
  int dim_in() const { return static_cast<int>(pre_.front().cols()); }
  int dim_out() const { return static_cast<int>(post_.front().front().cols()); }
  int dim_in_new() const { return static_cast<int>(pre_.front().rows()); }
  int dim_out_new() const { return static_cast<int>(post_.front().front().rows()); }

  // max |sum_mu S_mu^dagger S_mu - 1|
  double completeness_defect() const;

 private:
  std::vector<Matrix> pre_;
  std::vector<std::vector<Matrix>> post_;
};

// The S_mu; throws InvariantViolation when completeness fails beyond 1e-9.
std::vector<Matrix> bipartite_kraus(const Superchannel& s);

// sum_mu S_mu omega S_mu^dagger; throws InvariantViolation when the result
// leaves the Choi set by more than 1e-8.
ChoiState apply_to_choi(const Superchannel& s, const ChoiState& omega);

KrausChannel induced_channel(const Superchannel& s, const KrausChannel& ch);

}  // namespace qcap
