#pragma once

// Multi-start maximization of information measures over states and Choi
// states, plus the capacity reports built on it.
//
// States are parameterized through a Cholesky factor, so every real vector
// decodes to a valid state and the search is unconstrained. Each restart runs
// a BFGS ascent with central finite-difference gradients. Restarts (and scan
// grid points) are independent work items; the OpenMP driver and the serial
// reference driver run the same kernel and merge in index order, so results
// do not depend on the thread count.

#include "qcap/information.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qcap {

enum class StateKind { density, choi };

// raw holds dim^2 reals: for each row i, the real diagonal L(i,i) followed by
// (re, im) of L(i, j) for j < i.
struct StateParam {
  RealVector raw;
  StateKind kind = StateKind::density;
  DimLayout layout;  // choi kind: [d_out, d_in]
};

int param_length(int dim);
Matrix cholesky_factor(const RealVector& raw, int dim);
// Inverse of cholesky_factor for a lower-triangular L with real diagonal.
RealVector raw_from_factor(const Matrix& l);

// Density kind: L L^dagger / tr. Choi kind: A = L L^dagger, B = tr_out A,
// (1 (x) B^{-1/2}) A (1 (x) B^{-1/2}) / d_in, with A regularized by 1e-12 * 1
// first so the input marginal comes out exact.
Matrix decode_matrix(const RealVector& raw, StateKind kind, const DimLayout& layout);
DensityMatrix decode(const StateParam& p);
ChoiState decode_choi(const StateParam& p);

// Parameters of the flat state (any kind) and of the ebit (Choi kind).
RealVector flat_param(int dim);
RealVector ebit_param(int d);

enum class Exec { serial, parallel };

struct OptimizerConfig {
  int restarts = 32;
  int max_iters = 2000;
  double step_tol = 1e-9;
  double objective_tol = 1e-8;
  std::uint64_t seed = 0;
  int dimension_cap = kDefaultDimensionCap;
  double fd_step = 1e-5;  // relative central-difference step
  // Number of ensemble members for holevo; 0 picks the member dimension.
  int ensemble_size = 0;
  bool holevo_choi_members = false;
  Exec exec = Exec::parallel;

  void validate() const;
};

struct RestartRecord {
  std::uint64_t seed = 0;  // 0 for deterministic starts
  std::string start;       // "flat", "ebit", "warm", "random"
  int iterations = 0;
  double final_value = 0.0;
  bool converged = false;
};

struct OptResult {
  InfoValue best_value;
  DensityMatrix argmax = DensityMatrix::flat(1);  // Choi kinds: valid Choi state on [D, D]
  std::optional<Ensemble> argmax_ensemble;        // holevo only
  std::vector<RestartRecord> restart_log;
  int best_restart = 0;
  bool converged = false;
};

// Derived per-restart seed (splitmix64 of master seed and counter).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter);

// Threads used by Exec::parallel: QCAP_THREADS if set, else OpenMP default.
int configured_threads();

// Generic multi-start ascent over a real parameter vector.
struct LocalResult {
  RealVector x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};
using ObjectiveFn = std::function<double(const RealVector&)>;
LocalResult bfgs_maximize(const ObjectiveFn& f, RealVector x0, const OptimizerConfig& cfg);

struct StartPoint {
  RealVector x;
  std::string label;
  std::uint64_t seed = 0;
};
struct MultiStartResult {
  std::vector<LocalResult> runs;  // one per start, in start order
  int best = 0;
};
// Index-order merge; ties within 1e-12 go to the lowest index.
MultiStartResult multi_start(const ObjectiveFn& f, const std::vector<StartPoint>& starts, const OptimizerConfig& cfg);
// Serial and OpenMP drivers behind multi_start, exposed for testing.
std::vector<LocalResult> run_starts_serial(const ObjectiveFn& f, const std::vector<StartPoint>& starts,
                                           const OptimizerConfig& cfg);
std::vector<LocalResult> run_starts_parallel(const ObjectiveFn& f, const std::vector<StartPoint>& starts,
                                             const OptimizerConfig& cfg);

// Maximizes `kind` against ch^{(x) n} (ch^{(x) 2n} for Choi kinds).
// `warm_starts` are extra deterministic starting states (matrices of the
// searched dimension), evaluated after flat/ebit and before random starts.
OptResult maximize(MeasureKind kind, const KrausChannel& ch, int n, const OptimizerConfig& cfg,
                   const std::vector<Matrix>& warm_starts = {});

struct GapReport {
  double one_shot = 0.0;       // max_rho I_c(rho, Phi)
  double two_shot = 0.0;       // max_rho I_c(rho, Phi (x) Phi)
  double gap = 0.0;            // two_shot - 2 one_shot
  double undoubled_diff = 0.0; // two_shot - one_shot
  double choi_one_shot = 0.0;  // max_omega I_c(omega, Phi (x) Phi)
  bool one_converged = false;
  bool two_converged = false;
  bool choi_converged = false;
  Matrix two_shot_argmax;
};
GapReport superadditivity_gap(const KrausChannel& ch, const OptimizerConfig& cfg);

struct ChainReport {
  double flat = 0.0;           // I_c(pi, Phi)
  double choi_per_use = 0.0;   // max_omega I_c(omega, Phi^{(x)2}) / 2
  double state_max = 0.0;      // max_rho I_c(rho, Phi)
  double two_copy_half = 0.0;  // max_rho I_c(rho, Phi^{(x)2}) / 2
  bool flat_le_choi = false;   // flat <= choi_per_use + 1e-8
  bool choi_le_two_copy = false;  // choi_per_use <= two_copy_half + 1e-8
};
ChainReport capacity_chain(const KrausChannel& ch, const OptimizerConfig& cfg);

struct CaReport {
  double q_ca_hat = 0.0;  // max I(omega, Phi^{(x)2}) / 4
  double c_ca_hat = 0.0;  // max I(omega, Phi^{(x)2}) / 2
  OptResult opt;
};
CaReport ca_capacities(const KrausChannel& ch, const OptimizerConfig& cfg);

// min_D || choi(Phi^c) - choi(D o Phi) ||_F over channels D; residual < 1e-3
// counts as numerically degradable.
struct DegradabilityReport {
  double residual = 0.0;
  ChoiState degrading_map;
  bool degradable() const { return residual < 1e-3; }
};
DegradabilityReport degradability_residual(const KrausChannel& ch, const OptimizerConfig& cfg);

// (D (x) 1)(X) for D given by its Choi matrix on [d_out_D, d_in_D] and X an
// operator on [d_in_D, rest].
Matrix apply_choi_map(const Matrix& choi_d, int d_out_d, int d_in_d, const Matrix& x, int rest);

// Grid scans. Families: "pauli" (p0, p1, p2, p3) and "dephrasure" (p, q).
KrausChannel family_channel(const std::string& family, const std::vector<double>& params);

struct ScanRow {
  std::vector<double> params;
  GapReport report;
};
std::vector<ScanRow> scan(const std::string& family, const std::vector<std::vector<double>>& grid,
                          const OptimizerConfig& cfg);

// Minimum trace distance from `state` (two qubits) to the orbit of
// (|00><00| + |11><11|)/2 under local Pauli pairs P (x) Q and joint
// single-qubit Cliffords C (x) C.
double distance_to_maximally_correlated(const Matrix& state);

}  // namespace qcap
