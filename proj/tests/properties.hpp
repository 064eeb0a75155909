#pragma once

// Randomized property checks shared by the unit suite (small counts) and the
// acceptance run (full counts). Each returns the worst violation observed;
// a value <= 0 (or <= the stated tolerance) means the property held.

#include "qcap/optimize.hpp"

#include <algorithm>
#include <vector>

namespace props {

using namespace qcap;

inline KrausChannel random_channel(Rng& rng, int d_in, int d_out, int n_kraus) {
  const Matrix u = random_unitary(rng, d_out * n_kraus);
  const Matrix v = u.leftCols(d_in);
  std::vector<Matrix> ks;
  for (int i = 0; i < n_kraus; ++i) ks.push_back(v.middleRows(i * d_out, d_out));
  return KrausChannel(ks, 1e-9);
}

// max over samples of I(rho, B o A) - I(rho, A) and I_c(rho, B o A) - I_c(rho, A).
inline double data_processing(std::uint64_t seed, int triples) {
  Rng rng(seed);
  double worst = -1e300;
  for (int t = 0; t < triples; ++t) {
    const KrausChannel a = random_channel(rng, 2, 3, 2);
    const KrausChannel b = random_channel(rng, 3, 2, 3);
    const DensityMatrix rho = random_density(rng, 2);
    const KrausChannel ba = compose(b, a);
    worst = std::max(worst, mutual_information(rho, ba).value - mutual_information(rho, a).value);
    worst = std::max(worst, coherent_information(rho, ba).value - coherent_information(rho, a).value);
  }
  return worst;
}

// max of I(rho_12, A (x) B) - I(rho_1, A) - I(rho_2, B).
inline double mutual_subadditivity(std::uint64_t seed, int samples) {
  Rng rng(seed);
  double worst = -1e300;
  for (int s = 0; s < samples; ++s) {
    const KrausChannel a = random_channel(rng, 2, 2, 2);
    const KrausChannel b = random_channel(rng, 2, 2, 3);
    const DensityMatrix rho = DensityMatrix::trusted(random_density(rng, 4).matrix(), DimLayout{2, 2});
    const DensityMatrix r1 = partial_trace(rho, {0}), r2 = partial_trace(rho, {1});
    const double joint = mutual_information(DensityMatrix(rho.matrix()), tensor(a, b)).value;
    worst = std::max(worst, joint - mutual_information(r1, a).value - mutual_information(r2, b).value);
  }
  return worst;
}

// max |S(Phi(psi)) - S(Phi^c(psi))| over pure inputs.
inline double pure_symmetry(std::uint64_t seed, int samples) {
  Rng rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const KrausChannel ch = random_channel(rng, 3, 2, 4);
    const DensityMatrix psi = random_pure(rng, 3);
    worst = std::max(worst, std::abs(von_neumann_entropy(qcap::apply(ch, psi.matrix())) -
                                     von_neumann_entropy(qcap::apply(complementary(ch), psi.matrix()))));
  }
  return worst;
}

// max |I_c(rho, Phi) + I_c(rho, Phi^c)|.
inline double complement_antisymmetry(std::uint64_t seed, int samples) {
  Rng rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const KrausChannel ch = random_channel(rng, 2, 3, 3);
    const DensityMatrix rho = random_density(rng, 2);
    worst = std::max(worst, std::abs(coherent_information(rho, ch).value +
                                     coherent_information(rho, complementary(ch)).value));
  }
  return worst;
}

// Largest constraint residual of decoded Choi states (trace, Hermiticity,
// positivity, input marginal) over random parameter vectors.
inline double choi_sampler(std::uint64_t seed, int samples, int d) {
  Rng rng(seed);
  std::normal_distribution<double> gauss;
  const DimLayout layout{d, d};
  double worst = 0.0;
  RealVector raw(param_length(d * d));
  for (int s = 0; s < samples; ++s) {
    for (Eigen::Index i = 0; i < raw.size(); ++i) raw(i) = 3.0 * gauss(rng);
    const Matrix m = decode_matrix(raw, StateKind::choi, layout);
    worst = std::max({worst, std::abs(m.trace().real() - 1.0), hermiticity_defect(m),
                      std::max(0.0, -hermitian_eigenvalues(m).minCoeff()), choi_marginal_defect(m, d, d)});
  }
  return worst;
}

inline std::vector<std::pair<std::string, KrausChannel>> zoo_channels() {
  return {{"identity", zoo::identity(2)},
          {"pauli", zoo::pauli(0.7, 0.1, 0.1, 0.1)},
          {"dephasing", zoo::dephasing(0.1)},
          {"depolarizing", zoo::depolarizing(0.3, 2)},
          {"erasure", zoo::erasure(0.3, 2)},
          {"amplitude_damping", zoo::amplitude_damping(0.3)},
          {"dephrasure", zoo::dephrasure(0.1, 0.3)},
          {"replacer", zoo::replacer(DensityMatrix::basis(2, 0))}};
}

// min over zoo channels and measures of (optimizer value - flat-input value).
inline double optimizer_above_flat(int restarts) {
  OptimizerConfig cfg;
  cfg.restarts = restarts;
  double worst = 1e300;
  for (const auto& [name, ch] : zoo_channels()) {
    const int d = ch.dim_in();
    const DensityMatrix flat = DensityMatrix::flat(d);
    const DensityMatrix flat2 = DensityMatrix::flat(DimLayout{d, d});
    const double pairs[][2] = {
        {maximize(MeasureKind::coherent, ch, 1, cfg).best_value.value, coherent_information(flat, ch).value},
        {maximize(MeasureKind::mutual, ch, 1, cfg).best_value.value, mutual_information(flat, ch).value},
        {maximize(MeasureKind::choi_coherent, ch, 1, cfg).best_value.value,
         n_shot(MeasureKind::choi_coherent, flat2, ch, 1).value},
        {maximize(MeasureKind::choi_mutual, ch, 1, cfg).best_value.value,
         n_shot(MeasureKind::choi_mutual, flat2, ch, 1).value}};
    for (const auto& p : pairs) worst = std::min(worst, p[0] - p[1]);
  }
  return worst;
}

}  // namespace props
