#include "doctest.h"
#include "oracles.hpp"

#include "qcap/error.hpp"
#include "qcap/information.hpp"

#include <thread>

using namespace qcap;

TEST_CASE("measure names") {
  CHECK(parse_measure("choi-coherent") == MeasureKind::choi_coherent);
  CHECK(parse_measure("choi_mutual") == MeasureKind::choi_mutual);
  CHECK(to_string(MeasureKind::holevo) == "holevo");
  CHECK(is_choi_measure(MeasureKind::choi_mutual));
  CHECK_FALSE(is_choi_measure(MeasureKind::mutual));
  CHECK_THROWS_AS(parse_measure("capacity"), InvalidArgument);
}

TEST_CASE("flat-input Pauli coherent information is 1 - H(p)") {
  const std::vector<std::vector<double>> ps = {
      {0.7, 0.1, 0.1, 0.1}, {0.9, 0.05, 0.03, 0.02}, {0.85, 0, 0, 0.15}, {1, 0, 0, 0}, {0.25, 0.25, 0.25, 0.25}};
  for (const auto& p : ps) {
    const auto ch = zoo::pauli(p[0], p[1], p[2], p[3]);
    const double ic = coherent_information(DensityMatrix::flat(2), ch).value;
    CHECK(std::abs(ic - (1.0 - oracle::shannon(p))) <= 1e-10);
  }
}

TEST_CASE("closed forms for degradable families") {
  for (double p : {0.05, 0.1, 0.2, 0.4}) {
    CHECK(std::abs(coherent_information(DensityMatrix::flat(2), zoo::dephasing(p)).value - (1 - oracle::h2(p))) <
          1e-10);
    CHECK(std::abs(coherent_information(DensityMatrix::flat(2), zoo::erasure(p, 2)).value - (1 - 2 * p)) < 1e-10);
  }
  // Amplitude damping on diagonal inputs: h2((1-g) x) - h2(g x).
  for (double g : {0.1, 0.3}) {
    for (double x : {0.2, 0.5, 0.7}) {
      const DensityMatrix rho(oracle::diag({1 - x, x}));
      const double want = oracle::h2((1 - g) * x) - oracle::h2(g * x);
      CHECK(std::abs(coherent_information(rho, zoo::amplitude_damping(g)).value - want) < 1e-10);
    }
  }
}

TEST_CASE("identity channel") {
  Rng rng(9);
  const DensityMatrix rho = random_density(rng, 3);
  const double s = oracle::entropy(rho.matrix());
  CHECK(std::abs(coherent_information(rho, zoo::identity(3)).value - s) < 1e-10);
  CHECK(std::abs(mutual_information(rho, zoo::identity(3)).value - 2 * s) < 1e-10);
}

TEST_CASE("replacer channels carry no information") {
  // The output is independent of the input and the environment holds a copy
  // of the input, so I(rho, R) = S(rho) + 0 - S(rho).
  Rng rng(10);
  const auto rep = zoo::replacer(DensityMatrix::basis(2, 0));
  for (int i = 0; i < 5; ++i) {
    const DensityMatrix rho = random_density(rng, 2);
    CHECK(std::abs(mutual_information(rho, rep).value) < 1e-10);
    CHECK(std::abs(coherent_information(rho, rep).value + oracle::entropy(rho.matrix())) < 1e-10);
  }
  CHECK(std::abs(mutual_information(DensityMatrix::flat(2), rep).value) < 1e-10);
}

TEST_CASE("Choi measures") {
  const auto id = zoo::identity(2);
  const ChoiState ebit(DensityMatrix::ebit(2));
  const ChoiState flat4(DensityMatrix::flat(DimLayout{2, 2}));
  CHECK(std::abs(choi_coherent_information(ebit, id).value) < 1e-10);
  CHECK(std::abs(choi_coherent_information(flat4, id).value - 2.0) < 1e-10);
  CHECK(std::abs(choi_mutual_information(flat4, id).value - 4.0) < 1e-10);
  CHECK(choi_coherent_information(flat4, id).copies == 2);
  CHECK(std::abs(choi_coherent_information(flat4, id).per_use() - 1.0) < 1e-10);
  // pi_4 = pi (x) pi, so the Choi value is twice the flat one-shot value.
  const auto deph = zoo::dephasing(0.1);
  CHECK(std::abs(choi_coherent_information(flat4, deph).value - 2 * (1 - oracle::h2(0.1))) < 1e-10);
  CHECK_THROWS_AS(choi_coherent_information(ChoiState(DensityMatrix::ebit(3)), id), InvalidArgument);
}

TEST_CASE("Holevo quantity") {
  const Ensemble basis({{0.5, DensityMatrix::basis(2, 0)}, {0.5, DensityMatrix::basis(2, 1)}});
  CHECK(std::abs(holevo_chi(basis, zoo::identity(2)).value - 1.0) < 1e-12);
  Vector plus(2), minus(2);
  plus << 1, 1;
  minus << 1, -1;
  const Ensemble pm({{0.5, DensityMatrix::pure(plus, DimLayout{2})}, {0.5, DensityMatrix::pure(minus, DimLayout{2})}});
  for (double p : {0.1, 0.3})
    CHECK(std::abs(holevo_chi(pm, zoo::dephasing(p)).value - (1 - oracle::h2(p))) < 1e-10);
  // Basis states are immune to dephasing.
  CHECK(std::abs(holevo_chi(basis, zoo::dephasing(0.3)).value - 1.0) < 1e-10);
  CHECK(std::abs(holevo_chi(basis, zoo::replacer(DensityMatrix::flat(2))).value) < 1e-10);
}

TEST_CASE("ensemble validation") {
  CHECK_THROWS_AS(Ensemble({}), InvalidArgument);
  CHECK_THROWS_AS(Ensemble({{0.7, DensityMatrix::flat(2)}}), InvalidArgument);
  CHECK_THROWS_AS(Ensemble({{1.2, DensityMatrix::flat(2)}, {-0.2, DensityMatrix::flat(2)}}), InvalidArgument);
  CHECK_THROWS_AS(Ensemble({{0.5, DensityMatrix::flat(2)}, {0.5, DensityMatrix::flat(3)}}), InvalidArgument);
  const Ensemble e({{0.25, DensityMatrix::basis(2, 0)}, {0.75, DensityMatrix::basis(2, 1)}});
  CHECK(oracle::max_abs(e.average().matrix() - oracle::diag({0.25, 0.75})) < 1e-15);
}

TEST_CASE("n-shot measures") {
  const auto deph = zoo::dephasing(0.1);
  const InfoValue two = n_shot(MeasureKind::coherent, DensityMatrix::flat(4), deph, 2);
  CHECK(two.copies == 2);
  CHECK(std::abs(two.value - 2 * (1 - oracle::h2(0.1))) < 1e-10);
  const InfoValue c = n_shot(MeasureKind::choi_coherent, DensityMatrix::flat(4), deph, 1);
  CHECK(c.copies == 2);
  CHECK(std::abs(c.value - two.value) < 1e-10);
  const InfoValue m = n_shot(MeasureKind::mutual, DensityMatrix::flat(2), zoo::identity(2), 1);
  CHECK(std::abs(m.value - 2.0) < 1e-10);
  CHECK_THROWS_AS(n_shot(MeasureKind::holevo, DensityMatrix::flat(2), deph, 1), InvalidArgument);
  CHECK_THROWS_AS(n_shot(MeasureKind::coherent, DensityMatrix::flat(3), deph, 1), InvalidArgument);
  CHECK_THROWS_AS(n_shot(MeasureKind::coherent, DensityMatrix::flat(2), deph, 0), InvalidArgument);
}

TEST_CASE("dimension cap names the offending dimension") {
  try {
    measure_channel(MeasureKind::coherent, zoo::identity(4), 5);
    FAIL("expected CapExceeded");
  } catch (const CapExceeded& e) {
    CHECK(std::string(e.what()).find("1024") != std::string::npos);
  }
  CHECK_THROWS_AS(measure_channel(MeasureKind::choi_coherent, zoo::identity(2), 5, 256), CapExceeded);
  CHECK_NOTHROW(measure_channel(MeasureKind::choi_coherent, zoo::identity(2), 4, 256));
}

TEST_CASE("complement memo is shared and thread safe") {
  const auto ch = zoo::dephrasure(0.1, 0.2);
  const ChannelPair a = channel_pair(ch), b = channel_pair(zoo::dephrasure(0.1, 0.2));
  CHECK(a.complement.get() == b.complement.get());
  CHECK(*a.complement == complementary(ch));

  std::vector<std::thread> threads;
  std::vector<double> values(8);
  for (int t = 0; t < 8; ++t)
    threads.emplace_back([&values, t] {
      const auto c = zoo::amplitude_damping(0.05 * (t % 4 + 1));
      values[static_cast<std::size_t>(t)] = coherent_information(DensityMatrix::flat(2), c).value;
    });
  for (auto& th : threads) th.join();
  for (int t = 0; t < 4; ++t) CHECK(values[static_cast<std::size_t>(t)] == values[static_cast<std::size_t>(t + 4)]);
}
