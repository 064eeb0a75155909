#include "qcap/optimize.hpp"

#include "qcap/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qcap {

// ---------------------------------------------------------------------------
// Parameterization

int param_length(int dim) { return dim * dim; }

Matrix cholesky_factor(const RealVector& raw, int dim) {
  if (raw.size() != param_length(dim))
    throw InvalidArgument("parameter vector has length " + std::to_string(raw.size()) + ", expected " +
                          std::to_string(param_length(dim)));
  Matrix l = Matrix::Zero(dim, dim);
  Eigen::Index k = 0;
  for (int i = 0; i < dim; ++i) {
    l(i, i) = raw(k++);
    for (int j = 0; j < i; ++j) {
      l(i, j) = Complex(raw(k), raw(k + 1));
      k += 2;
    }
  }
  return l;
}

RealVector raw_from_factor(const Matrix& l) {
  const int dim = static_cast<int>(l.rows());
  RealVector raw(param_length(dim));
  Eigen::Index k = 0;
  for (int i = 0; i < dim; ++i) {
    raw(k++) = l(i, i).real();
    for (int j = 0; j < i; ++j) {
      raw(k++) = l(i, j).real();
      raw(k++) = l(i, j).imag();
    }
  }
  return raw;
}

namespace {

constexpr double kChoiRegularization = 1e-12;

Matrix inverse_sqrt(const Matrix& b) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(b);
  const RealVector inv = es.eigenvalues().cwiseMax(std::numeric_limits<double>::min()).cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

// (1 (x) B^{-1/2}) A (1 (x) B^{-1/2}) / d_in with B = tr_out A.
Matrix normalize_marginal(const Matrix& a, const DimLayout& layout) {
  const int keep_input[] = {1};
  const int d_out = layout.dim(0), d_in = layout.dim(1);
  const Matrix b = partial_trace(a, layout, keep_input);
  const Matrix m = kron(Matrix::Identity(d_out, d_out), inverse_sqrt(b));
  Matrix out = m * a * m / static_cast<double>(d_in);
  return 0.5 * (out + out.adjoint());
}

}  // namespace

Matrix decode_matrix(const RealVector& raw, StateKind kind, const DimLayout& layout) {
  const int dim = layout.total();
  const Matrix l = cholesky_factor(raw, dim);
  Matrix a = l * l.adjoint();
  const double tr = a.trace().real();
  if (!(tr > 1e-300) || !std::isfinite(tr)) {
    if (!std::isfinite(tr)) throw InvariantViolation("non-finite state parameters");
    a = Matrix::Identity(dim, dim) / static_cast<double>(dim);
  } else {
    a /= tr;
  }
  if (kind == StateKind::density) return 0.5 * (a + a.adjoint());

  if (layout.num_subsystems() != 2) throw InvalidArgument("Choi decode needs a bipartite layout");
  a += kChoiRegularization * Matrix::Identity(dim, dim);
  Matrix out = normalize_marginal(a, layout);
  // A second pass removes the rounding left by an ill-conditioned marginal.
  if (choi_marginal_defect(out, layout.dim(0), layout.dim(1)) > 1e-12) out = normalize_marginal(out, layout);
  return out / out.trace().real();
}

DensityMatrix decode(const StateParam& p) {
  return DensityMatrix::trusted(decode_matrix(p.raw, p.kind, p.layout), p.layout);
}

ChoiState decode_choi(const StateParam& p) {
  if (p.kind != StateKind::choi) throw InvalidArgument("decode_choi needs a choi-kind parameter");
  return ChoiState(decode(p));
}

RealVector flat_param(int dim) {
  RealVector raw = RealVector::Zero(param_length(dim));
  Eigen::Index k = 0;
  for (int i = 0; i < dim; ++i) {
    raw(k) = 1.0;
    k += 1 + 2 * i;
  }
  return raw;
}

RealVector ebit_param(int d) {
  // Rank-one factor: first column holds the ebit vector.
  Matrix l = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) l(i * d + i, 0) = 1.0 / std::sqrt(static_cast<double>(d));
  return raw_from_factor(l);
}

namespace {

RealVector raw_from_state(const Matrix& state) {
  const int dim = static_cast<int>(state.rows());
  Matrix reg = 0.5 * (state + state.adjoint());
  reg += 1e-13 * Matrix::Identity(dim, dim);
  Eigen::LLT<Matrix> llt(reg);
  if (llt.info() != Eigen::Success) throw InvalidArgument("warm start is not positive semidefinite");
  return raw_from_factor(llt.matrixL());
}

}  // namespace

void OptimizerConfig::validate() const {
  if (restarts < 0) throw InvalidArgument("restarts must be >= 0");
  if (max_iters < 1) throw InvalidArgument("max_iters must be positive");
  if (!(step_tol > 0) || !(objective_tol > 0) || !(fd_step > 0)) throw InvalidArgument("tolerances must be positive");
  if (dimension_cap < 1) throw InvalidArgument("dimension cap must be positive");
  if (ensemble_size < 0) throw InvalidArgument("ensemble_size must be >= 0");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

int configured_threads() {
  if (const char* env = std::getenv("QCAP_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// ---------------------------------------------------------------------------
// Local search

LocalResult bfgs_maximize(const ObjectiveFn& f, RealVector x0, const OptimizerConfig& cfg) {
  const Eigen::Index n = x0.size();
  auto loss = [&f](const RealVector& x) {
    const double v = f(x);
    if (!std::isfinite(v)) throw InvariantViolation("objective returned a non-finite value");
    return -v;
  };
  auto gradient = [&](const RealVector& x) {
    RealVector g(n);
    RealVector probe = x;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double h = cfg.fd_step * std::max(1.0, std::abs(x(i)));
      probe(i) = x(i) + h;
      const double up = loss(probe);
      probe(i) = x(i) - h;
      const double down = loss(probe);
      probe(i) = x(i);
      g(i) = (up - down) / (2.0 * h);
    }
    return g;
  };

  LocalResult res;
  RealVector x = std::move(x0);
  double fx = loss(x);
  if (n == 0) return {x, -fx, 0, true};
  RealVector g = gradient(x);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  bool fresh_hessian = true;
  int stall = 0;
  int it = 0;
  bool converged = false;

  for (it = 1; it <= cfg.max_iters; ++it) {
    if (g.norm() < 1e-12) {
      converged = true;
      break;
    }
    RealVector p = -hinv * g;
    double slope = g.dot(p);
    if (!(slope < 0)) {
      hinv.setIdentity();
      fresh_hessian = true;
      p = -g;
      slope = -g.squaredNorm();
    }
    // Keep the trial step on the scale of the parameters.
    const double max_step = 10.0 * std::max(1.0, x.norm());
    double t = std::min(1.0, max_step / p.norm());
    bool accepted = false;
    RealVector xn;
    double fn = fx;
    for (int ls = 0; ls < 60; ++ls) {
      xn = x + t * p;
      fn = loss(xn);
      if (fn <= fx + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (!fresh_hessian) {
        hinv.setIdentity();
        fresh_hessian = true;
        continue;
      }
      converged = true;
      break;
    }
    const RealVector s = xn - x;
    const RealVector gn = gradient(xn);
    const RealVector y = gn - g;
    const double improvement = fx - fn;
    x = std::move(xn);
    fx = fn;
    g = gn;

    if (s.norm() < cfg.step_tol * (1.0 + x.norm())) {
      converged = true;
      break;
    }
    stall = improvement < cfg.objective_tol * (1.0 + std::abs(fx)) ? stall + 1 : 0;
    if (stall >= 3) {
      converged = true;
      break;
    }
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh_hessian) hinv *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
      const Eigen::MatrixXd left = id - rho * s * y.transpose();
      hinv = left * hinv * left.transpose() + rho * s * s.transpose();
      fresh_hessian = false;
    }
  }
  res.x = std::move(x);
  res.value = -fx;
  res.iterations = std::min(it, cfg.max_iters);
  res.converged = converged;
  return res;
}

std::vector<LocalResult> run_starts_serial(const ObjectiveFn& f, const std::vector<StartPoint>& starts,
                                           const OptimizerConfig& cfg) {
  std::vector<LocalResult> out;
  out.reserve(starts.size());
  for (const auto& s : starts) out.push_back(bfgs_maximize(f, s.x, cfg));
  return out;
}

std::vector<LocalResult> run_starts_parallel(const ObjectiveFn& f, const std::vector<StartPoint>& starts,
                                             const OptimizerConfig& cfg) {
  const int count = static_cast<int>(starts.size());
  std::vector<LocalResult> out(starts.size());
  std::vector<std::exception_ptr> errors(starts.size());
  const int threads = configured_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = bfgs_maximize(f, starts[static_cast<std::size_t>(i)].x, cfg);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  (void)threads;
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

MultiStartResult multi_start(const ObjectiveFn& f, const std::vector<StartPoint>& starts, const OptimizerConfig& cfg) {
  if (starts.empty()) throw InvalidArgument("multi_start needs at least one start");
  MultiStartResult r;
  r.runs = cfg.exec == Exec::parallel ? run_starts_parallel(f, starts, cfg) : run_starts_serial(f, starts, cfg);
  for (std::size_t i = 1; i < r.runs.size(); ++i)
    if (r.runs[i].value > r.runs[static_cast<std::size_t>(r.best)].value + 1e-12) r.best = static_cast<int>(i);
  return r;
}

// ---------------------------------------------------------------------------
// Measure maximization

namespace {

std::vector<StartPoint> random_starts(int count, int length, std::uint64_t master) {
  std::vector<StartPoint> starts;
  for (int r = 0; r < count; ++r) {
    const std::uint64_t seed = derive_seed(master, static_cast<std::uint64_t>(r));
    Rng rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    RealVector x(length);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = u(rng);
    starts.push_back({std::move(x), "random", seed});
  }
  return starts;
}

OptResult collect(const MultiStartResult& ms, const std::vector<StartPoint>& starts) {
  OptResult out;
  for (std::size_t i = 0; i < starts.size(); ++i)
    out.restart_log.push_back({starts[i].seed, starts[i].label, ms.runs[i].iterations, ms.runs[i].value,
                               ms.runs[i].converged});
  out.best_restart = ms.best;
  out.converged = ms.runs[static_cast<std::size_t>(ms.best)].converged;
  return out;
}

OptResult maximize_holevo(const KrausChannel& ch, int n, const OptimizerConfig& cfg) {
  const bool choi_members = cfg.holevo_choi_members;
  const KrausChannel big =
      measure_channel(choi_members ? MeasureKind::choi_coherent : MeasureKind::holevo, ch, n, cfg.dimension_cap);
  const int dim = big.dim_in();
  const int side = choi_members ? static_cast<int>(std::lround(std::sqrt(static_cast<double>(dim)))) : dim;
  const DimLayout layout = choi_members ? DimLayout{side, side} : DimLayout{dim};
  const StateKind kind = choi_members ? StateKind::choi : StateKind::density;
  const int members = cfg.ensemble_size > 0 ? cfg.ensemble_size : dim;
  const int per = param_length(dim);
  const int length = members + members * per;

  auto unpack = [&](const RealVector& x) {
    RealVector logits = x.head(members);
    logits.array() -= logits.maxCoeff();
    RealVector w = logits.array().exp();
    w /= w.sum();
    std::vector<std::pair<double, Matrix>> out;
    for (int k = 0; k < members; ++k)
      out.emplace_back(w(k), decode_matrix(x.segment(members + k * per, per), kind, layout));
    return out;
  };
  const ObjectiveFn f = [&](const RealVector& x) {
    const auto ens = unpack(x);
    Matrix avg = Matrix::Zero(big.dim_out(), big.dim_out());
    double mean_entropy = 0.0;
    for (const auto& [p, s] : ens) {
      const Matrix o = apply(big, s);
      avg += p * o;
      mean_entropy += p * von_neumann_entropy(o);
    }
    return von_neumann_entropy(avg) - mean_entropy;
  };

  std::vector<StartPoint> starts;
  {
    // Equal weights over basis-diagonal members (flat members for Choi kind).
    RealVector x = RealVector::Zero(length);
    for (int k = 0; k < members; ++k) {
      RealVector member = flat_param(dim);
      if (!choi_members) {
        Matrix l = Matrix::Zero(dim, dim);
        l(k % dim, k % dim) = 1.0;
        for (int i = 0; i < dim; ++i)
          if (i != k % dim) l(i, i) = 1e-3;
        member = raw_from_factor(l);
      }
      x.segment(members + k * per, per) = member;
    }
    starts.push_back({std::move(x), "flat", 0});
  }
  auto rs = random_starts(cfg.restarts, length, cfg.seed);
  starts.insert(starts.end(), rs.begin(), rs.end());

  const MultiStartResult ms = multi_start(f, starts, cfg);
  OptResult out = collect(ms, starts);
  const auto best = unpack(ms.runs[static_cast<std::size_t>(ms.best)].x);
  std::vector<std::pair<double, DensityMatrix>> ens;
  for (const auto& [p, s] : best) ens.emplace_back(p, DensityMatrix::trusted(s, layout));
  // Renormalize the softmax weights exactly.
  double total = 0.0;
  for (const auto& m : ens) total += m.first;
  for (auto& m : ens) m.first /= total;
  out.argmax_ensemble = Ensemble(std::move(ens));
  out.argmax = out.argmax_ensemble->average();
  out.best_value = {ms.runs[static_cast<std::size_t>(ms.best)].value, MeasureKind::holevo, choi_members ? 2 * n : n};
  return out;
}

}  // namespace

OptResult maximize(MeasureKind kind, const KrausChannel& ch, int n, const OptimizerConfig& cfg,
                   const std::vector<Matrix>& warm_starts) {
  cfg.validate();
  if (kind == MeasureKind::holevo) return maximize_holevo(ch, n, cfg);

  const KrausChannel big = measure_channel(kind, ch, n, cfg.dimension_cap);
  const ChannelPair pair = channel_pair(big);
  const int dim = big.dim_in();
  const bool choi = is_choi_measure(kind);
  const int side = choi ? static_cast<int>(std::lround(std::sqrt(static_cast<double>(dim)))) : dim;
  const DimLayout layout = choi ? DimLayout{side, side} : DimLayout{dim};
  const StateKind state_kind = choi ? StateKind::choi : StateKind::density;
  const bool with_entropy = kind == MeasureKind::mutual || kind == MeasureKind::choi_mutual;

  auto value_of = [&](const Matrix& m) {
    const double ic = coherent_information_raw(m, pair);
    return with_entropy ? von_neumann_entropy(m) + ic : ic;
  };
  const ObjectiveFn f = [&](const RealVector& x) { return value_of(decode_matrix(x, state_kind, layout)); };

  std::vector<StartPoint> starts;
  starts.push_back({flat_param(dim), "flat", 0});
  if (choi) starts.push_back({ebit_param(side), "ebit", 0});
  for (const auto& w : warm_starts) {
    if (w.rows() != dim || w.cols() != dim) throw InvalidArgument("warm start has the wrong dimension");
    starts.push_back({raw_from_state(w), "warm", 0});
  }
  auto rs = random_starts(cfg.restarts, param_length(dim), cfg.seed);
  starts.insert(starts.end(), rs.begin(), rs.end());

  const MultiStartResult ms = multi_start(f, starts, cfg);
  OptResult out = collect(ms, starts);
  const Matrix best = decode_matrix(ms.runs[static_cast<std::size_t>(ms.best)].x, state_kind, layout);
  out.argmax = DensityMatrix::trusted(best, layout);
  out.best_value = {value_of(out.argmax.matrix()), kind, choi ? 2 * n : n};
  return out;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

OptimizerConfig with_seed(const OptimizerConfig& cfg, std::uint64_t counter) {
  OptimizerConfig c = cfg;
  c.seed = derive_seed(cfg.seed, counter);
  return c;
}

}  // namespace

GapReport superadditivity_gap(const KrausChannel& ch, const OptimizerConfig& cfg) {
  GapReport r;
  const OptResult one = maximize(MeasureKind::coherent, ch, 1, with_seed(cfg, 101));
  const OptResult choi = maximize(MeasureKind::choi_coherent, ch, 1, with_seed(cfg, 102));
  // Product of one-shot optima and the Choi optimum are feasible two-shot inputs.
  const OptResult two = maximize(MeasureKind::coherent, ch, 2, with_seed(cfg, 103),
                                 {kron(one.argmax.matrix(), one.argmax.matrix()), choi.argmax.matrix()});
  r.one_shot = one.best_value.value;
  r.two_shot = two.best_value.value;
  r.gap = r.two_shot - 2.0 * r.one_shot;
  r.undoubled_diff = r.two_shot - r.one_shot;
  r.choi_one_shot = choi.best_value.value;
  r.one_converged = one.converged;
  r.two_converged = two.converged;
  r.choi_converged = choi.converged;
  r.two_shot_argmax = two.argmax.matrix();
  return r;
}

ChainReport capacity_chain(const KrausChannel& ch, const OptimizerConfig& cfg) {
  ChainReport r;
  r.flat = coherent_information(DensityMatrix::flat(ch.dim_in()), ch).value;
  const OptResult state = maximize(MeasureKind::coherent, ch, 1, with_seed(cfg, 201));
  const OptResult choi = maximize(MeasureKind::choi_coherent, ch, 1, with_seed(cfg, 202));
  const OptResult two = maximize(MeasureKind::coherent, ch, 2, with_seed(cfg, 203),
                                 {choi.argmax.matrix(), kron(state.argmax.matrix(), state.argmax.matrix())});
  r.state_max = state.best_value.value;
  r.choi_per_use = choi.best_value.per_use();
  r.two_copy_half = two.best_value.per_use();
  r.flat_le_choi = r.flat <= r.choi_per_use + 1e-8;
  r.choi_le_two_copy = r.choi_per_use <= r.two_copy_half + 1e-8;
  return r;
}

CaReport ca_capacities(const KrausChannel& ch, const OptimizerConfig& cfg) {
  CaReport r;
  r.opt = maximize(MeasureKind::choi_mutual, ch, 1, cfg);
  r.q_ca_hat = r.opt.best_value.value / 4.0;
  r.c_ca_hat = r.opt.best_value.value / 2.0;
  return r;
}

Matrix apply_choi_map(const Matrix& choi_d, int d_out_d, int d_in_d, const Matrix& x, int rest) {
  if (choi_d.rows() != d_out_d * d_in_d || x.rows() != d_in_d * rest)
    throw InvalidArgument("apply_choi_map: dimension mismatch");
  Matrix out = Matrix::Zero(d_out_d * rest, d_out_d * rest);
  for (int a = 0; a < d_in_d; ++a)
    for (int b = 0; b < d_in_d; ++b) {
      // D(|a><b|) = d_in * block of the Choi matrix at input indices (a, b).
      Matrix dab(d_out_d, d_out_d);
      for (int e = 0; e < d_out_d; ++e)
        for (int f = 0; f < d_out_d; ++f) dab(e, f) = choi_d(e * d_in_d + a, f * d_in_d + b);
      const Matrix xab = x.block(a * rest, b * rest, rest, rest);
      out += static_cast<double>(d_in_d) * kron(dab, xab);
    }
  return out;
}

DegradabilityReport degradability_residual(const KrausChannel& ch, const OptimizerConfig& cfg) {
  cfg.validate();
  const KrausChannel comp = complementary(ch);
  const int d_in = ch.dim_in(), d_out = ch.dim_out(), d_env = comp.dim_out();
  if (d_env * d_out > cfg.dimension_cap)
    throw CapExceeded("degrading map dimension " + std::to_string(d_env * d_out) + " exceeds cap " +
                      std::to_string(cfg.dimension_cap));
  const Matrix target = choi_of(comp).matrix();
  const Matrix phi = choi_of(ch).matrix();
  const DimLayout layout{d_env, d_out};

  const ObjectiveFn f = [&](const RealVector& x) {
    const Matrix wd = decode_matrix(x, StateKind::choi, layout);
    return -(target - apply_choi_map(wd, d_env, d_out, phi, d_in)).squaredNorm();
  };
  std::vector<StartPoint> starts;
  starts.push_back({flat_param(d_env * d_out), "flat", 0});
  auto rs = random_starts(cfg.restarts, param_length(d_env * d_out), cfg.seed);
  starts.insert(starts.end(), rs.begin(), rs.end());
  const MultiStartResult ms = multi_start(f, starts, cfg);
  const auto& best = ms.runs[static_cast<std::size_t>(ms.best)];
  ChoiState map(DensityMatrix::trusted(decode_matrix(best.x, StateKind::choi, layout), layout));
  return {std::sqrt(std::max(0.0, -best.value)), std::move(map)};
}

// ---------------------------------------------------------------------------
// Scans

KrausChannel family_channel(const std::string& family, const std::vector<double>& params) {
  auto need = [&](std::size_t k) {
    if (params.size() != k)
      throw InvalidArgument("family '" + family + "' takes " + std::to_string(k) + " parameters, got " +
                            std::to_string(params.size()));
  };
  if (family == "pauli") {
    need(4);
    return zoo::pauli(params[0], params[1], params[2], params[3]);
  }
  if (family == "dephrasure") {
    need(2);
    return zoo::dephrasure(params[0], params[1]);
  }
  if (family == "dephasing") {
    need(1);
    return zoo::dephasing(params[0]);
  }
  if (family == "amplitude_damping") {
    need(1);
    return zoo::amplitude_damping(params[0]);
  }
  if (family == "erasure") {
    need(1);
    return zoo::erasure(params[0], 2);
  }
  if (family == "depolarizing") {
    need(1);
    return zoo::depolarizing(params[0], 2);
  }
  throw InvalidArgument("unknown channel family '" + family + "'");
}

std::vector<ScanRow> scan(const std::string& family, const std::vector<std::vector<double>>& grid,
                          const OptimizerConfig& cfg) {
  cfg.validate();
  // Build every channel up front so bad parameters fail before any work.
  std::vector<KrausChannel> channels;
  channels.reserve(grid.size());
  for (const auto& params : grid) channels.push_back(family_channel(family, params));

  std::vector<ScanRow> rows(grid.size());
  OptimizerConfig inner = cfg;
  inner.exec = Exec::serial;
  const int count = static_cast<int>(grid.size());
  auto run_point = [&](int i) {
    const auto k = static_cast<std::size_t>(i);
    rows[k].params = grid[k];
    rows[k].report = superadditivity_gap(channels[k], with_seed(inner, 1000 + static_cast<std::uint64_t>(i)));
  };
  if (cfg.exec == Exec::serial) {
    for (int i = 0; i < count; ++i) run_point(i);
    return rows;
  }
  std::vector<std::exception_ptr> errors(grid.size());
  const int threads = configured_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int i = 0; i < count; ++i) {
    try {
      run_point(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  (void)threads;
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

// ---------------------------------------------------------------------------
// Equivalence check for two-qubit maximizers

namespace {

// Global phase fixed by making the first entry of largest modulus real positive.
Matrix canonical_phase(const Matrix& u) {
  Eigen::Index bi = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::abs(u(i)) > best + 1e-9) {
      best = std::abs(u(i));
      bi = i;
    }
  }
  return u * (std::abs(u(bi)) / u(bi));
}

std::vector<Matrix> single_qubit_cliffords() {
  Matrix h(2, 2);
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  Matrix s = Matrix::Zero(2, 2);
  s(0, 0) = 1;
  s(1, 1) = Complex(0, 1);
  std::vector<Matrix> group{Matrix::Identity(2, 2)};
  for (std::size_t i = 0; i < group.size(); ++i) {
    for (const Matrix& g : {h, s}) {
      const Matrix c = canonical_phase(g * group[i]);
      const bool seen = std::any_of(group.begin(), group.end(),
                                    [&](const Matrix& x) { return (x - c).cwiseAbs().maxCoeff() < 1e-9; });
      if (!seen) group.push_back(c);
    }
  }
  return group;
}

}  // namespace

double distance_to_maximally_correlated(const Matrix& state) {
  if (state.rows() != 4 || state.cols() != 4)
    throw InvalidArgument("distance_to_maximally_correlated expects a two-qubit state");
  static const std::vector<Matrix> cliffords = single_qubit_cliffords();
  Matrix ref = Matrix::Zero(4, 4);
  ref(0, 0) = 0.5;
  ref(3, 3) = 0.5;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : cliffords) {
    const Matrix cc = kron(c, c);
    const Matrix rotated = cc * ref * cc.adjoint();
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const Matrix pq = kron(pauli_matrix(a), pauli_matrix(b));
        best = std::min(best, trace_distance(state, pq * rotated * pq.adjoint()));
      }
  }
  return best;
}

}  // namespace qcap
