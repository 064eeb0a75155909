#include "cli.hpp"

#include "qcap/error.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace qcap::cli {

using nlohmann::json;

namespace {

double required(const json& params, const char* key) {
  if (!params.contains(key)) throw InvalidArgument(std::string("channel spec is missing parameter '") + key + "'");
  return params.at(key).get<double>();
}

int optional_int(const json& params, const char* key, int fallback) {
  return params.contains(key) ? params.at(key).get<int>() : fallback;
}

Complex entry_from_json(const json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2) return {v[0].get<double>(), v[1].get<double>()};
  throw InvalidArgument("matrix entries must be numbers or [re, im] pairs");
}

Matrix matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty() || !rows[0].is_array()) throw InvalidArgument("matrix must be a list of rows");
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows[0].size());
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) throw InvalidArgument("ragged matrix rows");
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = entry_from_json(row[static_cast<std::size_t>(j)]);
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json rr = json::array(), ii = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ii.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ii));
  }
  return {{"real", std::move(re)}, {"imag", std::move(im)}};
}

KrausChannel named_channel(const std::string& name, const json& params) {
  if (name == "identity") return zoo::identity(optional_int(params, "d", 2));
  if (name == "pauli") {
    if (params.contains("p")) {
      const auto p = params.at("p").get<std::vector<double>>();
      if (p.size() != 4) throw InvalidArgument("pauli takes four probabilities");
      return zoo::pauli(p[0], p[1], p[2], p[3]);
    }
    return zoo::pauli(required(params, "p0"), required(params, "p1"), required(params, "p2"), required(params, "p3"));
  }
  if (name == "dephasing") return zoo::dephasing(required(params, "p"));
  if (name == "depolarizing") return zoo::depolarizing(required(params, "lambda"), optional_int(params, "d", 2));
  if (name == "erasure") return zoo::erasure(required(params, "q"), optional_int(params, "d", 2));
  if (name == "amplitude_damping") return zoo::amplitude_damping(required(params, "gamma"));
  if (name == "dephrasure") return zoo::dephrasure(required(params, "p"), required(params, "q"));
  if (name == "replacer") {
    const int dim_in = optional_int(params, "dim_in", 2);
    if (!params.contains("target")) return zoo::replacer(DensityMatrix::basis(2, 0), dim_in);
    return zoo::replacer(DensityMatrix(matrix_from_json(params.at("target"))), dim_in);
  }
  throw InvalidArgument("unknown channel name '" + name + "'");
}

KrausChannel pauli_string_channel(const json& spec) {
  const auto strings = spec.at("paulis").get<std::vector<std::string>>();
  if (strings.empty()) throw InvalidArgument("paulis must not be empty");
  std::vector<double> weights(strings.size(), 1.0 / static_cast<double>(strings.size()));
  if (spec.contains("weights")) weights = spec.at("weights").get<std::vector<double>>();
  if (weights.size() != strings.size()) throw InvalidArgument("paulis and weights differ in length");
  std::vector<Matrix> ops;
  for (std::size_t k = 0; k < strings.size(); ++k) {
    if (weights[k] < 0) throw InvalidArgument("pauli weights must be non-negative");
    if (strings[k].size() != strings[0].size() || strings[k].empty())
      throw InvalidArgument("pauli strings must share a non-zero length");
    Matrix op = Matrix::Identity(1, 1);
    for (char c : strings[k]) {
      const std::string letters = "IXYZ";
      const auto idx = letters.find(c);
      if (idx == std::string::npos) throw InvalidArgument(std::string("bad pauli letter '") + c + "'");
      op = kron(op, pauli_matrix(static_cast<int>(idx)));
    }
    ops.push_back(std::sqrt(weights[k]) * op);
  }
  return KrausChannel(std::move(ops));
}

}  // namespace

KrausChannel channel_from_json(const json& spec) {
  if (!spec.is_object()) throw InvalidArgument("channel spec must be a JSON object");
  if (spec.contains("name")) return named_channel(spec.at("name").get<std::string>(), spec.value("params", json::object()));
  if (spec.contains("paulis")) return pauli_string_channel(spec);
  if (spec.contains("kraus")) {
    std::vector<Matrix> ops;
    for (const auto& k : spec.at("kraus")) ops.push_back(matrix_from_json(k));
    KrausChannel ch(std::move(ops));
    if (spec.contains("dim_in") && spec.at("dim_in").get<int>() != ch.dim_in())
      throw InvalidArgument("dim_in does not match the Kraus operators");
    if (spec.contains("dim_out") && spec.at("dim_out").get<int>() != ch.dim_out())
      throw InvalidArgument("dim_out does not match the Kraus operators");
    return ch;
  }
  throw InvalidArgument("channel spec needs 'name', 'kraus' or 'paulis'");
}

CodeProjector code_from_json(const json& spec) {
  if (!spec.is_object()) throw InvalidArgument("code spec must be a JSON object");
  if (spec.contains("stabilizer_code")) {
    const auto name = spec.at("stabilizer_code").get<std::string>();
    if (name == "repetition3") return CodeProjector::repetition3();
    throw InvalidArgument("unknown stabilizer code '" + name + "'");
  }
  if (spec.contains("projector")) return CodeProjector(matrix_from_json(spec.at("projector")));
  throw InvalidArgument("code spec needs 'stabilizer_code' or 'projector'");
}

json load_spec(const std::string& text_or_path) {
  std::string text = text_or_path;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || text[first] != '{') {
    std::ifstream in(text_or_path);
    if (!in) throw InvalidArgument("cannot read spec file '" + text_or_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("malformed JSON: ") + e.what());
  }
}

std::vector<double> parse_range(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw InvalidArgument("bad number '" + s + "' in range '" + text + "'");
    return v;
  };
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.size() == 1) return {number(parts[0])};
  if (parts.size() != 3) throw InvalidArgument("range must be 'start:stop:step', got '" + text + "'");
  const double a = number(parts[0]), b = number(parts[1]), step = number(parts[2]);
  if (!(step > 0) || b < a) throw InvalidArgument("range '" + text + "' is empty or has a non-positive step");
  const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
  std::vector<double> out;
  for (long i = 0; i < count; ++i) out.push_back(a + static_cast<double>(i) * step);
  return out;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string scan_csv(const std::string& family, const std::vector<ScanRow>& rows) {
  std::vector<std::string> names;
  if (family == "pauli")
    names = {"p0", "p1", "p2", "p3"};
  else if (family == "dephrasure")
    names = {"p", "q"};
  else if (!rows.empty())
    for (std::size_t i = 0; i < rows.front().params.size(); ++i) names.push_back("x" + std::to_string(i));
  std::string csv;
  for (const auto& n : names) csv += n + ",";
  csv += "one_shot,two_shot,gap,undoubled_diff,choi_one_shot,one_converged,two_converged,choi_converged\r\n";
  for (const auto& row : rows) {
    for (double p : row.params) csv += format_number(p) + ",";
    const GapReport& r = row.report;
    csv += format_number(r.one_shot) + "," + format_number(r.two_shot) + "," + format_number(r.gap) + "," +
           format_number(r.undoubled_diff) + "," + format_number(r.choi_one_shot) + "," +
           (r.one_converged ? "1" : "0") + "," + (r.two_converged ? "1" : "0") + "," + (r.choi_converged ? "1" : "0") +
           "\r\n";
  }
  return csv;
}

namespace {

struct Common {
  int restarts = 32;
  std::uint64_t seed = 0;
  int max_iters = 2000;
  int cap = kDefaultDimensionCap;
  double step_tol = 1e-9;
  double objective_tol = 1e-8;
  std::string out;

  void add_to(CLI::App* app) {
    app->add_option("--restarts", restarts, "random restarts")->check(CLI::NonNegativeNumber);
    app->add_option("--seed", seed, "master seed");
    app->add_option("--max-iters", max_iters, "iterations per restart")->check(CLI::PositiveNumber);
    app->add_option("--cap", cap, "maximum searched dimension")->check(CLI::PositiveNumber);
    app->add_option("--step-tol", step_tol, "step-size stopping tolerance");
    app->add_option("--objective-tol", objective_tol, "objective-change stopping tolerance");
    app->add_option("--out", out, "output file (a .manifest.json sidecar is written next to it)");
  }

  OptimizerConfig config() const {
    OptimizerConfig c;
    c.restarts = restarts;
    c.seed = seed;
    c.max_iters = max_iters;
    c.dimension_cap = cap;
    c.step_tol = step_tol;
    c.objective_tol = objective_tol;
    c.validate();
    return c;
  }
};

json config_json(const OptimizerConfig& c) {
  return {{"seed", c.seed},          {"restarts", c.restarts},       {"max_iters", c.max_iters},
          {"dimension_cap", c.dimension_cap}, {"step_tol", c.step_tol}, {"objective_tol", c.objective_tol},
          {"fd_step", c.fd_step}};
}

std::vector<std::string> without_out(const std::vector<std::string>& args) {
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out") {
      ++i;
      continue;
    }
    if (args[i].rfind("--out=", 0) == 0) continue;
    kept.push_back(args[i]);
  }
  return kept;
}

class Emitter {
 public:
  Emitter(std::string command, const std::vector<std::string>& args, std::ostream& out)
      : command_(std::move(command)), args_(without_out(args)), out_(out), start_(std::chrono::steady_clock::now()) {}

  json manifest(const json& extra) const {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json m = {{"command", command_}, {"args", args_}, {"version", kVersion}, {"duration_seconds", secs}};
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    return m;
  }

  // Writes text to `path` (or stdout) and the manifest next to it.
  void write(const std::string& path, const std::string& text, const json& extra) const {
    if (path.empty()) {
      out_ << text;
      return;
    }
    write_file(path, text);
    write_file(path + ".manifest.json", manifest(extra).dump(2) + "\n");
  }

  void write_json(const std::string& path, json doc, const json& extra) const {
    if (path.empty()) doc["manifest"] = manifest(extra);
    write(path, doc.dump(2) + "\n", extra);
  }

 private:
  static void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidArgument("cannot write '" + path + "'");
    f << text;
  }

  std::string command_;
  std::vector<std::string> args_;
  std::ostream& out_;
  std::chrono::steady_clock::time_point start_;
};

RealVector sorted_desc(RealVector v) {
  std::sort(v.data(), v.data() + v.size(), std::greater<>());
  return v;
}

json info_json(const KrausChannel& ch) {
  const RealVector eig = sorted_desc(hermitian_eigenvalues(choi_of(ch).matrix()));
  int rank = 0;
  for (double e : eig)
    if (e > tol::kKrausRank) ++rank;
  return {{"dim_in", ch.dim_in()},
          {"dim_out", ch.dim_out()},
          {"kraus_count", ch.num_kraus()},
          {"choi_rank", rank},
          {"trace_preservation_residual", ch.trace_preservation_defect()},
          {"choi_eigenvalues", std::vector<double>(eig.data(), eig.data() + eig.size())}};
}

json restart_log_json(const OptResult& r) {
  json log = json::array();
  for (const auto& rec : r.restart_log)
    log.push_back({{"seed", rec.seed},
                   {"start", rec.start},
                   {"iterations", rec.iterations},
                   {"final_value", rec.final_value},
                   {"converged", rec.converged}});
  return log;
}

json sample_choi(int dim, int count, std::uint64_t seed, bool states) {
  const DimLayout layout{dim, dim};
  json samples = json::array();
  double worst = 0.0;
  for (int s = 0; s < count; ++s) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    std::normal_distribution<double> gauss;
    RealVector raw(param_length(dim * dim));
    for (Eigen::Index i = 0; i < raw.size(); ++i) raw(i) = gauss(rng);
    const Matrix m = decode_matrix(raw, StateKind::choi, layout);
    const double trace_res = std::abs(m.trace() - Complex(1.0));
    const double herm = hermiticity_defect(m);
    const double min_eig = hermitian_eigenvalues(m).minCoeff();
    const double marginal = choi_marginal_defect(m, dim, dim);
    worst = std::max({worst, trace_res, herm, marginal, std::max(0.0, -min_eig)});
    json item = {{"trace_residual", trace_res},
                 {"hermiticity_residual", herm},
                 {"min_eigenvalue", min_eig},
                 {"marginal_residual", marginal}};
    if (states) item["state"] = matrix_to_json(m);
    samples.push_back(std::move(item));
  }
  return {{"dim", dim}, {"count", count}, {"seed", seed}, {"max_residual", worst}, {"samples", std::move(samples)}};
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const CapExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kCapExceeded;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kSpecError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: bad spec: " << e.what() << "\n";
    return kSpecError;
  } catch (const InvariantViolation& e) {
    err << "internal error: " << e.what() << "\n";
    return kInvariant;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInvariant;
  }
}

namespace {

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum channel capacities by multi-start optimization", "qcap"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string channel_text, code_text, measure = "coherent", family, format = "json", manifest_path;
  std::string p0, p1, p2, p_range, q_range;
  double q_ratio = 0.0, qec_tol = 1e-8;
  int copies = 1, dim = 2, count = 100;
  bool degradability = false, states = false;
  Common common;

  auto* info = app.add_subcommand("info", "channel summary");
  info->add_option("--channel", channel_text, "channel spec (JSON text or file)")->required();
  info->add_flag("--degradability", degradability, "also estimate the degradability residual");
  common.add_to(info);

  auto* capacity = app.add_subcommand("capacity", "maximize an information measure");
  capacity->add_option("--channel", channel_text, "channel spec (JSON text or file)")->required();
  capacity->add_option("--measure", measure, "coherent|mutual|choi-coherent|choi-mutual|holevo");
  capacity->add_option("--copies", copies, "channel copies n")->check(CLI::PositiveNumber);
  capacity->add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  common.add_to(capacity);

  auto* scan_cmd = app.add_subcommand("scan", "superadditivity scan over a channel family");
  scan_cmd->add_option("--family", family, "pauli|dephrasure")->required()->check(CLI::IsMember({"pauli", "dephrasure"}));
  scan_cmd->add_option("--p0", p0, "pauli: range for p0");
  scan_cmd->add_option("--p1", p1, "pauli: range for p1");
  scan_cmd->add_option("--p2", p2, "pauli: range for p2 (p3 = 1 - p0 - p1 - p2)");
  scan_cmd->add_option("--p", p_range, "dephrasure: range for p");
  scan_cmd->add_option("--q", q_range, "dephrasure: range for q");
  scan_cmd->add_option("--q-ratio", q_ratio, "dephrasure: q = ratio * p");
  common.add_to(scan_cmd);

  auto* qec_cmd = app.add_subcommand("qec-check", "Knill-Laflamme check of a code against a channel");
  qec_cmd->add_option("--code", code_text, "code spec (JSON text or file)")->required();
  qec_cmd->add_option("--channel", channel_text, "channel spec (JSON text or file)")->required();
  qec_cmd->add_option("--tol", qec_tol, "residual tolerance");
  qec_cmd->add_option("--out", common.out, "output file");

  auto* sample_cmd = app.add_subcommand("sample-choi", "random Choi states with constraint residuals");
  sample_cmd->add_option("--dim", dim, "input dimension d (states on d x d)")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--count", count, "number of samples")->check(CLI::NonNegativeNumber);
  sample_cmd->add_option("--seed", common.seed, "seed");
  sample_cmd->add_flag("--states", states, "include the sampled matrices");
  sample_cmd->add_option("--out", common.out, "output file");

  auto* replay = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  replay->add_option("--manifest", manifest_path, "manifest JSON")->required();
  replay->add_option("--out", common.out, "output file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kSpecError;
  }

  if (*replay) {
    const json m = load_spec(manifest_path);
    auto replay_args = m.at("args").get<std::vector<std::string>>();
    if (!common.out.empty()) {
      replay_args.push_back("--out");
      replay_args.push_back(common.out);
    }
    return run(replay_args, out, err);
  }

  if (*sample_cmd) {
    const Emitter em("sample-choi", args, out);
    em.write_json(common.out, sample_choi(dim, count, common.seed, states), json::object());
    return kOk;
  }

  if (*qec_cmd) {
    const json code_spec = load_spec(code_text);
    const json channel_spec = load_spec(channel_text);
    const CodeProjector code = code_from_json(code_spec);
    const KrausChannel ch = channel_from_json(channel_spec);
    const KLReport kl = kl_check(code, ch, qec_tol);
    json doc = {{"satisfied", kl.satisfied},
                {"residual", kl.residual},
                {"degeneracy_rank", kl.degeneracy_rank},
                {"effective_error_probs", kl.effective_error_probs},
                {"c_matrix", matrix_to_json(kl.c_matrix)}};
    const int k = code.code_dim();
    if (kl.satisfied && (k & (k - 1)) == 0 && k > 1 && ch.dim_in() == ch.dim_out()) {
      const int logical = static_cast<int>(std::lround(std::log2(k)));
      doc["recovery_entanglement_fidelity"] =
          entanglement_fidelity(encoder(code.isometry()), ch, exact_decoder(code, ch), logical);
    }
    const Emitter em("qec-check", args, out);
    em.write_json(common.out, doc, {{"code", code_spec}, {"channel", channel_spec}});
    return kOk;
  }

  const OptimizerConfig cfg = common.config();

  if (*info) {
    const json spec = load_spec(channel_text);
    const KrausChannel ch = channel_from_json(spec);
    json doc = info_json(ch);
    if (degradability) {
      const DegradabilityReport d = degradability_residual(ch, cfg);
      doc["degradability_residual"] = d.residual;
      doc["numerically_degradable"] = d.degradable();
    }
    const Emitter em("info", args, out);
    em.write_json(common.out, doc, {{"channel", spec}, {"config", config_json(cfg)}});
    return kOk;
  }

  if (*capacity) {
    const json spec = load_spec(channel_text);
    const KrausChannel ch = channel_from_json(spec);
    const MeasureKind kind = parse_measure(measure);
    const OptResult r = maximize(kind, ch, copies, cfg);
    const double per_use = r.best_value.per_use();
    const Emitter em("capacity", args, out);
    const json extra = {{"channel", spec}, {"config", config_json(cfg)}};
    if (format == "csv") {
      std::string csv = "measure,copies,channel_uses,value,per_use,capacity_estimate,converged\r\n";
      csv += std::string(to_string(kind)) + "," + std::to_string(copies) + "," +
             std::to_string(r.best_value.copies) + "," + format_number(r.best_value.value) + "," +
             format_number(per_use) + "," + format_number(std::max(0.0, per_use)) + "," +
             (r.converged ? "1" : "0") + "\r\n";
      em.write(common.out, csv, extra);
      return kOk;
    }
    json doc = {{"measure", std::string(to_string(kind))},
                {"copies", copies},
                {"channel_uses", r.best_value.copies},
                {"value", r.best_value.value},
                {"per_use", per_use},
                {"capacity_estimate", std::max(0.0, per_use)},
                {"converged", r.converged},
                {"best_restart", r.best_restart},
                {"argmax", matrix_to_json(r.argmax.matrix())},
                {"restart_log", restart_log_json(r)}};
    if (r.argmax_ensemble) {
      json members = json::array();
      for (const auto& [p, s] : r.argmax_ensemble->members())
        members.push_back({{"probability", p}, {"state", matrix_to_json(s.matrix())}});
      doc["ensemble"] = std::move(members);
    }
    em.write_json(common.out, doc, extra);
    return kOk;
  }

  // scan
  std::vector<std::vector<double>> grid;
  if (family == "pauli") {
    if (p0.empty() || p1.empty() || p2.empty()) throw InvalidArgument("pauli scan needs --p0, --p1 and --p2");
    for (double a : parse_range(p0))
      for (double b : parse_range(p1))
        for (double c : parse_range(p2)) {
          const double d = 1.0 - a - b - c;
          if (d < -1e-12) continue;
          grid.push_back({a, b, c, std::max(0.0, d)});
        }
  } else {
    if (p_range.empty()) throw InvalidArgument("dephrasure scan needs --p");
    if (q_range.empty() == (q_ratio == 0.0)) throw InvalidArgument("dephrasure scan needs exactly one of --q, --q-ratio");
    for (double p : parse_range(p_range)) {
      if (q_range.empty())
        grid.push_back({p, q_ratio * p});
      else
        for (double q : parse_range(q_range)) grid.push_back({p, q});
    }
  }
  const Emitter em("scan", args, out);
  const auto rows = scan(family, grid, cfg);
  em.write(common.out, scan_csv(family, rows), {{"family", family}, {"grid_points", grid.size()}, {"config", config_json(cfg)}});
  (void)err;
  return kOk;
}

}  // namespace

}  // namespace qcap::cli
