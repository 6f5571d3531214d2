#include "hsmod/experiment.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>

#include "hsmod/degeneracy.hpp"
#include "hsmod/hypersym.hpp"

namespace hsmod {

namespace {

constexpr double kStructureTol = 1e-11;
// Log-chart scale of the perturbation separating the two flat endpoints.
constexpr double kEndpointSpread = 0.02;
constexpr double kSeedScale = 0.3;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Json residual_block(const ResidualReport& r) {
  return Json{{"mu_I_norm", r.mu_I_norm},
              {"mu_C_norm", r.mu_C_norm},
              {"F_plus_norm", r.F_plus_norm},
              {"F_minus_norm", r.F_minus_norm},
              {"coclosed_norm", r.coclosed_norm}};
}

Json spectrum_block(const SpectrumReport& s, size_t keep = 40) {
  std::vector<double> low(s.values.begin(), s.values.begin() + std::min(keep, s.values.size()));
  return Json{{"kernel_count", s.kernel_count}, {"gap_ratio", s.gap_ratio}, {"lowest", low}};
}

// Shared state for one run: mesh, RNG and the report being filled in.
struct Context {
  const ExperimentConfig& cfg;
  SurfacePtr surface;
  Rng rng;
  Json& report;
  Trace* trace;

  void metric(const std::string& name, double v) { report["metrics"][name] = v; }

  template <class F>
  auto stage(const std::string& name, F&& f) {
    const auto t0 = Clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      report["wall_times"][name] = seconds_since(t0);
    } else {
      auto out = f();
      report["wall_times"][name] = seconds_since(t0);
      return out;
    }
  }

  Connection flat_point() {
    if (surface->name == "octmin" && cfg.rank == 2) return genus2_flat_seed(rng());
    return find_flat(random_connection(rng, surface, cfg.rank, kSeedScale), cfg.tolerances, trace).conn;
  }

  std::pair<Connection, Connection> endpoints() {
    const Connection plus = stage("flat_plus", [&] { return flat_point(); });
    const Connection minus = stage("flat_minus", [&] {
      const Cochain1 kick = random_cochain1(rng, *surface, cfg.rank, kEndpointSpread);
      return find_flat(chart_shift(plus, kick), cfg.tolerances, trace).conn;
    });
    return {plus, minus};
  }
};

double mat_residual(const RMat& m) { return m.cwiseAbs().maxCoeff(); }

void verify_structure(Context& cx) {
  const Surface& s = *cx.surface;
  const int n = cx.cfg.rank;
  const Diagnostics diag = validate(s);
  double mesh_res = 0;
  for (const auto& c : diag.checks) mesh_res = std::max(mesh_res, c.residual);
  const RMat i = structure_matrix(s, n, StructureSelector::I());
  const RMat sm = structure_matrix(s, n, StructureSelector::S());
  const RMat t = structure_matrix(s, n, StructureSelector::T());
  const RMat g = metric_matrix(s, n);
  const RMat id = RMat::Identity(i.rows(), i.cols());
  Json alg;
  alg["I_squared"] = mat_residual(i * i + id);
  alg["S_squared"] = mat_residual(sm * sm - id);
  alg["T_squared"] = mat_residual(t * t - id);
  alg["IS_minus_T"] = mat_residual(i * sm - t);
  alg["SI_plus_T"] = mat_residual(sm * i + t);
  alg["I_skew"] = mat_residual(g * i + i.transpose() * g);
  alg["S_skew"] = mat_residual(g * sm + sm.transpose() * g);
  alg["T_skew"] = mat_residual(g * t + t.transpose() * g);
  double omega_res = 0;
  for (int k = 0; k < 5; ++k) {
    const TangentPair x = random_tangent(cx.rng, s, n), y = random_tangent(cx.rng, s, n);
    // complex-linearity in I: omega_c(IX, Y) = i omega_c(X, Y)
    const cplx lhs = omega_c(s, apply_structure(s, StructureSelector::I(), x), y);
    omega_res = std::max(omega_res, std::abs(lhs - cplx(0, 1) * omega_c(s, x, y)));
    const RVec xr = tp_to_real(x), yr = tp_to_real(y);
    const cplx via_matrix((g * sm * xr).dot(yr), (g * t * xr).dot(yr));
    omega_res = std::max(omega_res, std::abs(via_matrix - omega_c(s, x, y)));
  }
  alg["omega_c"] = omega_res;
  double worst = 0;
  for (auto it = alg.begin(); it != alg.end(); ++it) {
    worst = std::max(worst, it.value().get<double>());
    cx.metric("structure." + it.key(), it.value().get<double>());
  }
  cx.metric("mesh.max_check_residual", mesh_res);
  cx.report["structure_residuals"] = alg;
  cx.report["verdicts"]["structure_ok"] = worst < kStructureTol;
  cx.report["verdicts"]["mesh_ok"] = diag.ok();
  if (!(worst < kStructureTol) || !diag.ok())
    throw Error(ErrorKind::Invariant, "structure residual above tolerance", worst);
}

void solve_flat(Context& cx) {
  const Connection seed = random_connection(cx.rng, cx.surface, cx.cfg.rank, kSeedScale);
  const FlatResult fr = cx.stage("find_flat", [&] { return find_flat(seed, cx.cfg.tolerances, cx.trace); });
  cx.metric("flat.residual", fr.residual);
  cx.metric("flat.iterations", fr.iterations);
  cx.metric("flat.stabilizer_dim", reducibility_check(fr.conn));
  cx.metric("flat.seed_curvature", norm2c(*cx.surface, curvature(seed)));
}

void solve_harmonic(Context& cx) {
  const auto [plus, minus] = cx.endpoints();
  cx.metric("endpoints.chart_distance", chart_distance(plus, minus));
  const HarmonicResult hr =
      cx.stage("harmonic", [&] { return harmonic_from_endpoints(plus, minus, cx.cfg.tolerances, cx.trace); });
  cx.report["residuals"] = residual_block(hr.residuals);
  for (auto it = cx.report["residuals"].begin(); it != cx.report["residuals"].end(); ++it)
    cx.metric("harmonic." + it.key(), it.value().get<double>());
  cx.metric("harmonic.iterations", hr.iterations);
  const auto [p2, m2] = p_theta(hr.state, 0.0);
  const FieldState back = p_theta_inverse(p2, m2, 0.0);
  cx.metric("harmonic.roundtrip", state_distance(back, hr.state));
  cx.metric("harmonic.phi_norm", norm1(*cx.surface, hr.state.phi));
}

void coulomb(Context& cx) {
  const Surface& s = *cx.surface;
  const int n = cx.cfg.rank;
  FieldState ref = FieldState::zero_higgs(random_connection(cx.rng, cx.surface, n, kSeedScale));
  ref.phi = random_cochain1(cx.rng, s, n, 0.1);
  const GaugeTransformation v = exp_gauge(random_cochain0(cx.rng, s, n, 0.05));
  const FieldState target = gauge_act(v, ref);
  const CoulombResult cr = cx.stage("coulomb_fix", [&] { return coulomb_fix(ref, target, cx.cfg.tolerances,
                                                                           CoulombMode::Reference, std::nullopt,
                                                                           cx.trace); });
  cx.metric("coulomb.residual", cr.residual);
  cx.metric("coulomb.iterations", cr.iterations);
  cx.metric("coulomb.recovery", state_distance(gauge_act(cr.u, target), ref));
}

void deformation_dim(Context& cx) {
  const Connection c = cx.stage("flat_point", [&] { return cx.flat_point(); });
  const FieldState st = FieldState::zero_higgs(c);
  const SpectrumReport sp = cx.stage("svd", [&] { return deformation_dimension(st); });
  const Cohomology h = cx.stage("cohomology", [&] { return deformation_cohomology(st); });
  const int n = cx.cfg.rank, g = cx.surface->genus();
  cx.report["spectra"]["deformation"] = spectrum_block(sp);
  cx.metric("deformation.kernel_count", sp.kernel_count);
  cx.metric("deformation.gap_ratio", sp.gap_ratio);
  cx.metric("deformation.expected", 4 * (n * n * (g - 1) + 1));
  cx.metric("deformation.stabilizer_dim", reducibility_check(c));
  cx.metric("cohomology.h0", h.h0);
  cx.metric("cohomology.h1", h.h1);
  cx.metric("cohomology.h2", h.h2);
  cx.report["verdicts"]["gap_ok"] = sp.gap_ok();
}

void degeneracy_scan(Context& cx) {
  const Connection c = cx.stage("flat_point", [&] { return cx.flat_point(); });
  const Cochain1 dir = random_cochain1(cx.rng, *cx.surface, cx.cfg.rank, 1.0);
  Json rows = Json::array();
  for (double eps : {0.0, 0.01, 0.03, 0.1, 0.3, 1.0}) {
    FieldState st = FieldState::zero_higgs(c);
    st.phi = cplx(eps) * dir;
    const DegeneracyReport dr = degeneracy_spectrum(st);
    Json row{{"phi_scale", eps},
             {"lambda_min", dr.lambda_min},
             {"kernel_count", dr.spectrum.kernel_count},
             {"certified", false},
             {"witness_attached", dr.witness.has_value()}};
    try {
      const Certificate cert = small_phi_certificate(st);
      row["certified"] = cert.certified;
      row["threshold"] = cert.threshold;
      row["phi_four_norm"] = cert.phi_norm;
      if (cert.certified && dr.is_degenerate)
        throw Error(ErrorKind::Invariant, "certified state reported degenerate", dr.lambda_min);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Hypothesis) throw;
    }
    rows.push_back(row);
  }
  cx.report["degeneracy"] = rows;
  cx.metric("degeneracy.lambda_min_phi0", rows[0]["lambda_min"].get<double>());
  cx.metric("degeneracy.lambda_min_last", rows.back()["lambda_min"].get<double>());
}

void geodesic_roundtrip(Context& cx) {
  const auto [plus, minus] = cx.endpoints();
  const HarmonicResult hr =
      cx.stage("harmonic", [&] { return harmonic_from_endpoints(plus, minus, cx.cfg.tolerances, cx.trace); });
  double worst = 0;
  for (double theta : {0.0, 0.7, 1.9, 3.0}) {
    const auto [p, m] = p_theta(hr.state, theta);
    worst = std::max(worst, state_distance(p_theta_inverse(p, m, theta), hr.state));
  }
  const FieldState back = parse_field(field_to_json(hr.state, cx.cfg.mesh), cx.surface);
  cx.report["residuals"] = residual_block(hr.residuals);
  cx.metric("roundtrip.p_theta", worst);
  cx.metric("roundtrip.field_file", state_distance(back, hr.state));
  // swapping the endpoints flips the sign of phi up to gauge
  const HarmonicResult sw =
      cx.stage("harmonic_swapped", [&] { return harmonic_from_endpoints(minus, plus, cx.cfg.tolerances, cx.trace); });
  FieldState flipped = hr.state;
  flipped.phi = cplx(-1) * flipped.phi;
  // alignment is unique only modulo the center, so it needs an irreducible reference
  const int stab = reducibility_check(flipped.conn);
  cx.metric("roundtrip.stabilizer_dim", stab);
  cx.report["verdicts"]["swap_checked"] = stab == 1;
  if (stab != 1) return;
  const CoulombResult align = coulomb_fix(flipped, sw.state, cx.cfg.tolerances);
  cx.metric("roundtrip.swap_distance", state_distance(gauge_act(align.u, sw.state), flipped));
}

using Runner = std::function<void(Context&)>;

const std::vector<std::pair<std::string, Runner>>& registry() {
  static const std::vector<std::pair<std::string, Runner>> r{
      {"verify-structure", verify_structure}, {"solve-flat", solve_flat},
      {"solve-harmonic", solve_harmonic},     {"coulomb-fix", coulomb},
      {"deformation-dim", deformation_dim},   {"degeneracy-scan", degeneracy_scan},
      {"geodesic-roundtrip", geodesic_roundtrip}};
  return r;
}

std::string status_for(ErrorKind k) {
  switch (exit_code_for(k)) {
    case 1: return "solver-error";
    case 2: return "config-error";
    default: return "invariant-violation";
  }
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [k, v] : registry()) out.push_back(k);
    return out;
  }();
  return names;
}

void ExperimentConfig::validate() const {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), experiment) == names.end())
    throw Error(ErrorKind::Config, "experiment: unknown name '" + experiment + "'");
  if (rank < 1) throw Error(ErrorKind::Config, "rank: must be >= 1");
  if (mesh.empty()) throw Error(ErrorKind::Config, "mesh: must not be empty");
  if (output.empty()) throw Error(ErrorKind::Config, "output: must not be empty");
  tolerances.validate();
}

ExperimentConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    int line = 1;
    for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) line += text[i] == '\n';
    throw Error(ErrorKind::Config, "config: line " + std::to_string(line) + ": malformed document");
  }
  if (!j.is_object()) throw Error(ErrorKind::Config, "config: top level must be an object");
  ExperimentConfig cfg;
  std::string field;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      field = it.key();
      const Json& v = it.value();
      if (field == "experiment") cfg.experiment = v.get<std::string>();
      else if (field == "mesh") cfg.mesh = v.get<std::string>();
      else if (field == "rank") cfg.rank = v.get<int>();
      else if (field == "rng_seed") cfg.rng_seed = v.get<std::uint64_t>();
      else if (field == "output") cfg.output = v.get<std::string>();
      else if (field == "trace") cfg.trace = v.get<bool>();
      else if (field == "tolerances") {
        for (auto t = v.begin(); t != v.end(); ++t) {
          field = "tolerances." + t.key();
          if (t.key() == "max_iter") cfg.tolerances.max_iter = t.value().get<int>();
          else if (t.key() == "tol") cfg.tolerances.tol = t.value().get<double>();
          else if (t.key() == "step_damping") cfg.tolerances.step_damping = t.value().get<double>();
          else if (t.key() == "center_projection") cfg.tolerances.center_projection = t.value().get<bool>();
          else throw Error(ErrorKind::Config, "unknown field");
        }
      } else {
        throw Error(ErrorKind::Config, "unknown field");
      }
    }
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, "config: field '" + field + "': " + e.what());
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Config, "config: field '" + field + "': " + e.what());
  }
  cfg.validate();
  return cfg;
}

Json config_to_json(const ExperimentConfig& cfg) {
  return Json{{"experiment", cfg.experiment},
              {"mesh", cfg.mesh},
              {"rank", cfg.rank},
              {"rng_seed", cfg.rng_seed},
              {"tolerances",
               {{"max_iter", cfg.tolerances.max_iter},
                {"tol", cfg.tolerances.tol},
                {"step_damping", cfg.tolerances.step_damping},
                {"center_projection", cfg.tolerances.center_projection}}},
              {"output", cfg.output},
              {"trace", cfg.trace}};
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidMesh:
    case ErrorKind::Topology:
    case ErrorKind::NoComplexStructure:
      return 2;
    case ErrorKind::Invariant:
      return 3;
    default:
      return 1;
  }
}

RunResult run(const ExperimentConfig& cfg) {
  cfg.validate();
  RunResult out;
  Json& rep = out.report;
  rep["schema_version"] = kSchemaVersion;
  rep["experiment"] = cfg.experiment;
  rep["status"] = "ok";
  rep["config"] = config_to_json(cfg);
  rep["conventions"] = {{"mu_C_normalization", "-2i"},
                        {"chart", "left: exp(a) U"},
                        {"transport", "U_e maps the head fiber to the tail fiber"},
                        {"kernel_rule", "sigma <= 1e-8 sigma_max, gap_ratio >= 1e3"}};
  rep["metrics"] = Json::object();
  rep["verdicts"] = Json::object();
  rep["wall_times"] = Json::object();
  const SurfacePtr surface = load_mesh(cfg.mesh);
  rep["mesh"] = {{"name", surface->name},
                 {"vertices", surface->nv()},
                 {"edges", surface->ne()},
                 {"faces", surface->nf()},
                 {"genus", surface->genus()}};
  Context cx{cfg, surface, Rng(cfg.rng_seed), rep, cfg.trace ? &out.trace : nullptr};
  const auto t0 = Clock::now();
  const auto& reg = registry();
  const auto it = std::find_if(reg.begin(), reg.end(), [&](const auto& p) { return p.first == cfg.experiment; });
  try {
    it->second(cx);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    out.exit_code = exit_code_for(e.kind());
    rep["status"] = e.kind() == ErrorKind::NonConvergence ? "non-convergence" : status_for(e.kind());
    rep["error"] = {{"kind", error_kind_name(e.kind())}, {"message", e.what()}};
    if (std::isfinite(e.residual()) && e.residual() >= 0) rep["error"]["residual"] = e.residual();
  }
  rep["wall_times"]["total"] = seconds_since(t0);
  return out;
}

std::string emit_csv(const Json& report) {
  std::ostringstream os;
  os << "metric_name,value\n";
  if (report.contains("metrics"))
    for (auto it = report["metrics"].begin(); it != report["metrics"].end(); ++it) {
      os << it.key() << ',';
      const Json& v = it.value();
      if (v.is_number_float()) os << format_number(v.get<double>());
      else os << v.dump();
      os << '\n';
    }
  return os.str();
}

std::string resolve_output_path(const std::string& path) {
  const char* dir = std::getenv("HSMOD_OUTPUT_DIR");
  const std::filesystem::path p(path);
  if (!dir || !*dir || p.is_absolute()) return path;
  return (std::filesystem::path(dir) / p).string();
}

}  // namespace hsmod
