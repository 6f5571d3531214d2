#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hsmod/degeneracy.hpp"
#include "hsmod/experiment.hpp"
#include "hsmod/hypersym.hpp"

namespace py = pybind11;
using namespace hsmod;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;
// pybind11 holders must be non-const; surfaces are never mutated through it.
using PySurface = std::shared_ptr<Surface>;

PySurface expose(const SurfacePtr& s) { return std::const_pointer_cast<Surface>(s); }

// (k, n, n) complex array <-> per-cell matrices.
std::vector<Mat> to_mats(const CArray& a, int cells, const char* what) {
  if (a.ndim() != 3 || a.shape(0) != cells || a.shape(1) != a.shape(2))
    throw Error(ErrorKind::InvalidArgument, std::string(what) + ": expected shape (cells, n, n)");
  const auto n = a.shape(1);
  auto r = a.unchecked<3>();
  std::vector<Mat> out(cells, Mat(n, n));
  for (int k = 0; k < cells; ++k)
    for (py::ssize_t i = 0; i < n; ++i)
      for (py::ssize_t j = 0; j < n; ++j) out[k](i, j) = r(k, i, j);
  return out;
}

CArray to_array(const std::vector<Mat>& ms) {
  const py::ssize_t k = static_cast<py::ssize_t>(ms.size());
  const py::ssize_t n = k ? ms[0].rows() : 0;
  CArray out({k, n, n});
  auto w = out.mutable_unchecked<3>();
  for (py::ssize_t c = 0; c < k; ++c)
    for (py::ssize_t i = 0; i < n; ++i)
      for (py::ssize_t j = 0; j < n; ++j) w(c, i, j) = ms[c](i, j);
  return out;
}

Connection make_conn(const SurfacePtr& s, const CArray& transports) {
  Connection c;
  c.surface = s;
  c.transport = to_mats(transports, s->ne(), "transports");
  c.rank = static_cast<int>(c.transport.empty() ? 1 : c.transport[0].rows());
  return c;
}

FieldState make_state(const SurfacePtr& s, const CArray& transports, const std::optional<CArray>& phi) {
  FieldState st = FieldState::zero_higgs(make_conn(s, transports));
  if (phi) st.phi = Cochain1(to_mats(*phi, s->ne(), "phi"));
  return st;
}

py::dict residual_dict(const ResidualReport& r) {
  py::dict d;
  d["mu_I_norm"] = r.mu_I_norm;
  d["mu_C_norm"] = r.mu_C_norm;
  d["F_plus_norm"] = r.F_plus_norm;
  d["F_minus_norm"] = r.F_minus_norm;
  d["coclosed_norm"] = r.coclosed_norm;
  return d;
}

py::dict spectrum_dict(const SpectrumReport& s) {
  py::dict d;
  d["values"] = s.values;
  d["kernel_count"] = s.kernel_count;
  d["gap_ratio"] = s.gap_ratio;
  return d;
}

StructureSelector selector(const std::string& kind, double theta, cplx zeta) {
  if (kind == "I") return StructureSelector::I();
  if (kind == "S") return StructureSelector::S();
  if (kind == "T") return StructureSelector::T();
  if (kind == "S_theta") return StructureSelector::s_theta(theta);
  if (kind == "T_theta") return StructureSelector::t_theta(theta);
  if (kind == "I_zeta") return StructureSelector::i_zeta(zeta);
  throw Error(ErrorKind::InvalidArgument, "unknown structure '" + kind + "'");
}

NewtonConfig newton(double tol, int max_iter) {
  NewtonConfig c;
  c.tol = tol;
  c.max_iter = max_iter;
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Discrete Higgs-field and harmonic-map numerics";

  static py::exception<Error> hsmod_error(m, "HsmodError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(hsmod_error, (std::string(error_kind_name(e.kind())) + ": " + e.what()).c_str());
    }
  });

  py::class_<Surface, PySurface>(m, "Surface")
      .def_readonly("name", &Surface::name)
      .def_property_readonly("num_vertices", &Surface::nv)
      .def_property_readonly("num_edges", &Surface::ne)
      .def_property_readonly("num_faces", &Surface::nf)
      .def_property_readonly("genus", &Surface::genus)
      .def_readonly("J", &Surface::J)
      .def_property_readonly("edges", [](const Surface& s) { return s.edges; });

  m.def("load_mesh", [](const std::string& spec) { return expose(load_mesh(spec)); }, py::arg("spec"), "Builtin torus:nx:ny / octmin, or a mesh file path");
  m.def(
      "parse_mesh", [](const std::string& text, const std::string& name) { return expose(parse_mesh(text, name)); }, py::arg("text"), py::arg("name") = "mesh");

  m.def("trivial_connection", [](const PySurface& s, int n) { return to_array(Connection::trivial(s, n).transport); },
        py::arg("surface"), py::arg("rank"));
  m.def(
      "random_connection",
      [](const PySurface& s, int n, double scale, std::uint64_t seed) {
        Rng rng(seed);
        return to_array(random_connection(rng, s, n, scale).transport);
      },
      py::arg("surface"), py::arg("rank"), py::arg("scale"), py::arg("seed"));
  m.def("genus2_flat_seed", [](std::uint64_t seed) { return to_array(genus2_flat_seed(seed).transport); },
        py::arg("seed"));
  m.def(
      "curvature",
      [](const PySurface& s, const CArray& u) { return to_array(curvature(make_conn(s, u)).v); }, py::arg("surface"),
      py::arg("transports"));
  m.def(
      "find_flat",
      [](const PySurface& s, const CArray& u, double tol, int max_iter) {
        const FlatResult r = find_flat(make_conn(s, u), newton(tol, max_iter));
        return py::make_tuple(to_array(r.conn.transport), r.residual, r.iterations);
      },
      py::arg("surface"), py::arg("transports"), py::arg("tol") = 1e-10, py::arg("max_iter") = 200);
  m.def("reducibility", [](const PySurface& s, const CArray& u) { return reducibility_check(make_conn(s, u)); },
        py::arg("surface"), py::arg("transports"));

  m.def(
      "moment",
      [](const PySurface& s, const CArray& u, const CArray& phi) {
        const MomentValue mv = moment(make_state(s, u, phi));
        return py::make_tuple(to_array(mv.mu_I.v), to_array(mv.mu_C.v));
      },
      py::arg("surface"), py::arg("transports"), py::arg("phi"));
  m.def(
      "residual",
      [](const PySurface& s, const CArray& u, const CArray& phi) { return residual_dict(residual(make_state(s, u, phi))); },
      py::arg("surface"), py::arg("transports"), py::arg("phi"));
  m.def(
      "deformation_dimension",
      [](const PySurface& s, const CArray& u, std::optional<CArray> phi) {
        return spectrum_dict(deformation_dimension(make_state(s, u, phi)));
      },
      py::arg("surface"), py::arg("transports"), py::arg("phi") = py::none());
  m.def(
      "harmonic_from_endpoints",
      [](const PySurface& s, const CArray& plus, const CArray& minus, double tol) {
        const HarmonicResult r = harmonic_from_endpoints(make_conn(s, plus), make_conn(s, minus), newton(tol, 200));
        return py::make_tuple(to_array(r.state.conn.transport), to_array(r.state.phi.v), residual_dict(r.residuals));
      },
      py::arg("surface"), py::arg("plus"), py::arg("minus"), py::arg("tol") = 1e-10);
  m.def(
      "p_theta",
      [](const PySurface& s, const CArray& u, const CArray& phi, double theta) {
        const auto [p, q] = p_theta(make_state(s, u, phi), theta);
        return py::make_tuple(to_array(p.transport), to_array(q.transport));
      },
      py::arg("surface"), py::arg("transports"), py::arg("phi"), py::arg("theta") = 0.0);
  m.def(
      "degeneracy_spectrum",
      [](const PySurface& s, const CArray& u, const CArray& phi) {
        const DegeneracyReport r = degeneracy_spectrum(make_state(s, u, phi));
        py::dict d = spectrum_dict(r.spectrum);
        d["lambda_min"] = r.lambda_min;
        d["is_degenerate"] = r.is_degenerate;
        return d;
      },
      py::arg("surface"), py::arg("transports"), py::arg("phi"));

  m.def(
      "structure_matrix",
      [](const PySurface& s, int n, const std::string& kind, double theta, cplx zeta) {
        return structure_matrix(*s, n, selector(kind, theta, zeta));
      },
      py::arg("surface"), py::arg("rank"), py::arg("kind"), py::arg("theta") = 0.0, py::arg("zeta") = cplx(0.5));
  m.def("metric_matrix", [](const PySurface& s, int n) { return metric_matrix(*s, n); }, py::arg("surface"),
        py::arg("rank"));

  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        const RunResult r = run(parse_config(config_json));
        return py::make_tuple(dump_json(r.report), r.exit_code);
      },
      py::arg("config_json"), "Runs one experiment from a JSON configuration; returns (report_json, exit_code)");
  m.def("experiment_names", &experiment_names);
}
