#include "hsmod/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hsmod {

std::string format_number(double x) {
  if (!std::isfinite(x)) throw Error(ErrorKind::Invariant, "non-finite number in output");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  // keep the token a JSON number that reads back as floating point
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

namespace {

void dump_rec(std::ostringstream& os, const Json& j, int indent, int depth) {
  const std::string pad(indent * (depth + 1), ' '), close_pad(indent * depth, ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::number_float:
      os << format_number(j.get<double>());
      return;
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{" << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << "," << nl;
        first = false;
        os << pad << Json(it.key()).dump() << (indent > 0 ? ": " : ":");
        dump_rec(os, it.value(), indent, depth + 1);
      }
      os << nl << close_pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // numeric leaves stay on one line
      bool flat = true;
      for (const auto& x : j) flat = flat && x.is_primitive();
      os << "[";
      for (size_t k = 0; k < j.size(); ++k) {
        if (k) os << (flat ? ", " : ",");
        if (!flat) os << nl << pad;
        dump_rec(os, j[k], indent, depth + 1);
      }
      if (!flat) os << nl << close_pad;
      os << "]";
      return;
    }
    default:
      os << j.dump();
  }
}

std::pair<int, int> line_col(const std::string& text, size_t byte) {
  int line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// Byte offset of element idx of the top-level array stored under key, or npos.
size_t locate_element(const std::string& text, const std::string& key, int idx) {
  size_t p = text.find("\"" + key + "\"");
  if (p == std::string::npos) return p;
  p = text.find('[', p);
  if (p == std::string::npos) return p;
  int depth = 0, count = 0;
  bool in_string = false;
  for (size_t i = p + 1; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    if (depth == 0 && !std::isspace(static_cast<unsigned char>(c)) && c != ',' && c != ']') {
      if (count == idx) return i;
      ++count;
    }
    if (c == '[' || c == '{') ++depth;
    if (c == ']' || c == '}') {
      if (depth == 0) return std::string::npos;
      --depth;
    }
  }
  return std::string::npos;
}

std::string where(const std::string& text, size_t byte) {
  const auto [l, c] = line_col(text, byte);
  return "line " + std::to_string(l) + ", column " + std::to_string(c);
}

RVec read_weights(const Json& w, const char* key) {
  if (!w.contains(key)) return {};
  const auto v = w.at(key).get<std::vector<double>>();
  return Eigen::Map<const RVec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Json matrix_to_json(const Mat& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
  return out;
}

Mat matrix_from_json(const Json& j, int n, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n * n)
    throw Error(ErrorKind::InvalidArgument, what + ": expected " + std::to_string(n * n) + " [re, im] entries");
  Mat m(n, n);
  for (int k = 0; k < n * n; ++k) {
    const auto& e = j[k];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw Error(ErrorKind::InvalidArgument, what + "[" + std::to_string(k) + "]: expected [re, im]");
    m(k / n, k % n) = cplx(e[0].get<double>(), e[1].get<double>());
  }
  return m;
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::ostringstream os;
  dump_rec(os, j, indent, 0);
  return os.str();
}

SurfacePtr parse_mesh(const std::string& text, const std::string& name) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::InvalidMesh, name + ": " + where(text, e.byte > 0 ? e.byte - 1 : 0) + ": malformed document");
  }
  CellSpec spec;
  std::string field;
  try {
    field = "vertices";
    spec.vertices = j.at("vertices").get<int>();
    field = "edges";
    for (const auto& e : j.at("edges")) {
      const auto p = e.get<std::vector<int>>();
      if (p.size() != 2) throw Error(ErrorKind::InvalidMesh, "edge is not a [tail, head] pair");
      spec.edges.emplace_back(p[0], p[1]);
    }
    field = "faces";
    for (const auto& f : j.at("faces")) spec.faces.push_back(f.get<std::vector<int>>());
    if (j.contains("weights")) {
      field = "weights";
      const auto& w = j.at("weights");
      spec.m0 = read_weights(w, "m0");
      spec.m1 = read_weights(w, "m1");
      spec.m2 = read_weights(w, "m2");
    }
    if (j.contains("complex_structure")) {
      field = "complex_structure";
      const int ne = static_cast<int>(spec.edges.size());
      spec.J = RMat::Zero(ne, ne);
      for (const auto& t : j.at("complex_structure")) {
        const int r = t.at(0).get<int>(), c = t.at(1).get<int>();
        if (r < 0 || c < 0 || r >= ne || c >= ne) throw Error(ErrorKind::InvalidMesh, "entry index out of range");
        spec.J(r, c) = t.at(2).get<double>();
      }
    }
  } catch (const Error& e) {
    throw Error(e.kind(), name + ": field '" + field + "': " + e.what());
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InvalidMesh, name + ": field '" + field + "': " + e.what());
  }
  try {
    return build_cw_complex(spec, name);
  } catch (const Error& e) {
    const std::string msg = e.what();
    std::string key;
    if (msg.rfind("faces[", 0) == 0 || msg.rfind("face ", 0) == 0) key = "faces";
    if (msg.rfind("edges[", 0) == 0) key = "edges";
    if (!key.empty() && e.index() >= 0) {
      const size_t at = locate_element(text, key, e.index());
      if (at != std::string::npos)
        throw Error(e.kind(), name + ": " + where(text, at) + ": " + msg, e.residual(), e.index());
    }
    throw Error(e.kind(), name + ": " + msg, e.residual(), e.index());
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Config, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SurfacePtr read_mesh_file(const std::string& path) {
  return parse_mesh(read_text(path), std::filesystem::path(path).filename().string());
}

SurfacePtr load_mesh(const std::string& spec) {
  if (spec == "octmin" || spec.rfind("torus:", 0) == 0) return build_builtin(spec);
  if (!std::filesystem::exists(spec)) throw Error(ErrorKind::Config, "mesh '" + spec + "' is neither a builtin nor a file");
  return read_mesh_file(spec);
}

std::string mesh_to_json(const Surface& s) {
  Json j;
  j["vertices"] = s.nv();
  j["edges"] = Json::array();
  for (const auto& e : s.edges) j["edges"].push_back(Json::array({e.first, e.second}));
  j["faces"] = Json::array();
  for (const auto& f : s.faces) {
    Json row = Json::array();
    for (const auto& st : f) row.push_back(st.sign > 0 ? st.edge + 1 : -(st.edge + 1));
    j["faces"].push_back(row);
  }
  auto vec = [](const RVec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  j["weights"] = {{"m0", vec(s.m0)}, {"m1", vec(s.m1)}, {"m2", vec(s.m2)}};
  j["complex_structure"] = Json::array();
  for (int r = 0; r < s.ne(); ++r)
    for (int c = 0; c < s.ne(); ++c)
      if (s.J(r, c) != 0.0) j["complex_structure"].push_back(Json::array({r, c, s.J(r, c)}));
  return dump_json(j);
}

std::string field_to_json(const FieldState& st, const std::string& mesh_ref) {
  Json j;
  j["mesh_ref"] = mesh_ref;
  j["rank"] = st.conn.rank;
  j["transports"] = Json::array();
  for (const auto& u : st.conn.transport) j["transports"].push_back(matrix_to_json(u));
  j["phi"] = Json::array();
  for (const auto& p : st.phi.v) j["phi"].push_back(matrix_to_json(p));
  return dump_json(j);
}

FieldState parse_field(const std::string& text, SurfacePtr s, std::string* mesh_ref) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::InvalidArgument, "field file: " + where(text, e.byte > 0 ? e.byte - 1 : 0) + ": malformed");
  }
  try {
    const int n = j.at("rank").get<int>();
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "field file: rank must be >= 1");
    const auto& tr = j.at("transports");
    const auto& ph = j.at("phi");
    if (static_cast<int>(tr.size()) != s->ne() || static_cast<int>(ph.size()) != s->ne())
      throw Error(ErrorKind::InvalidArgument, "field file: edge count does not match the mesh");
    FieldState st = FieldState::zero_higgs(Connection::trivial(s, n));
    for (int e = 0; e < s->ne(); ++e) {
      st.conn.transport[e] = matrix_from_json(tr[e], n, "transports[" + std::to_string(e) + "]");
      st.phi[e] = matrix_from_json(ph[e], n, "phi[" + std::to_string(e) + "]");
    }
    if (mesh_ref) *mesh_ref = j.value("mesh_ref", std::string());
    return st;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("field file: ") + e.what());
  }
}

RMat read_triplets(std::istream& is, int rows, int cols) {
  RMat m = RMat::Zero(rows, cols);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int r, c;
    double v;
    if (!(ls >> r >> c >> v)) throw Error(ErrorKind::InvalidArgument, "malformed triplet line '" + line + "'");
    if (r < 0 || c < 0 || r >= rows || c >= cols) throw Error(ErrorKind::InvalidArgument, "triplet index out of range");
    m(r, c) = v;
  }
  return m;
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << "solver,iter,residual,step_norm\n";
  for (const auto& r : trace)
    os << r.solver << ',' << r.iter << ',' << format_number(r.residual) << ',' << format_number(r.step_norm) << '\n';
}

void write_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  try {
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorKind::Config, "cannot write '" + tmp.string() + "'");
      out << contents;
      out.flush();
      if (!out) throw Error(ErrorKind::Config, "short write to '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
  } catch (const fs::filesystem_error& e) {
    throw Error(ErrorKind::Config, std::string("cannot write '") + path + "': " + e.what());
  }
}

}  // namespace hsmod
