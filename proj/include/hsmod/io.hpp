#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "hsmod/gaugefield.hpp"
#include "hsmod/solver.hpp"

namespace hsmod {

using Json = nlohmann::ordered_json;

// Shortest-free decimal form with 17 significant digits; throws Invariant on
// non-finite input. Every number written by this library goes through here.
std::string format_number(double x);
// JSON serialization that routes floating-point values through format_number.
std::string dump_json(const Json& j, int indent = 2);

// Mesh documents: {vertices, edges: [[tail, head]] (0-based vertices),
// faces: [[signed 1-based edge refs]], weights?: {m0, m1, m2},
// complex_structure?: [[row, col, value]]}.
SurfacePtr parse_mesh(const std::string& text, const std::string& name = "mesh");
SurfacePtr read_mesh_file(const std::string& path);
// Builtin spec or file path.
SurfacePtr load_mesh(const std::string& spec);
std::string mesh_to_json(const Surface& s);

// Field documents: {mesh_ref, rank, transports, phi}, matrices row-major as
// [re, im] pairs.
std::string field_to_json(const FieldState& st, const std::string& mesh_ref);
FieldState parse_field(const std::string& text, SurfacePtr s, std::string* mesh_ref = nullptr);

RMat read_triplets(std::istream& is, int rows, int cols);

void write_trace_csv(std::ostream& os, const Trace& trace);

// Writes via a temporary sibling file and rename.
void write_atomic(const std::string& path, const std::string& contents);
std::string read_text(const std::string& path);

}  // namespace hsmod
