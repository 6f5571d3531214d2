#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hsmod/experiment.hpp"

using namespace hsmod;

namespace {

std::string with_suffix(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  p.replace_extension(suffix);
  return p.string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete harmonic-map and Higgs-field experiment runner"};
  ExperimentConfig cfg;
  std::string config_path;
  std::string experiment;
  app.add_option("experiment", experiment, "one of: verify-structure, solve-flat, solve-harmonic, coulomb-fix, "
                                           "deformation-dim, degeneracy-scan, geodesic-roundtrip");
  auto* mesh = app.add_option("--mesh", cfg.mesh, "builtin torus:nx:ny, octmin, or a mesh file");
  auto* rank = app.add_option("--rank", cfg.rank, "bundle rank");
  auto* seed = app.add_option("--seed", cfg.rng_seed, "RNG seed");
  auto* out = app.add_option("--out", cfg.output, "report path (JSON); a .csv sibling is written too");
  auto* trace = app.add_flag("--trace", cfg.trace, "write solver iteration traces as CSV");
  app.add_option("--config", config_path, "configuration document; command-line options override it");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (!config_path.empty()) {
      const ExperimentConfig base = parse_config(read_text(config_path));
      ExperimentConfig merged = base;
      if (mesh->count()) merged.mesh = cfg.mesh;
      if (rank->count()) merged.rank = cfg.rank;
      if (seed->count()) merged.rng_seed = cfg.rng_seed;
      if (out->count()) merged.output = cfg.output;
      if (trace->count()) merged.trace = true;
      cfg = merged;
    }
    if (!experiment.empty()) cfg.experiment = experiment;
    cfg.validate();
  } catch (const Error& e) {
    std::cerr << "hsmod: " << e.what() << "\n";
    return 2;
  }

  try {
    const RunResult res = run(cfg);
    const std::string path = resolve_output_path(cfg.output);
    write_atomic(path, dump_json(res.report) + "\n");
    write_atomic(with_suffix(path, ".csv"), emit_csv(res.report));
    if (cfg.trace) {
      std::ostringstream os;
      write_trace_csv(os, res.trace);
      write_atomic(with_suffix(path, ".trace.csv"), os.str());
    }
    std::cerr << "hsmod: " << cfg.experiment << " -> " << res.report["status"].get<std::string>() << " (" << path
              << ")\n";
    return res.exit_code;
  } catch (const Error& e) {
    std::cerr << "hsmod: " << error_kind_name(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "hsmod: internal error: " << e.what() << "\n";
    return 3;
  }
}
