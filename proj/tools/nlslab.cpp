#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "src/commands.hpp"

namespace {

const char* kConfigHelp = R"(Config file (JSON). Exactly one system source:
  "system": {"coefficients": [c1..c12]}
          | {"matrix": [9 reals, row-major], "vector": [3 reals]}
          | {"template": {"tag": "A11|A12|A13|A21|A22", "params": {...}}}
          | {"example": {"name": "a", "zeta": 2}}   (zeta family; default zeta 2)
          | {"example": {"name": "b"}}              (three distinct eigenvalues)
Optional sections and defaults:
  "analyze": {"cone_tol": 1e-9, "cluster_tol": 1e-8}
  "ode": {"p0": [re1, im1, re2, im2] (random from seed if absent),
          "t_start": 0, "t_end": 100, "tol": 1e-10, "samples": 1024}
  "pde": {"N": 4096, "L": 125.66 (40 pi), "eps": 0.1 (max 0.3), "t_end": 1000,
          "dt": 0.05, "fit_window": [1, t_end], "samples_per_decade": 20,
          "ode_tol": 1e-10, "profiles": [{"amplitude": 1, "center": 0, "width": 1},
          {"amplitude": 0.8, "center": 1, "width": 1}],
          "band_linf": [-0.9, -0.55], "band_l2": [-0.65, -0.35], "y_factor": 10}
  "sweep": {"commands": ["analyze"], "params": {"<dotted path>": [values...]}}
          ("zeta" and "eps" are shorthands for system.example.zeta and pde.eps)
  "seed": 0
  "output": {"dir": "out", "formats": ["json", "csv", "svg"]}
--tol overrides analyze.cone_tol (analyze, normalize), ode.tol (ode-sim),
pde.ode_tol (pde-sim), and ode.tol plus pde.ode_tol (sweep).
NLSLAB_THREADS caps the number of concurrent sweep points.
Exit status: 0 ok, 1 I/O or internal failure, 2 config error, 3 borderline or
numerically degenerate, 4 assumption not satisfied, 5 step size underflow,
6 grid underresolved.)";

}  // namespace

int main(int argc, char** argv) {
  using namespace nlslab::cli;

  CLI::App app{"nlslab: cubic NLS system analysis and simulation"};
  app.footer(kConfigHelp);
  app.require_subcommand(1, 1);

  std::string config_path, out_dir;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  for (const char* name : {"analyze", "normalize", "ode-sim", "pde-sim", "sweep"}) {
    static const std::map<std::string, std::string> blurb{
        {"analyze", "eigen-structure, case label, assumptions, conserved quantities"},
        {"normalize", "reduce to a standard form"},
        {"ode-sim", "integrate the reduced ODE, monitor conserved quantities"},
        {"pde-sim", "split-step PDE run against the modified profile"},
        {"sweep", "cartesian parameter sweep, one report directory per point"}};
    auto* sub = app.add_subcommand(name, blurb.at(name));
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--tol", tol, "principal tolerance of the subcommand");
    sub->add_option("--seed", seed, "seed for random initial data");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
    if (tol || seed) {
      json doc = cfg.raw;
      if (tol) {
        if (cmd == "analyze" || cmd == "normalize") set_path(doc, "analyze.cone_tol", *tol);
        if (cmd == "ode-sim" || cmd == "sweep") set_path(doc, "ode.tol", *tol);
        if (cmd == "pde-sim" || cmd == "sweep") set_path(doc, "pde.ode_tol", *tol);
      }
      if (seed) doc["seed"] = *seed;
      cfg = parse_config(doc);
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
  } catch (const ConfigError& e) {
    std::cerr << "nlslab: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "nlslab: config: " << e.what() << "\n";
    return kExitConfig;
  }

  const CommandOutcome r =
      cmd == "sweep" ? run_sweep(cfg, cfg.out_dir, threads_from_env()) : run_single(cmd, cfg, cfg.out_dir);
  (r.exit_code == kExitOk ? std::cout : std::cerr) << "nlslab " << cmd << ": " << r.message << "\n";
  return r.exit_code;
}
