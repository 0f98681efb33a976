#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlslab/pde.hpp"
#include "nlslab/templates.hpp"

namespace nlslab::cli {

using nlohmann::json;

// Raised for anything wrong with the config file; maps to exit status 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SystemSource {
  enum class Kind { Coefficients, Matrix, Template, Example };
  Kind kind = Kind::Coefficients;
  std::string description;
  SystemRep rep;
};

struct OdeParams {
  std::optional<FieldPair> p0;  // random from the seed when absent
  double t_start = 0, t_end = 100;
  double tol = 1e-10;
  int samples = 1024;
};

struct PdeParams {
  AsymptoticsOptions opt;
  std::pair<double, double> band_linf{-0.9, -0.55};
  std::pair<double, double> band_l2{-0.65, -0.35};
  double y_factor = 10;
};

struct SweepParams {
  std::vector<std::string> commands{"analyze"};
  // dotted config paths ("zeta", "pde.eps", "system.template.params.eta") -> values
  std::vector<std::pair<std::string, std::vector<json>>> axes;
};

struct ExperimentConfig {
  json raw;  // the parsed document, used by sweeps to derive point configs
  SystemSource system;
  double cone_tol = kTolRel;
  double cluster_tol = 1e-8;
  OdeParams ode;
  PdeParams pde;
  SweepParams sweep;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::vector<std::string> formats{"json", "csv", "svg"};

  bool wants(const std::string& fmt) const;
};

ExperimentConfig parse_config(const json& doc);
ExperimentConfig load_config(const std::string& path);

SystemSource parse_system(const json& sys);

// Set a dotted path inside a JSON document, creating objects on the way.
// A bare "zeta" is shorthand for "system.example.zeta".
void set_path(json& doc, const std::string& path, const json& value);

}  // namespace nlslab::cli
