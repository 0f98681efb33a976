#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace nlslab::cli {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!ok.count(it.key())) fail(where + ": unknown key '" + it.key() + "'");
}

double num(const json& v, const std::string& what) {
  if (!v.is_number()) fail(what + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(what + ": not finite");
  return d;
}

double num_in(const json& obj, const char* key, double def, double lo, double hi, const std::string& where) {
  if (!obj.contains(key)) return def;
  const double d = num(obj.at(key), where + "." + key);
  if (d < lo || d > hi) {
    std::ostringstream os;
    os << where << "." << key << " = " << d << " outside [" << lo << ", " << hi << "]";
    fail(os.str());
  }
  return d;
}

long int_in(const json& obj, const char* key, long def, long lo, long hi, const std::string& where) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(where + "." + key + ": expected an integer");
  const long d = v.get<long>();
  if (d < lo || d > hi) fail(where + "." + key + " = " + std::to_string(d) + " outside [" + std::to_string(lo) +
                             ", " + std::to_string(hi) + "]");
  return d;
}

std::vector<double> reals(const json& v, std::size_t n, const std::string& what) {
  if (!v.is_array() || v.size() != n) fail(what + ": expected an array of " + std::to_string(n) + " numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(num(v[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

std::pair<double, double> interval(const json& v, const std::string& what) {
  const auto r = reals(v, 2, what);
  if (!(r[0] < r[1])) fail(what + ": lower end must be below upper end");
  return {r[0], r[1]};
}

// coefficient vector of the two reference systems
CoefficientVector example_coefficients(const std::string& name, double zeta) {
  CoefficientVector c;
  if (name == "a") {
    c(2) = zeta + 1;
    c(6) = zeta;
    c(7) = 2 * zeta;
    c(10) = 2 * zeta;
    c(11) = 1;
  } else if (name == "b") {
    c(1) = 6;
    c(2) = 3;
    c(3) = 1;
    c(10) = -1;
    c(12) = -4;
  } else {
    fail("system.example.name must be \"a\" or \"b\"");
  }
  return c;
}

GaussianProfile profile(const json& v, const std::string& where) {
  only_keys(v, where, {"amplitude", "center", "width"});
  GaussianProfile p;
  p.amplitude = num_in(v, "amplitude", 1.0, -100, 100, where);
  p.center = num_in(v, "center", 0.0, -1e3, 1e3, where);
  p.width = num_in(v, "width", 1.0, 1e-3, 1e3, where);
  return p;
}

}  // namespace

bool ExperimentConfig::wants(const std::string& fmt) const {
  return std::find(formats.begin(), formats.end(), fmt) != formats.end();
}

SystemSource parse_system(const json& sys) {
  if (!sys.is_object()) fail("system: expected an object");
  int sources = 0;
  for (const char* k : {"coefficients", "matrix", "template", "example"}) sources += sys.contains(k) ? 1 : 0;
  if (sources != 1) fail("system: exactly one of coefficients, matrix (+vector), template, example is required");

  SystemSource out;
  if (sys.contains("coefficients")) {
    only_keys(sys, "system", {"coefficients"});
    const auto c = reals(sys.at("coefficients"), 12, "system.coefficients");
    CoefficientVector cv;
    std::copy(c.begin(), c.end(), cv.c.begin());
    out.kind = SystemSource::Kind::Coefficients;
    out.description = "coefficients";
    out.rep = coefficients_to_system(cv);
  } else if (sys.contains("matrix")) {
    only_keys(sys, "system", {"matrix", "vector"});
    if (!sys.contains("vector")) fail("system: matrix needs a companion vector");
    const auto m = reals(sys.at("matrix"), 9, "system.matrix");
    const auto v = reals(sys.at("vector"), 3, "system.vector");
    out.kind = SystemSource::Kind::Matrix;
    out.description = "matrix";
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) out.rep.A(i, j) = m[static_cast<std::size_t>(3 * i + j)];
      out.rep.V(i) = v[static_cast<std::size_t>(i)];
    }
  } else if (sys.contains("template")) {
    only_keys(sys, "system", {"template"});
    const json& t = sys.at("template");
    only_keys(t, "system.template", {"tag", "params"});
    if (!t.contains("tag") || !t.at("tag").is_string()) fail("system.template.tag: expected a string");
    FormTag tag;
    try {
      tag = form_from_name(t.at("tag").get<std::string>());
    } catch (const Error&) {
      fail("system.template.tag: unknown tag '" + t.at("tag").get<std::string>() + "'");
    }
    const json& pj = t.contains("params") ? t.at("params") : json::object();
    if (!pj.is_object()) fail("system.template.params: expected an object");
    Params p;
    const auto& names = param_names(tag);
    for (auto it = pj.begin(); it != pj.end(); ++it) {
      if (std::find(names.begin(), names.end(), it.key()) == names.end())
        fail("system.template.params: " + form_name(tag) + " has no parameter '" + it.key() + "'");
      p[it.key()] = num(it.value(), "system.template.params." + it.key());
    }
    for (const auto& n : names)
      if (!p.count(n)) fail("system.template.params: missing '" + n + "'");
    const std::string why = template_violation(tag, p);
    if (!why.empty()) fail("system.template: " + why);
    out.kind = SystemSource::Kind::Template;
    out.description = "template " + form_name(tag);
    out.rep.A = template_matrix(tag, p);
  } else {
    const json& e = sys.at("example");
    only_keys(sys, "system", {"example"});
    only_keys(e, "system.example", {"name", "zeta"});
    if (!e.contains("name") || !e.at("name").is_string()) fail("system.example.name: expected a string");
    const std::string name = e.at("name").get<std::string>();
    const double zeta = num_in(e, "zeta", 2.0, -1e6, 1e6, "system.example");
    if (name == "b" && e.contains("zeta")) fail("system.example: zeta only applies to example \"a\"");
    out.kind = SystemSource::Kind::Example;
    out.description = "example " + name;
    out.rep = coefficients_to_system(example_coefficients(name, zeta));
  }
  if (!out.rep.A.allFinite() || !out.rep.V.allFinite()) fail("system: non-finite entries");
  return out;
}

ExperimentConfig parse_config(const json& doc) {
  only_keys(doc, "config", {"system", "analyze", "ode", "pde", "sweep", "seed", "output"});
  ExperimentConfig cfg;
  cfg.raw = doc;
  if (!doc.contains("system")) fail("config: missing 'system'");
  cfg.system = parse_system(doc.at("system"));

  if (doc.contains("analyze")) {
    const json& a = doc.at("analyze");
    only_keys(a, "analyze", {"cone_tol", "cluster_tol"});
    cfg.cone_tol = num_in(a, "cone_tol", cfg.cone_tol, 1e-15, 1e-2, "analyze");
    cfg.cluster_tol = num_in(a, "cluster_tol", cfg.cluster_tol, 1e-15, 1e-2, "analyze");
  }

  if (doc.contains("ode")) {
    const json& o = doc.at("ode");
    only_keys(o, "ode", {"p0", "t_start", "t_end", "tol", "samples"});
    if (o.contains("p0")) {
      const auto p = reals(o.at("p0"), 4, "ode.p0");
      for (double x : p)
        if (std::abs(x) > 1e6) fail("ode.p0: entries must be at most 1e6 in magnitude");
      cfg.ode.p0 = FieldPair{cplx(p[0], p[1]), cplx(p[2], p[3])};
    }
    cfg.ode.t_start = num_in(o, "t_start", 0.0, -1e9, 1e9, "ode");
    cfg.ode.t_end = num_in(o, "t_end", 100.0, -1e9, 1e9, "ode");
    if (!(cfg.ode.t_end > cfg.ode.t_start)) fail("ode: t_end must exceed t_start");
    cfg.ode.tol = num_in(o, "tol", 1e-10, 1e-14, 1e-2, "ode");
    cfg.ode.samples = static_cast<int>(int_in(o, "samples", 1024, 2, 1'000'000, "ode"));
  }

  if (doc.contains("pde")) {
    const json& p = doc.at("pde");
    only_keys(p, "pde", {"N", "L", "eps", "t_end", "dt", "fit_window", "samples_per_decade", "ode_tol", "profiles",
                         "band_linf", "band_l2", "y_factor"});
    auto& o = cfg.pde.opt;
    const long N = int_in(p, "N", o.grid.N, 256, 1 << 20, "pde");
    if ((N & (N - 1)) != 0) fail("pde.N must be a power of two");
    o.grid.N = static_cast<int>(N);
    o.grid.L = num_in(p, "L", o.grid.L, 1.0, 1e5, "pde");
    o.eps = num_in(p, "eps", o.eps, 1e-6, 0.3, "pde");
    o.t_end = num_in(p, "t_end", o.t_end, 2.0, 1e5, "pde");
    o.dt0 = num_in(p, "dt", o.dt0, 1e-5, 1.0, "pde");
    o.fit_window = p.contains("fit_window") ? interval(p.at("fit_window"), "pde.fit_window") : std::pair{1.0, o.t_end};
    if (o.fit_window.first < 1 || o.fit_window.second > o.t_end)
      fail("pde.fit_window must lie inside [1, t_end]");
    o.samples_per_decade = static_cast<int>(int_in(p, "samples_per_decade", o.samples_per_decade, 2, 1000, "pde"));
    o.ode_tol = num_in(p, "ode_tol", o.ode_tol, 1e-14, 1e-4, "pde");
    if (p.contains("profiles")) {
      const json& pr = p.at("profiles");
      if (!pr.is_array() || pr.size() != 2) fail("pde.profiles: expected two profile objects");
      o.profile1 = profile(pr[0], "pde.profiles[0]");
      o.profile2 = profile(pr[1], "pde.profiles[1]");
    }
    if (p.contains("band_linf")) cfg.pde.band_linf = interval(p.at("band_linf"), "pde.band_linf");
    if (p.contains("band_l2")) cfg.pde.band_l2 = interval(p.at("band_l2"), "pde.band_l2");
    cfg.pde.y_factor = num_in(p, "y_factor", cfg.pde.y_factor, 1e-3, 1e6, "pde");
  }

  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    only_keys(s, "sweep", {"commands", "params"});
    if (s.contains("commands")) {
      const json& c = s.at("commands");
      if (!c.is_array() || c.empty()) fail("sweep.commands: expected a non-empty array");
      cfg.sweep.commands.clear();
      static const std::set<std::string> known{"analyze", "normalize", "ode-sim", "pde-sim"};
      for (const auto& x : c) {
        if (!x.is_string() || !known.count(x.get<std::string>()))
          fail("sweep.commands: entries must be analyze, normalize, ode-sim or pde-sim");
        cfg.sweep.commands.push_back(x.get<std::string>());
      }
    }
    if (s.contains("params")) {
      const json& ps = s.at("params");
      if (!ps.is_object()) fail("sweep.params: expected an object of arrays");
      for (auto it = ps.begin(); it != ps.end(); ++it) {
        if (!it.value().is_array()) fail("sweep.params." + it.key() + ": expected an array");
        std::vector<json> vals(it.value().begin(), it.value().end());
        cfg.sweep.axes.emplace_back(it.key(), std::move(vals));
      }
    }
  }

  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      fail("seed: expected a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    only_keys(o, "output", {"dir", "formats"});
    if (o.contains("dir")) {
      if (!o.at("dir").is_string() || o.at("dir").get<std::string>().empty()) fail("output.dir: expected a path");
      cfg.out_dir = o.at("dir").get<std::string>();
    }
    if (o.contains("formats")) {
      const json& f = o.at("formats");
      if (!f.is_array()) fail("output.formats: expected an array");
      cfg.formats.clear();
      for (const auto& x : f) {
        if (!x.is_string() || (x != "json" && x != "csv" && x != "svg"))
          fail("output.formats: entries must be json, csv or svg");
        cfg.formats.push_back(x.get<std::string>());
      }
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    return parse_config(doc);
  } catch (const json::exception& e) {
    // type mismatches deep inside nlohmann accessors
    fail(std::string("config: ") + e.what());
  }
}

void set_path(json& doc, const std::string& path, const json& value) {
  std::string p = path;
  if (p == "zeta") p = "system.example.zeta";
  if (p == "eps") p = "pde.eps";
  if (p.empty()) fail("sweep.params: empty parameter path");
  json* cur = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = p.find('.', start);
    const std::string key = p.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) fail("sweep.params: malformed path '" + path + "'");
    if (!cur->is_object()) fail("sweep.params: '" + path + "' runs through a non-object");
    if (dot == std::string::npos) {
      (*cur)[key] = value;
      return;
    }
    cur = &(*cur)[key];
    if (cur->is_null()) *cur = json::object();
    start = dot + 1;
  }
}

}  // namespace nlslab::cli
