#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <random>
#include <thread>

#include "nlslab/normalize.hpp"
#include "nlslab/ode.hpp"
#include "writers.hpp"

#ifndef NLSLAB_VERSION
#define NLSLAB_VERSION "0.0.0"
#endif

namespace nlslab::cli {

namespace fs = std::filesystem;

namespace {

json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec(const Vec3& v) { return json::array({jnum(v(0)), jnum(v(1)), jnum(v(2))}); }

json mat3(const Mat3& m) {
  json out = json::array();
  for (int i = 0; i < 3; ++i) out.push_back(json::array({jnum(m(i, 0)), jnum(m(i, 1)), jnum(m(i, 2))}));
  return out;
}

json mat2(const Mat2& m) {
  return json::array({json::array({jnum(m(0, 0)), jnum(m(0, 1))}), json::array({jnum(m(1, 0)), jnum(m(1, 1))})});
}

json transform(const GL2Transform& t) { return {{"M", mat2(t.M)}, {"det", jnum(t.detM)}}; }

json envelope(const std::string& command, const ExperimentConfig& cfg) {
  return {{"schema_version", 1},
          {"tool", "nlslab"},
          {"version", NLSLAB_VERSION},
          {"command", command},
          {"seed", cfg.seed},
          {"system", system_json(cfg.system.rep, cfg.system.description)}};
}

std::string kind_name(ConservedQuantitySpec::Kind k) {
  switch (k) {
    case ConservedQuantitySpec::Kind::Pair: return "pair";
    case ConservedQuantitySpec::Kind::Ratio: return "ratio";
    case ConservedQuantitySpec::Kind::Combined: return "combined";
  }
  return "pair";
}

json conserved_json(const ConservedQuantitySpec& q) {
  json terms = json::array();
  for (const auto& t : q.terms) {
    json prod = json::array();
    for (const auto& f : t) prod.push_back({{"a", vec(f.a)}, {"exponent", jnum(f.exponent)}});
    terms.push_back(prod);
  }
  return {{"name", q.name},
          {"kind", kind_name(q.kind)},
          {"a1", vec(q.a1)},
          {"a2", vec(q.a2)},
          {"lambda1", jnum(q.lambda1)},
          {"lambda2", jnum(q.lambda2)},
          {"exponents", json::array({jnum(q.e1), jnum(q.e2)})},
          {"coercive", q.coercive},
          {"degree", jnum(q.degree)},
          {"terms", terms},
          {"formula", render_formula(q)}};
}

FieldPair initial_data(const ExperimentConfig& cfg) {
  if (cfg.ode.p0) return *cfg.ode.p0;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double a = U(rng), b = U(rng), c = U(rng), d = U(rng);
  return {cplx(a, b), cplx(c, d)};
}

struct Failure {
  int code;
  std::string kind, message;
};

CommandOutcome finish_error(json doc, const fs::path& out, const std::string& command, const Failure& f) {
  doc["status"] = "error";
  doc["exit_code"] = f.code;
  doc["error"] = {{"kind", f.kind}, {"message", f.message}};
  write_json(out / (command + ".json"), doc);
  return {f.code, f.message};
}

CommandOutcome do_analyze(const ExperimentConfig& cfg, const fs::path& out) {
  json doc = envelope("analyze", cfg);
  bool borderline = false;
  doc["result"] = analyze_result(cfg.system.rep, cfg, borderline);
  doc["status"] = borderline ? "borderline" : "ok";
  doc["exit_code"] = borderline ? kExitDegenerate : kExitOk;
  if (cfg.wants("json")) write_json(out / "analyze.json", doc);
  const auto& r = doc["result"];
  std::string msg = "case " + r["case_label"].get<std::string>() + ", rank " + std::to_string(r["rank"].get<int>()) +
                    (r["assumption1"].get<bool>() ? ", assumption1" : "") +
                    (r["assumption2"].get<bool>() ? ", assumption2" : "");
  if (borderline) msg += ", borderline";
  return {borderline ? kExitDegenerate : kExitOk, msg};
}

CommandOutcome do_normalize(const ExperimentConfig& cfg, const fs::path& out) {
  json doc = envelope("normalize", cfg);
  doc["result"] = normalize_result(cfg.system.rep);
  doc["status"] = "ok";
  doc["exit_code"] = kExitOk;
  if (cfg.wants("json")) write_json(out / "normalize.json", doc);
  return {kExitOk, "form " + doc["result"]["form_tag"].get<std::string>() + ", subcase " +
                       doc["result"]["subcase"].get<std::string>()};
}

CommandOutcome do_ode(const ExperimentConfig& cfg, const fs::path& out) {
  const SystemRep& s = cfg.system.rep;
  const FieldPair p0 = initial_data(cfg);
  IntegrateOptions io;
  io.samples = cfg.ode.samples;
  const OdeTrajectory tr = integrate(s, p0, {cfg.ode.t_start, cfg.ode.t_end}, cfg.ode.tol, io);

  if (cfg.wants("csv")) {
    std::vector<std::string> header{"t", "re_phi1", "im_phi1", "re_phi2", "im_phi2"};
    header.insert(header.end(), tr.diagnostic_names.begin(), tr.diagnostic_names.end());
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      const auto& p = tr.states[k];
      std::vector<double> r{tr.times[k], p.phi1.real(), p.phi1.imag(), p.phi2.real(), p.phi2.imag()};
      r.insert(r.end(), tr.diagnostics[k].begin(), tr.diagnostics[k].end());
      rows.push_back(std::move(r));
    }
    write_csv(out / "ode-sim.csv", header, rows);
  }

  json res;
  res["p0"] = json::array({p0.phi1.real(), p0.phi1.imag(), p0.phi2.real(), p0.phi2.imag()});
  res["p0_source"] = cfg.ode.p0 ? "config" : "seed";
  res["t_span"] = json::array({cfg.ode.t_start, cfg.ode.t_end});
  res["tol"] = cfg.ode.tol;
  res["samples"] = tr.times.size();
  res["integrator_stats"] = {{"steps", tr.integrator_stats.steps},
                             {"rejected_steps", tr.integrator_stats.rejected_steps},
                             {"rhs_evals", tr.integrator_stats.rhs_evals}};
  res["underflow"] = tr.underflow;
  res["failure_time"] = jnum(tr.failure_time);

  // relative drift max_t |q(t) - q(0)| / |q(0)|, absolute when q(0) = 0;
  // max_drift covers the synthesized quantities only
  json drift = json::object(), quantities = json::array();
  double worst = 0;
  bool any = false;
  std::vector<ConservedQuantitySpec> specs;
  try {
    specs = conserved_quantities(s);
  } catch (const Error&) {
  }
  for (std::size_t j = 0; j < tr.diagnostic_names.size(); ++j) {
    const double q0 = tr.diagnostics.empty() ? NAN : tr.diagnostics.front()[j];
    double d = NAN;
    if (std::isfinite(q0)) {
      double m = 0;
      for (const auto& row : tr.diagnostics)
        if (std::isfinite(row[j])) m = std::max(m, std::abs(row[j] - q0));
      d = q0 != 0 ? m / std::abs(q0) : m;
    }
    drift[tr.diagnostic_names[j]] = jnum(d);
    // norm2 is reported but is not a conserved quantity in general
    if (j > 0 && std::isfinite(d)) worst = std::max(worst, d), any = true;
    json q{{"name", tr.diagnostic_names[j]},
           {"initial", jnum(q0)},
           {"final", jnum(tr.diagnostics.empty() ? NAN : tr.diagnostics.back()[j])},
           {"drift", jnum(d)}};
    if (j == 0)
      q["formula"] = "|phi1|^2 + |phi2|^2";
    else
      q["formula"] = j - 1 < specs.size() ? render_formula(specs[j - 1]) : "";
    quantities.push_back(q);
  }
  res["quantities"] = quantities;
  res["drift"] = drift;
  res["max_drift"] = any ? json(worst) : json(nullptr);

  double ratio = NAN;
  try {
    ratio = global_bound_ratio(tr);
  } catch (const Error&) {
    // zero data: the ratio is undefined
  }
  res["global_bound_ratio"] = jnum(ratio);
  json bound = nullptr;
  const Classification cls = classify(s, cfg.cone_tol, cfg.cluster_tol);
  if (cls.assumption1 || cls.assumption2) {
    try {
      const BoundConstant bc = global_bound_constant(s, cls);
      bound = {{"C", jnum(bc.C)}, {"source", bc.source}};
      if (std::isfinite(ratio)) bound["ratio_within_bound"] = ratio <= bc.C * (1 + 1e-9);
    } catch (const Error&) {
    }
  }
  res["bound"] = bound;

  json doc = envelope("ode-sim", cfg);
  doc["result"] = res;
  if (tr.underflow) {
    std::string msg = "StepSizeUnderflow: step size underflow";
    if (std::isfinite(tr.failure_time)) msg += " at t = " + fmt(tr.failure_time);
    res["blow_up_time"] = jnum(tr.failure_time);
    doc["result"] = res;
    return finish_error(doc, out, "ode-sim", {kExitUnderflow, "StepSizeUnderflow", msg});
  }
  doc["status"] = "ok";
  doc["exit_code"] = kExitOk;
  if (cfg.wants("json")) write_json(out / "ode-sim.json", doc);
  return {kExitOk, std::string("max drift ") + (any ? fmt(worst) : "n/a") + ", bound ratio " + fmt(ratio)};
}

json fit_json(const SlopeFit& f) {
  return {{"slope", jnum(f.slope)}, {"intercept", jnum(f.intercept)}, {"residual", jnum(f.residual)},
          {"points", f.points}};
}

CommandOutcome do_pde(const ExperimentConfig& cfg, const fs::path& out) {
  const auto& o = cfg.pde.opt;
  const ProfileComparison pc = run_asymptotics(cfg.system.rep, o);

  double ysup = 0;
  for (double y : pc.y_proxy) ysup = std::max(ysup, y);
  const double y_over = ysup / o.eps;
  auto in = [](double v, std::pair<double, double> b) { return v >= b.first && v <= b.second; };
  const bool ok_linf = in(pc.fit_Linf.slope, cfg.pde.band_linf);
  const bool ok_l2 = in(pc.fit_L2.slope, cfg.pde.band_l2);
  const bool ok_y = y_over <= cfg.pde.y_factor;
  const std::string verdict = pc.floor ? "floor" : (ok_linf && ok_l2 && ok_y ? "pass" : "fail");

  if (cfg.wants("csv")) {
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < pc.times.size(); ++k)
      rows.push_back({pc.times[k], pc.error_L2[k], pc.error_Linf[k], pc.y_proxy[k], pc.free_L2[k], pc.free_Linf[k]});
    write_csv(out / "pde-sim.csv", {"t", "error_L2", "error_Linf", "y_proxy", "free_L2", "free_Linf"}, rows);
  }
  if (cfg.wants("svg")) {
    std::vector<Series> ser{{"L-inf error", "#c0392b", pc.times, pc.error_Linf, false},
                            {"L2 error", "#2c3e50", pc.times, pc.error_L2, false},
                            {"free L-inf", "#7f8c8d", pc.times, pc.free_Linf, true}};
    write_text(out / "pde-sim.svg", loglog_svg("profile error, eps = " + fmt(o.eps), "t", "error", ser));
  }

  json res;
  res["grid"] = {{"N", o.grid.N}, {"L", o.grid.L}};
  res["eps"] = o.eps;
  res["t_end"] = o.t_end;
  res["dt"] = o.dt0;
  res["fit_window"] = json::array({pc.fit_window.first, pc.fit_window.second});
  res["steps"] = pc.steps;
  res["samples"] = pc.times.size();
  res["slopes"] = {{"linf", fit_json(pc.fit_Linf)}, {"l2", fit_json(pc.fit_L2)},
                   {"free_linf", fit_json(pc.fit_free_Linf)}};
  res["bands"] = {{"linf", json::array({cfg.pde.band_linf.first, cfg.pde.band_linf.second})},
                  {"l2", json::array({cfg.pde.band_l2.first, cfg.pde.band_l2.second})},
                  {"y_factor", cfg.pde.y_factor}};
  res["y_proxy_sup"] = jnum(ysup);
  res["y_over_eps"] = jnum(y_over);
  res["profile_correction"] = jnum(pc.profile_correction);
  res["checks"] = {{"linf", ok_linf}, {"l2", ok_l2}, {"y_proxy", ok_y}};
  res["verdict"] = verdict;
  json diag = json::object();
  for (const auto& [k, v] : pc.diagnostics) diag[k] = jnum(v);
  res["diagnostics"] = diag;

  json doc = envelope("pde-sim", cfg);
  doc["result"] = res;
  doc["status"] = "ok";
  doc["exit_code"] = kExitOk;
  if (cfg.wants("json")) write_json(out / "pde-sim.json", doc);
  return {kExitOk, "verdict " + verdict + ", slopes " + fmt(pc.fit_Linf.slope) + " / " + fmt(pc.fit_L2.slope)};
}

}  // namespace

int exit_code_for(Errc e) {
  switch (e) {
    case Errc::AssumptionNotSatisfied: return kExitAssumption;
    case Errc::GridUnderresolved: return kExitUnderresolved;
    case Errc::InvalidArgument:
    case Errc::WindowTooShort: return kExitConfig;
    default: return kExitDegenerate;
  }
}

json system_json(const SystemRep& s, const std::string& source) {
  const CoefficientVector c = system_to_coefficients(s);
  json cj = json::array();
  for (double x : c.c) cj.push_back(jnum(x));
  return {{"source", source}, {"A", mat3(s.A)}, {"V", vec(s.V)}, {"coefficients", cj}};
}

json analyze_result(const SystemRep& s, const ExperimentConfig& cfg, bool& borderline) {
  const Classification cls = classify(s, cfg.cone_tol, cfg.cluster_tol);
  json r;
  r["rank"] = cls.rank;
  r["case_label"] = case_name(cls.case_label);
  r["wngc"] = cls.wngc;
  r["assumption1"] = cls.assumption1;
  r["assumption2"] = cls.assumption2;
  r["borderline"] = cls.borderline;
  r["notes"] = cls.notes;
  r["complex_pair"] = cls.eig.complex_pair;
  r["min_gap"] = jnum(cls.eig.min_gap);
  r["tolerances"] = {{"cone", cfg.cone_tol}, {"cluster", cfg.cluster_tol}};

  json ev = json::array();
  for (const auto& e : cls.eig.eigenvalues)
    ev.push_back({{"re", jnum(e.value.real())}, {"im", jnum(e.value.imag())}, {"multiplicity", e.multiplicity}});
  r["eigenvalues"] = ev;
  json sp = json::array();
  for (const auto& e : cls.eig.spaces) {
    json b = json::array(), g = json::array();
    for (const auto& v : e.basis) b.push_back(vec(v));
    for (const auto& v : e.generalized_basis) g.push_back(vec(v));
    sp.push_back({{"lambda", jnum(e.lambda)}, {"multiplicity", e.multiplicity}, {"basis", b}, {"generalized_basis", g}});
  }
  r["eigenspaces"] = sp;
  json lam = json::object(), wit = json::object();
  for (const auto& [k, v] : cls.lambdas) lam[k] = jnum(v);
  for (const auto& [k, v] : cls.witnesses) wit[k] = vec(v);
  r["lambdas"] = lam;
  r["witnesses"] = wit;

  json cq = json::array();
  try {
    for (const auto& q : conserved_quantities(s, cls)) cq.push_back(conserved_json(q));
  } catch (const Error&) {
    // nothing to synthesize without a real eigenpair
  }
  r["conserved"] = cq;

  json bound = nullptr;
  if (cls.assumption1 || cls.assumption2) {
    try {
      const BoundConstant bc = global_bound_constant(s, cls);
      bound = {{"C", jnum(bc.C)}, {"lower", jnum(bc.lower)}, {"upper", jnum(bc.upper)},
               {"degree", jnum(bc.degree)}, {"source", bc.source}};
    } catch (const Error&) {
    }
  }
  r["bound_constant"] = bound;
  borderline = cls.borderline;
  return r;
}

json normalize_result(const SystemRep& s) {
  const NormalizationResult n = normalize(s);
  json r;
  r["form_tag"] = form_name(n.form_tag);
  r["subcase"] = n.subcase;
  json p = json::object();
  for (const auto& [k, v] : n.params) p[k] = jnum(v);
  r["params"] = p;
  r["M_total"] = transform(n.M_total);
  json steps = json::array();
  for (const auto& [name, t] : n.steps) {
    json st = transform(t);
    st["name"] = name;
    steps.push_back(st);
  }
  r["steps"] = steps;
  r["A_standard"] = {{"A", mat3(n.A_standard.A)}, {"V", vec(n.A_standard.V)}};
  r["template_residual"] = jnum(n.template_residual);
  return r;
}

CommandOutcome run_single(const std::string& command, const ExperimentConfig& cfg, const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) return {kExitFailure, "cannot create " + out.string() + ": " + ec.message()};
  try {
    try {
      if (command == "analyze") return do_analyze(cfg, out);
      if (command == "normalize") return do_normalize(cfg, out);
      if (command == "ode-sim") return do_ode(cfg, out);
      if (command == "pde-sim") return do_pde(cfg, out);
      return {kExitConfig, "unknown command " + command};
    } catch (const Error& e) {
      return finish_error(envelope(command, cfg), out, command,
                          {exit_code_for(e.code()), std::string(errc_name(e.code())), e.what()});
    }
  } catch (const std::exception& e) {
    return {kExitFailure, e.what()};
  }
}

int threads_from_env() {
  const char* v = std::getenv("NLSLAB_THREADS");
  if (!v || !*v) return 0;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) return 0;
  return static_cast<int>(std::min(n, 1024L));
}

CommandOutcome run_sweep(const ExperimentConfig& cfg, const fs::path& out, int threads) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) return {kExitFailure, "cannot create " + out.string() + ": " + ec.message()};

  // points in row-major order: the last axis varies fastest
  std::size_t npoints = cfg.sweep.axes.empty() ? 0 : 1;
  for (const auto& ax : cfg.sweep.axes) npoints *= ax.second.size();

  struct Point {
    json params = json::object();
    std::string dir, status;
    json runs = json::array();
  };
  std::vector<Point> pts(npoints);
  for (std::size_t i = 0; i < npoints; ++i) {
    std::size_t rem = i;
    for (std::size_t a = cfg.sweep.axes.size(); a-- > 0;) {
      const auto& ax = cfg.sweep.axes[a];
      pts[i].params[ax.first] = ax.second[rem % ax.second.size()];
      rem /= ax.second.size();
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "point_%04zu", i);
    pts[i].dir = buf;
  }

  auto work = [&](std::size_t i) {
    Point& p = pts[i];
    json doc = cfg.raw;
    doc.erase("sweep");
    doc.erase("output");
    ExperimentConfig pc;
    try {
      for (const auto& ax : cfg.sweep.axes) set_path(doc, ax.first, p.params[ax.first]);
      pc = parse_config(doc);
    } catch (const std::exception& e) {
      p.status = "failed";
      p.runs.push_back({{"command", "config"}, {"exit_code", kExitConfig}, {"message", e.what()}});
      return;
    }
    pc.formats = cfg.formats;
    bool ok = true;
    for (const auto& c : cfg.sweep.commands) {
      const CommandOutcome r = run_single(c, pc, out / p.dir);
      ok = ok && r.exit_code == kExitOk;
      p.runs.push_back({{"command", c}, {"exit_code", r.exit_code}, {"message", r.message}});
    }
    p.status = ok ? "ok" : "failed";
  };

  int nt = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  nt = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(nt), std::max<std::size_t>(npoints, 1)));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < npoints;) work(i);
    });
  for (auto& t : pool) t.join();

  json index = json::array();
  std::size_t failed = 0;
  for (std::size_t i = 0; i < npoints; ++i) {
    failed += pts[i].status == "ok" ? 0 : 1;
    index.push_back({{"index", i}, {"params", pts[i].params}, {"dir", pts[i].dir}, {"status", pts[i].status},
                     {"runs", pts[i].runs}});
  }
  json axes = json::array();
  for (const auto& ax : cfg.sweep.axes) axes.push_back({{"path", ax.first}, {"values", ax.second}});

  json doc = envelope("sweep", cfg);
  doc["status"] = "ok";
  doc["exit_code"] = kExitOk;
  doc["result"] = {{"commands", cfg.sweep.commands}, {"axes", axes}, {"points", index}, {"failed", failed}};
  try {
    write_json(out / "index.json", doc);
  } catch (const std::exception& e) {
    return {kExitFailure, e.what()};
  }
  return {kExitOk, std::to_string(npoints) + " points, " + std::to_string(failed) + " failed"};
}

}  // namespace nlslab::cli
