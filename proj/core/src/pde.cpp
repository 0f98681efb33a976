#include "nlslab/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "nlslab/classify.hpp"
#include "nlslab/ode.hpp"
#include "spectral.hpp"

namespace nlslab {

namespace {

constexpr double kPi = 3.14159265358979323846;

using detail::Fft;

std::size_t sz(int n) { return static_cast<std::size_t>(n); }

// frequency of FFT slot j
double slot_xi(const Grid& g, int j) { return g.dxi() * (j < g.N / 2 ? j : j - g.N); }

void rk4_pointwise(const SystemRep& s, Field& u1, Field& u2, double h) {
  for (std::size_t n = 0; n < u1.size(); ++n) {
    const FieldPair y{u1[n], u2[n]};
    auto add = [](const FieldPair& a, const FieldPair& b, double c) {
      return FieldPair{a.phi1 + c * b.phi1, a.phi2 + c * b.phi2};
    };
    const FieldPair k1 = ode_rhs(s, y);
    const FieldPair k2 = ode_rhs(s, add(y, k1, h / 2));
    const FieldPair k3 = ode_rhs(s, add(y, k2, h / 2));
    const FieldPair k4 = ode_rhs(s, add(y, k3, h));
    u1[n] = y.phi1 + h / 6 * (k1.phi1 + 2.0 * k2.phi1 + 2.0 * k3.phi1 + k4.phi1);
    u2[n] = y.phi2 + h / 6 * (k1.phi2 + 2.0 * k2.phi2 + 2.0 * k3.phi2 + k4.phi2);
  }
}

void free_flow(const Grid& g, Field& u, double tau) {
  const Fft& F = Fft::get(g.N);
  F.forward(u.data());
  const double inv = 1.0 / g.N;
  for (int j = 0; j < g.N; ++j) {
    const double k = slot_xi(g, j);
    u[sz(j)] *= std::polar(inv, -0.5 * k * k * tau);
  }
  F.backward(u.data());
}

double sup_abs(const Field& f) {
  double m = 0;
  for (const auto& z : f) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

void Grid::validate() const {
  if (N < 256 || (N & (N - 1)) != 0) throw Error(Errc::InvalidArgument, "grid N must be a power of two >= 256");
  if (!(L > 0) || !std::isfinite(L)) throw Error(Errc::InvalidArgument, "grid L must be positive");
}

Field to_frequency(const Grid& g, const Field& f) {
  Field buf = f;
  Fft::get(g.N).forward(buf.data());
  Field out(sz(g.N));
  const double c = g.dx() / std::sqrt(2 * kPi);
  for (int i = 0; i < g.N; ++i) {
    const int k = i - g.N / 2;
    const int j = (k + g.N) % g.N;
    out[sz(i)] = ((k & 1) ? -c : c) * buf[sz(j)];
  }
  return out;
}

Field to_space(const Grid& g, const Field& fh) {
  Field buf(sz(g.N));
  for (int i = 0; i < g.N; ++i) {
    const int k = i - g.N / 2;
    buf[sz((k + g.N) % g.N)] = (k & 1) ? -fh[sz(i)] : fh[sz(i)];
  }
  Fft::get(g.N).backward(buf.data());
  const double c = g.dxi() / std::sqrt(2 * kPi);
  for (auto& z : buf) z *= c;
  return buf;
}

double l2_norm_x(const Grid& g, const Field& f) {
  double s = 0;
  for (const auto& z : f) s += std::norm(z);
  return std::sqrt(s * g.dx());
}

double l2_norm_xi(const Grid& g, const Field& fh) {
  double s = 0;
  for (const auto& z : fh) s += std::norm(z);
  return std::sqrt(s * g.dxi());
}

PdeState step(const SystemRep& s, const PdeState& st, double dt, const StepOptions& opt) {
  if (!(dt > 0)) throw Error(Errc::InvalidArgument, "dt must be positive");
  PdeState out = st;
  if (opt.dispersion) {
    free_flow(st.grid, out.u1, dt / 2);
    free_flow(st.grid, out.u2, dt / 2);
  }
  const int m = std::max(1, opt.substeps);
  for (int i = 0; i < m; ++i) rk4_pointwise(s, out.u1, out.u2, dt / m);
  if (opt.dispersion) {
    free_flow(st.grid, out.u1, dt / 2);
    free_flow(st.grid, out.u2, dt / 2);
  }
  out.t = st.t + dt;
  return out;
}

std::pair<Field, Field> extract_w(const PdeState& st) {
  if (st.t == 0) throw Error(Errc::ZeroTime, "extract_w needs t != 0");
  const Grid& g = st.grid;
  Field w1 = to_frequency(g, st.u1), w2 = to_frequency(g, st.u2);
  for (int i = 0; i < g.N; ++i) {
    const double k = g.xi(i);
    const cplx ph = std::polar(1.0, 0.5 * st.t * k * k);
    w1[sz(i)] *= ph;
    w2[sz(i)] *= ph;
  }
  return {w1, w2};
}

cplx free_gaussian(double a, double t, double x) {
  const cplx d(1.0, 2 * a * t);
  return std::exp(-a * x * x / d) / std::sqrt(d);
}

SlopeFit fit_loglog(const std::vector<double>& t, const std::vector<double>& e, std::pair<double, double> window) {
  SlopeFit f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < t.size() && i < e.size(); ++i) {
    if (t[i] < window.first * (1 - 1e-12) || t[i] > window.second * (1 + 1e-12)) continue;
    if (!(e[i] > 0) || !std::isfinite(e[i])) continue;
    const double x = std::log(t[i]), y = std::log(e[i]);
    pts.emplace_back(x, y);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  f.points = static_cast<int>(pts.size());
  if (f.points < 2) {
    f.slope = std::numeric_limits<double>::quiet_NaN();
    return f;
  }
  const double n = f.points;
  const double den = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  double r = 0;
  for (auto [x, y] : pts) r += std::pow(y - f.intercept - f.slope * x, 2);
  f.residual = std::sqrt(r / n);
  return f;
}

ProfileComparison run_asymptotics(const SystemRep& s, const AsymptoticsOptions& opt) {
  const Grid& g = opt.grid;
  g.validate();
  if (!(opt.eps > 0)) throw Error(Errc::InvalidArgument, "eps must be positive");
  if (!(opt.dt0 > 0)) throw Error(Errc::InvalidArgument, "dt0 must be positive");
  if (!(opt.t_end > 1)) throw Error(Errc::InvalidArgument, "t_end must exceed the start time 1");
  const auto [fa, fb] = opt.fit_window;
  if (!(fa >= 1 && fb <= opt.t_end * (1 + 1e-12) && fb > fa))
    throw Error(Errc::InvalidArgument, "fit window must lie inside [1, t_end]");
  if (fb / fa < 10 * (1 - 1e-12)) throw Error(Errc::WindowTooShort, "fit window spans less than one decade");

  const int N = g.N;
  const double xi_cut = 0.9 * g.xi_max();

  // data at t = 1
  Field u1(sz(N)), u2(sz(N));
  auto gauss = [&](const GaussianProfile& p, double x) {
    const double z = (x - p.center) / p.width;
    return cplx(opt.eps * p.amplitude * std::exp(-0.5 * z * z), 0);
  };
  for (int n = 0; n < N; ++n) {
    u1[sz(n)] = gauss(opt.profile1, g.x(n));
    u2[sz(n)] = gauss(opt.profile2, g.x(n));
  }
  {
    // spectral tail: modes beyond the interpolation band, and the box edge
    const Field h1 = to_frequency(g, u1), h2 = to_frequency(g, u2);
    double peak = 0, tail = 0;
    for (int i = 0; i < N; ++i) {
      const double a = std::max(std::abs(h1[sz(i)]), std::abs(h2[sz(i)]));
      peak = std::max(peak, a);
      if (std::abs(g.xi(i)) > xi_cut) tail = std::max(tail, a);
    }
    const double edge = std::max({std::abs(u1.front()), std::abs(u2.front()), std::abs(u1.back()), std::abs(u2.back())});
    const double upeak = std::max(sup_abs(u1), sup_abs(u2));
    if (tail > 1e-10 * peak || edge > 1e-10 * upeak)
      throw Error(Errc::GridUnderresolved, "initial data not resolved: spectral tail " + std::to_string(tail / peak));
  }

  // lens frame: v = U(-t)u on the x grid
  auto back = [&](Field u) {
    free_flow(g, u, -1.0);
    return u;
  };
  Field v1 = back(u1), v2 = back(u2);

  // g = F M(t) v, M(t) = exp(i x^2 / 2t)
  auto lens = [&](const Field& v, double t) {
    Field m(sz(N));
    for (int n = 0; n < N; ++n) {
      const double x = g.x(n);
      m[sz(n)] = v[sz(n)] * std::polar(1.0, x * x / (2 * t));
    }
    return to_frequency(g, m);
  };
  auto unlens = [&](const Field& gh, double t) {
    Field m = to_space(g, gh);
    for (int n = 0; n < N; ++n) {
      const double x = g.x(n);
      m[sz(n)] *= std::polar(1.0, -x * x / (2 * t));
    }
    return m;
  };

  // diagnostic times: geometric, always including 1 and t_end
  std::vector<double> times{1.0};
  {
    const double r = std::pow(10.0, 1.0 / opt.samples_per_decade);
    double t = r;
    while (t < opt.t_end * (1 - 1e-9)) {
      times.push_back(t);
      t *= r;
    }
    times.push_back(opt.t_end);
  }

  // psi = w(1) and the reduced-ODE profile A(log t) per node
  const Field psi1 = to_frequency(g, v1), psi2 = to_frequency(g, v2);
  std::vector<double> svals;
  for (double t : times) svals.push_back(std::log(t));
  std::vector<Field> A1(times.size(), Field(sz(N))), A2(times.size(), Field(sz(N)));
  for (int i = 0; i < N; ++i) {
    const auto traj = integrate_at(s, {psi1[sz(i)], psi2[sz(i)]}, svals, opt.ode_tol);
    if (traj.size() != times.size())
      throw Error(Errc::NumericallyDegenerate, "reduced ODE failed at a frequency node");
    for (std::size_t k = 0; k < times.size(); ++k) {
      A1[k][sz(i)] = traj[k].phi1;
      A2[k][sz(i)] = traj[k].phi2;
    }
  }

  ProfileComparison pc;
  pc.epsilon = opt.eps;
  pc.fit_window = opt.fit_window;

  // classification only for the conservation shadow
  std::optional<ConservedQuantitySpec> coercive;
  try {
    for (const auto& q : conserved_quantities(s))
      if (q.coercive) {
        coercive = q;
        break;
      }
  } catch (const Error&) {
  }

  double psi_peak = 0;
  for (int i = 0; i < N; ++i) psi_peak = std::max(psi_peak, std::norm(psi1[sz(i)]) + std::norm(psi2[sz(i)]));
  // nodes carrying at least 1% of the peak; the core is the main lobe above one half
  std::vector<int> active;
  std::vector<char> core;
  for (int i = 0; i < N; ++i) {
    const double r = std::norm(psi1[sz(i)]) + std::norm(psi2[sz(i)]);
    if (r >= 1e-2 * psi_peak) {
      active.push_back(i);
      core.push_back(r >= 0.5 * psi_peak);
    }
  }
  std::vector<double> wmin(active.size(), std::numeric_limits<double>::infinity()), wmax(active.size(), 0.0);
  std::vector<double> h0(active.size(), 0.0);
  double cq_drift = 0, cq_drift_core = 0;
  double psi_sup = std::max(sup_abs(psi1), sup_abs(psi2));

  auto record = [&](std::size_t k, double t) {
    const Field g1 = lens(v1, t), g2 = lens(v2, t);
    const Field w1 = to_frequency(g, v1), w2 = to_frequency(g, v2);
    double e_inf = 0, e2 = 0, f_inf = 0, corr = 0;
    for (int i = 0; i < N; ++i) {
      const double d = std::sqrt(std::norm(g1[sz(i)] - A1[k][sz(i)]) + std::norm(g2[sz(i)] - A2[k][sz(i)]));
      const double df = std::sqrt(std::norm(g1[sz(i)] - psi1[sz(i)]) + std::norm(g2[sz(i)] - psi2[sz(i)]));
      e2 += d * d;
      if (std::abs(g.xi(i)) <= xi_cut) {
        e_inf = std::max(e_inf, d);
        f_inf = std::max(f_inf, df);
      }
      corr = std::max({corr, std::abs(A1[k][sz(i)] - psi1[sz(i)]), std::abs(A2[k][sz(i)] - psi2[sz(i)])});
    }
    const double rt = 1 / std::sqrt(t);
    pc.times.push_back(t);
    pc.error_Linf.push_back(rt * e_inf);
    pc.error_L2.push_back(std::sqrt(e2 * g.dxi()));
    pc.free_Linf.push_back(rt * f_inf);
    double f2 = 0;
    for (int i = 0; i < N; ++i) f2 += std::norm(g1[sz(i)] - psi1[sz(i)]) + std::norm(g2[sz(i)] - psi2[sz(i)]);
    pc.free_L2.push_back(std::sqrt(f2 * g.dxi()));
    // |u_j(t, x)| = t^{-1/2} |g_j(x/t)|
    pc.y_proxy.push_back(std::max(sup_abs(g1), sup_abs(g2)));
    pc.w_sup.push_back(std::max(sup_abs(w1), sup_abs(w2)));
    pc.profile_correction = std::max(pc.profile_correction, psi_sup > 0 ? corr / psi_sup : 0.0);
    for (std::size_t a = 0; a < active.size(); ++a) {
      const auto i = sz(active[a]);
      const double r = std::norm(w1[i]) + std::norm(w2[i]);
      wmin[a] = std::min(wmin[a], r);
      wmax[a] = std::max(wmax[a], r);
      if (coercive) {
        try {
          // the root of matching degree scales like |w|^2
          const double h = std::pow(evaluate_conserved(*coercive, {w1[i], w2[i]}), 1 / coercive->degree);
          if (k == 0) {
            h0[a] = h;
          } else if (h0[a] > 0) {
            const double d = std::abs(h - h0[a]) / h0[a];
            cq_drift = std::max(cq_drift, d);
            if (core[a]) cq_drift_core = std::max(cq_drift_core, d);
          }
        } catch (const Error&) {
        }
      }
    }
    if (opt.keep_snapshots) pc.w_snapshots.emplace_back(w1, w2);
  };

  record(0, 1.0);
  double t = 1.0;
  for (std::size_t k = 1; k < times.size(); ++k) {
    while (t < times[k] * (1 - 1e-14)) {
      const double t2 = std::min(t + opt.dt0, times[k]);
      const double tm = 0.5 * (t + t2);
      Field g1 = lens(v1, tm), g2 = lens(v2, tm);
      rk4_pointwise(s, g1, g2, std::log(t2 / t));
      v1 = unlens(g1, tm);
      v2 = unlens(g2, tm);
      t = t2;
      ++pc.steps;
    }
    t = times[k];
    record(k, t);
  }

  pc.fit_Linf = fit_loglog(pc.times, pc.error_Linf, opt.fit_window);
  pc.fit_L2 = fit_loglog(pc.times, pc.error_L2, opt.fit_window);
  pc.fit_free_Linf = fit_loglog(pc.times, pc.free_Linf, opt.fit_window);
  pc.floor = pc.profile_correction <= 1e-12;

  double ratio = 1;
  for (std::size_t a = 0; a < active.size(); ++a)
    if (wmin[a] > 0) ratio = std::max(ratio, wmax[a] / wmin[a]);
  pc.diagnostics["wsq_ratio_max"] = ratio;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  pc.diagnostics["coercive_drift_max"] = coercive ? cq_drift : nan;
  pc.diagnostics["coercive_drift_core"] = coercive ? cq_drift_core : nan;
  pc.diagnostics["active_nodes"] = static_cast<double>(active.size());
  pc.diagnostics = boundedness_diagnostics(pc);
  return pc;
}

std::map<std::string, double> boundedness_diagnostics(const ProfileComparison& run) {
  auto out = run.diagnostics;
  double ws = 0, ys = 0;
  for (double v : run.w_sup) ws = std::max(ws, v);
  for (double v : run.y_proxy) ys = std::max(ys, v);
  out["w_sup"] = ws;
  out["y_proxy_sup"] = ys;
  out["y_proxy_over_eps"] = run.epsilon > 0 ? ys / run.epsilon : 0.0;
  return out;
}

}  // namespace nlslab
