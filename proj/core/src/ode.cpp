#include "nlslab/ode.hpp"

#include <algorithm>
#include <cmath>

namespace nlslab {

namespace {

using Y = Eigen::Matrix<double, 4, 1>;

Y pack(const FieldPair& p) { return Y(p.phi1.real(), p.phi1.imag(), p.phi2.real(), p.phi2.imag()); }
FieldPair unpack(const Y& y) { return {cplx(y(0), y(1)), cplx(y(2), y(3))}; }

// Dormand-Prince tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense output (Hairer's contd5)
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

struct Dopri {
  std::function<Y(const Y&)> f;
  double tol;
  IntegratorStats stats;

  struct Step {
    double t0, h;
    Y r1, r2, r3, r4, r5;
    Y eval(double t) const {
      const double th = (t - t0) / h, th1 = 1 - th;
      return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
    }
  };

  double initial_h(const Y& y0, const Y& f0, double span) const {
    auto sc = [&](const Y& y) { return (tol + tol * y.cwiseAbs().array()).matrix(); };
    const Y s = sc(y0);
    const double dn0 = (y0.array() / s.array()).matrix().norm() / 2;
    const double dn1 = (f0.array() / s.array()).matrix().norm() / 2;
    double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
    h0 = std::min(h0, span);
    const Y y1 = y0 + h0 * f0;
    const Y f1 = f(y1);
    const double dn2 = (((f1 - f0).array() / s.array()).matrix().norm() / 2) / h0;
    const double m = std::max(dn1, dn2);
    const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 1.0 / 5);
    return std::min({100 * h0, h1, span});
  }

  // Integrate y from t0 to t1, calling sink(step) after every accepted step.
  // Returns false on step-size underflow, with t0 set to the failure time.
  template <class Sink>
  bool run(double& t, Y& y, double t1, long max_steps, Sink&& sink) {
    if (t1 <= t) return true;
    Y k1 = f(y);
    ++stats.rhs_evals;
    double h = initial_h(y, k1, t1 - t);
    double err_prev = 1e-4;
    while (t < t1) {
      if (stats.steps + stats.rejected_steps >= max_steps) return false;
      if (h < 1e-14 * std::max(1.0, std::abs(t))) return false;
      const bool last = t + h >= t1;
      if (last) h = t1 - t;
      const Y k2 = f(y + h * a21 * k1);
      const Y k3 = f(y + h * (a31 * k1 + a32 * k2));
      const Y k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const Y k5 = f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Y k6 = f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Y yn = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      const Y k7 = f(yn);
      stats.rhs_evals += 6;
      const Y ev = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double err = 0;
      for (int i = 0; i < 4; ++i) {
        const double sc = tol + tol * std::max(std::abs(y(i)), std::abs(yn(i)));
        err = std::max(err, std::abs(ev(i)) / sc);
      }
      if (!std::isfinite(err)) {
        ++stats.rejected_steps;
        h *= 0.2;
        continue;
      }
      if (err <= 1.0) {
        Step st;
        st.t0 = t;
        st.h = h;
        st.r1 = y;
        st.r2 = yn - y;
        st.r3 = h * k1 - st.r2;
        st.r4 = st.r2 - h * k7 - st.r3;
        st.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        t = last ? t1 : t + h;
        y = yn;
        k1 = k7;
        ++stats.steps;
        sink(st);
        // PI controller
        const double e = std::max(err, 1e-10);
        double fac = 0.9 * std::pow(e, -0.7 / 5) * std::pow(err_prev, 0.4 / 5);
        fac = std::clamp(fac, 0.2, 10.0);
        err_prev = e;
        h *= fac;
      } else {
        ++stats.rejected_steps;
        h *= std::max(0.2, 0.9 * std::pow(err, -1.0 / 5));
      }
    }
    return true;
  }
};

std::function<Y(const Y&)> field(const SystemRep& s) {
  return [&s](const Y& y) { return pack(ode_rhs(s, unpack(y))); };
}

}  // namespace

FieldPair ode_rhs(const SystemRep& s, const FieldPair& p) {
  const FieldPair F = nonlinearity(s, p);
  const cplx mi(0, -1);
  return {mi * F.phi1, mi * F.phi2};
}

std::vector<double> OdeTrajectory::diagnostic(const std::string& name) const {
  auto it = std::find(diagnostic_names.begin(), diagnostic_names.end(), name);
  if (it == diagnostic_names.end()) throw Error(Errc::InvalidArgument, "no diagnostic named " + name);
  const auto j = static_cast<std::size_t>(it - diagnostic_names.begin());
  std::vector<double> out;
  out.reserve(diagnostics.size());
  for (const auto& row : diagnostics) out.push_back(row[j]);
  return out;
}

std::vector<FieldPair> integrate_at(const SystemRep& s, const FieldPair& p0, const std::vector<double>& times,
                                    double tol, IntegratorStats* stats) {
  if (!(tol > 0)) throw Error(Errc::InvalidArgument, "tol must be positive");
  std::vector<FieldPair> out;
  if (times.empty()) return out;
  out.reserve(times.size());
  Dopri D{field(s), tol, {}};
  D.stats.tolerance = tol;
  double t = times.front();
  Y y = pack(p0);
  std::size_t next = 0;
  while (next < times.size() && times[next] <= t) {
    out.push_back(p0);
    ++next;
  }
  const bool ok = D.run(t, y, times.back(), 100'000'000, [&](const Dopri::Step& st) {
    const double tend = st.t0 + st.h;
    while (next < times.size() && times[next] <= tend) {
      out.push_back(unpack(times[next] == tend ? st.r1 + st.r2 : st.eval(times[next])));
      ++next;
    }
  });
  (void)ok;
  if (stats) *stats = D.stats;
  return out;
}

OdeTrajectory integrate(const SystemRep& s, const FieldPair& p0, std::pair<double, double> t_span, double tol,
                        const IntegrateOptions& opt) {
  if (!(tol > 0)) throw Error(Errc::InvalidArgument, "tol must be positive");
  const auto [ta, tb] = t_span;
  if (!std::isfinite(ta) || !std::isfinite(tb) || !(tb > ta)) throw Error(Errc::InvalidArgument, "bad time span");
  if (opt.samples < 2) throw Error(Errc::InvalidArgument, "need at least two samples");

  OdeTrajectory tr;
  std::vector<double> grid(static_cast<std::size_t>(opt.samples));
  for (int k = 0; k < opt.samples; ++k)
    grid[static_cast<std::size_t>(k)] = ta + (tb - ta) * k / (opt.samples - 1);
  grid.back() = tb;

  Dopri D{field(s), tol, {}};
  D.stats.tolerance = tol;
  double t = ta;
  Y y = pack(p0);
  tr.times.push_back(ta);
  tr.states.push_back(p0);
  std::size_t next = 1;
  const bool ok = D.run(t, y, tb, opt.max_steps, [&](const Dopri::Step& st) {
    const double tend = st.t0 + st.h;
    while (next < grid.size() && grid[next] <= tend) {
      tr.times.push_back(grid[next]);
      tr.states.push_back(unpack(grid[next] == tend ? st.r1 + st.r2 : st.eval(grid[next])));
      ++next;
    }
  });
  tr.integrator_stats = D.stats;
  if (!ok) {
    tr.underflow = true;
    tr.failure_time = t;
  }

  if (opt.diagnostics) {
    std::vector<ConservedQuantitySpec> specs;
    try {
      specs = conserved_quantities(s);
    } catch (const Error&) {
      // no real eigenpair: only the norm is monitored
    }
    tr.diagnostic_names.push_back("norm2");
    for (const auto& q : specs) tr.diagnostic_names.push_back(q.name);
    tr.diagnostics.reserve(tr.states.size());
    for (const auto& p : tr.states) {
      std::vector<double> row;
      row.push_back(std::norm(p.phi1) + std::norm(p.phi2));
      for (const auto& q : specs) {
        double v;
        try {
          v = evaluate_conserved(q, p);
        } catch (const Error&) {
          v = std::numeric_limits<double>::quiet_NaN();
        }
        row.push_back(v);
      }
      tr.diagnostics.push_back(std::move(row));
    }
  }
  return tr;
}

IdentityCheck check_derivative_identity(const SystemRep& s, const FieldPair& p, const Vec3& a, double h) {
  // one Dormand-Prince step each way; local error O(h^6) is far below the difference quotient's O(h^2)
  auto f = field(s);
  auto step = [&](double hh) {
    const Y y = pack(p);
    const Y k1 = f(y);
    const Y k2 = f(y + hh * a21 * k1);
    const Y k3 = f(y + hh * (a31 * k1 + a32 * k2));
    const Y k4 = f(y + hh * (a41 * k1 + a42 * k2 + a43 * k3));
    const Y k5 = f(y + hh * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Y k6 = f(y + hh * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    return unpack(y + hh * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6));
  };
  IdentityCheck r;
  r.lhs = (quadratic_form(step(h), a) - quadratic_form(step(-h), a)) / (2 * h);
  r.rhs = observables(p).I * quadratic_form(p, s.A * a);
  return r;
}

double global_bound_ratio(const OdeTrajectory& traj) {
  if (traj.states.empty()) throw Error(Errc::ZeroTrajectory, "empty trajectory");
  double mx = 0, mn = std::numeric_limits<double>::infinity();
  for (const auto& p : traj.states) {
    const double n = std::norm(p.phi1) + std::norm(p.phi2);
    mx = std::max(mx, n);
    mn = std::min(mn, n);
  }
  if (mn == 0) throw Error(Errc::ZeroTrajectory, "trajectory touches zero");
  return mx / mn;
}

}  // namespace nlslab
