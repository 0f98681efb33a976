#pragma once

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "nlslab/classify.hpp"

namespace nlslab {

struct IntegratorStats {
  long steps = 0;
  long rejected_steps = 0;
  long rhs_evals = 0;
  double tolerance = 0;
};

struct OdeTrajectory {
  std::vector<double> times;
  std::vector<FieldPair> states;
  std::vector<std::string> diagnostic_names;
  std::vector<std::vector<double>> diagnostics;  // diagnostics[k][j] at times[k]
  IntegratorStats integrator_stats;
  bool underflow = false;  // step size collapsed; times stop at failure_time
  double failure_time = std::numeric_limits<double>::quiet_NaN();

  // column j of the diagnostics, by name; throws InvalidArgument if absent
  std::vector<double> diagnostic(const std::string& name) const;
};

struct IntegrateOptions {
  int samples = 1024;
  bool diagnostics = true;
  long max_steps = 100'000'000;
};

FieldPair ode_rhs(const SystemRep& s, const FieldPair& p);

// Dormand-Prince 5(4), rtol = atol = tol, uniform samples by dense output.
OdeTrajectory integrate(const SystemRep& s, const FieldPair& p0, std::pair<double, double> t_span,
                        double tol = 1e-10, const IntegrateOptions& opt = {});

// States at the given nondecreasing times (first entry is the start time).
// Returns fewer states than times if the step size underflows.
std::vector<FieldPair> integrate_at(const SystemRep& s, const FieldPair& p0, const std::vector<double>& times,
                                    double tol = 1e-10, IntegratorStats* stats = nullptr);

struct IdentityCheck {
  double lhs = 0, rhs = 0;
};
// lhs: central difference of Q(a) along the flow, rhs: 2 Im(conj(phi1) phi2) Q(A a).
IdentityCheck check_derivative_identity(const SystemRep& s, const FieldPair& p, const Vec3& a, double h = 1e-5);

double global_bound_ratio(const OdeTrajectory& traj);

}  // namespace nlslab
