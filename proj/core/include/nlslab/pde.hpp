#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nlslab/algebra.hpp"

namespace nlslab {

struct Grid {
  int N = 4096;
  double L = 40 * 3.14159265358979323846;

  double dx() const { return 2 * L / N; }
  double dxi() const { return 3.14159265358979323846 / L; }
  double x(int n) const { return -L + n * dx(); }
  // ascending frequency order, index k + N/2 for k in [-N/2, N/2)
  double xi(int idx) const { return dxi() * (idx - N / 2); }
  double xi_max() const { return dxi() * (N / 2); }
  void validate() const;  // InvalidArgument unless N is a power of two >= 256 and L > 0
};

using Field = std::vector<cplx>;

struct PdeState {
  Grid grid;
  double t = 1.0;
  Field u1, u2;
};

// Unitary Fourier transform on the grid: x-samples to ascending xi-samples and back.
Field to_frequency(const Grid& g, const Field& f);
Field to_space(const Grid& g, const Field& fh);
double l2_norm_x(const Grid& g, const Field& f);
double l2_norm_xi(const Grid& g, const Field& fh);

struct StepOptions {
  bool dispersion = true;  // false: only the pointwise nonlinear flow
  int substeps = 1;        // RK4 substeps of the nonlinear part
};

// Strang splitting: half free step, pointwise nonlinear RK4, half free step.
PdeState step(const SystemRep& s, const PdeState& st, double dt, const StepOptions& opt = {});

// w_j = e^{i t xi^2 / 2} \hat u_j, ascending frequency order
std::pair<Field, Field> extract_w(const PdeState& st);

// Closed-form free evolution of u0 = exp(-a x^2) on the line
cplx free_gaussian(double a, double t, double x);

struct GaussianProfile {
  double amplitude = 1.0;  // multiplied by eps
  double center = 0.0;
  double width = 1.0;      // exp(-(x - center)^2 / (2 width^2))
};

struct AsymptoticsOptions {
  double eps = 0.1;
  Grid grid{};
  double t_end = 1000;
  double dt0 = 0.05;
  std::pair<double, double> fit_window{1.0, 1000.0};
  int samples_per_decade = 20;
  double ode_tol = 1e-10;
  GaussianProfile profile1{1.0, 0.0, 1.0};
  GaussianProfile profile2{0.8, 1.0, 1.0};
  bool keep_snapshots = false;
};

struct SlopeFit {
  double slope = 0, intercept = 0, residual = 0;  // residual: rms in log space
  int points = 0;
};

struct ProfileComparison {
  std::vector<double> times;
  std::vector<double> error_L2, error_Linf;  // against the modified profile A(log t)
  std::vector<double> free_L2, free_Linf;    // against the unmodified psi
  std::vector<double> y_proxy;               // max_j t^{1/2} |u_j(t)|_inf
  std::vector<double> w_sup;                 // max_j |w_j(t)|_inf
  SlopeFit fit_Linf, fit_L2, fit_free_Linf;
  std::pair<double, double> fit_window{1, 1000};
  double epsilon = 0;
  double profile_correction = 0;  // max_t |A(log t) - psi|_inf / |psi|_inf
  bool floor = false;             // the modified profile never departs from psi
  long steps = 0;
  std::map<std::string, double> diagnostics;  // boundedness_diagnostics
  std::vector<std::pair<Field, Field>> w_snapshots;
};

ProfileComparison run_asymptotics(const SystemRep& s, const AsymptoticsOptions& opt);

// sup_t |w_j|_inf, sup_t t^{1/2}|u_j|_inf, per-frequency sup/inf of |w1|^2 + |w2|^2,
// and the drift of a coercive conserved quantity evaluated on w.
std::map<std::string, double> boundedness_diagnostics(const ProfileComparison& run);

SlopeFit fit_loglog(const std::vector<double>& t, const std::vector<double>& e, std::pair<double, double> window);

}  // namespace nlslab
