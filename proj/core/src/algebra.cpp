#include "nlslab/algebra.hpp"

#include <cmath>

namespace nlslab {

GL2Transform GL2Transform::from(const Mat2& m) {
  GL2Transform t;
  t.M = m;
  t.detM = m.determinant();
  if (t.detM == 0.0 || !std::isfinite(t.detM)) throw Error(Errc::SingularTransform, "det M = 0");
  return t;
}

GL2Transform GL2Transform::scalar(double s) { return from(s * Mat2::Identity()); }

GL2Transform GL2Transform::then(const GL2Transform& next) const { return from(next.M * M); }

SystemRep coefficients_to_system(const CoefficientVector& c) {
  SystemRep s;
  s.A << c(2) - c(3), -c(1) + c(8) - c(9), -c(7),
         c(5), -c(3) + c(11), -c(9),
         c(6), -c(4) + c(5) + c(12), -c(10) + c(11);
  s.V << c(8) - 2 * c(9), 0.5 * (-c(2) + 2 * c(3) - c(10) + 2 * c(11)), c(4) - 2 * c(5);
  return s;
}

// Expanding Re(conj(u1)u2) u_j = (|u1|^2 u2 + u1^2 conj(u2))/2 resp. (u1|u2|^2 + conj(u1) u2^2)/2
// in the potential form of the nonlinearity gives the closed form below.
CoefficientVector system_to_coefficients(const SystemRep& s) {
  const Mat3& a = s.A;
  const double T = a.trace();
  const double q1 = s.V(0), q2 = s.V(1), q3 = s.V(2);
  CoefficientVector c;
  c(1) = -(a(0, 1) + a(1, 2)) + q1;
  c(2) = 2 * a(0, 0) - T / 2 + q2;
  c(3) = a(0, 0) - T / 2 + q2;
  c(4) = 2 * a(1, 0) + q3;
  c(5) = a(1, 0);
  c(6) = a(2, 0);
  c(7) = -a(0, 2);
  c(8) = -2 * a(1, 2) + q1;
  c(9) = -a(1, 2);
  c(10) = -2 * a(2, 2) + T / 2 + q2;
  c(11) = -a(2, 2) + T / 2 + q2;
  c(12) = a(1, 0) + a(2, 1) + q3;
  return c;
}

FieldPair nonlinearity(const CoefficientVector& c, const FieldPair& u) {
  const cplx u1 = u.phi1, u2 = u.phi2;
  const double n1 = std::norm(u1), n2 = std::norm(u2);
  const cplx m1 = n1 * u1, m2 = n1 * u2, m3 = u1 * u1 * std::conj(u2);
  const cplx m4 = u1 * n2, m5 = std::conj(u1) * u2 * u2, m6 = n2 * u2;
  FieldPair f;
  f.phi1 = c(1) * m1 + c(2) * m2 + c(3) * m3 + c(4) * m4 + c(5) * m5 + c(6) * m6;
  f.phi2 = c(7) * m1 + c(8) * m2 + c(9) * m3 + c(10) * m4 + c(11) * m5 + c(12) * m6;
  return f;
}

FieldPair nonlinearity(const SystemRep& s, const FieldPair& u) {
  const Mat3& a = s.A;
  const cplx u1 = u.phi1, u2 = u.phi2;
  const double n1 = std::norm(u1), n2 = std::norm(u2);
  const double re12 = std::real(std::conj(u1) * u2);
  const double pot = s.V(0) * n1 + 2 * s.V(1) * re12 + s.V(2) * n2;
  const double tr = a.trace();
  const cplx b1 = 2.0 * n1 * u2 + u1 * u1 * std::conj(u2);
  const cplx b2 = 2.0 * u1 * n2 + std::conj(u1) * u2 * u2;
  FieldPair f;
  f.phi1 = -(a(0, 1) + a(1, 2)) * n1 * u1 + a(0, 0) * b1 + a(1, 0) * b2 + a(2, 0) * n2 * u2
           - tr * re12 * u1 + pot * u1;
  f.phi2 = -a(0, 2) * n1 * u1 - a(1, 2) * b1 - a(2, 2) * b2 + (a(1, 0) + a(2, 1)) * n2 * u2
           + tr * re12 * u2 + pot * u2;
  return f;
}

QuadraticObservables observables(const FieldPair& p) {
  const cplx z = std::conj(p.phi1) * p.phi2;
  return {std::norm(p.phi1), std::norm(p.phi2), 2 * z.real(), 2 * z.imag()};
}

double quadratic_form(const FieldPair& p, const Vec3& a) {
  const auto o = observables(p);
  return o.rho1 * a(0) + o.R * a(1) + o.rho2 * a(2);
}

Mat2 sym_form(const Vec3& a) {
  Mat2 s;
  s << a(0), a(1), a(1), a(2);
  return s;
}

std::pair<double, double> form_bounds(const Vec3& a) {
  const double m = 0.5 * (a(0) + a(2));
  const double r = std::hypot(0.5 * (a(0) - a(2)), a(1));
  return {m - r, m + r};
}

double cone_discriminant(const Vec3& a) { return a(0) * a(2) - a(1) * a(1); }

ConeVector cone_classify(const Vec3& a, double tol) {
  if (tol < 0) throw Error(Errc::InvalidArgument, "negative cone tolerance");
  ConeVector v;
  v.a = a;
  v.tol = tol;
  const double d = cone_discriminant(a);
  const double band = tol * a.squaredNorm();
  if (std::abs(d) <= band)
    v.cone_class = ConeClass::Zero;
  else
    v.cone_class = d > 0 ? ConeClass::Plus : ConeClass::Minus;
  return v;
}

namespace {

std::vector<Vec3> orthonormalize(const std::vector<Vec3>& basis) {
  double scale = 0;
  for (const auto& b : basis) scale = std::max(scale, b.norm());
  std::vector<Vec3> out;
  for (const auto& b : basis) {
    Vec3 v = b;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& e : out) v -= e.dot(v) * e;
    if (v.norm() > 1e-10 * scale) out.push_back(v.normalized());
  }
  return out;
}

}  // namespace

// On an orthonormal pair (p, q) the map (s, t) -> det S(s p + t q) is the binary form
// alpha s^2 + beta s t + gamma t^2; its extreme values on the unit circle are the
// eigenvalues of [[alpha, beta/2], [beta/2, gamma]].
ConeSearch search_subspace(const std::vector<Vec3>& basis, ConeQuery which, double tol) {
  if (basis.empty()) throw Error(Errc::EmptyBasis, "subspace basis is empty");
  const auto on = orthonormalize(basis);
  if (on.empty()) throw Error(Errc::EmptyBasis, "subspace basis has no nonzero vector");

  ConeSearch r;
  if (on.size() == 1) {
    const double d = cone_discriminant(on[0]);
    r.witness = on[0];
    r.best = d;
    switch (which) {
      case ConeQuery::Plus: r.hit = d > tol; break;
      case ConeQuery::Minus: r.hit = d < -tol; break;
      case ConeQuery::ZeroNontrivial: r.hit = std::abs(d) <= tol; break;
    }
    return r;
  }
  if (on.size() >= 3) {
    r.hit = true;
    switch (which) {
      case ConeQuery::Plus: r.witness = Vec3(1, 0, 1).normalized(); r.best = 0.5; break;
      case ConeQuery::Minus: r.witness = Vec3(0, 1, 0); r.best = -1; break;
      case ConeQuery::ZeroNontrivial: r.witness = Vec3(1, 0, 0); r.best = 0; break;
    }
    return r;
  }

  const Vec3& p = on[0];
  const Vec3& q = on[1];
  const double alpha = cone_discriminant(p);
  const double gamma = cone_discriminant(q);
  const double beta = p(0) * q(2) + q(0) * p(2) - 2 * p(1) * q(1);
  Mat2 g;
  g << alpha, beta / 2, beta / 2, gamma;
  Eigen::SelfAdjointEigenSolver<Mat2> es(g);
  const double mu_min = es.eigenvalues()(0), mu_max = es.eigenvalues()(1);
  const Eigen::Vector2d e_min = es.eigenvectors().col(0), e_max = es.eigenvectors().col(1);
  auto lift = [&](const Eigen::Vector2d& st) { return Vec3((st(0) * p + st(1) * q).normalized()); };

  switch (which) {
    case ConeQuery::Plus:
      r.best = mu_max;
      r.hit = mu_max > tol;
      r.witness = lift(e_max);
      break;
    case ConeQuery::Minus:
      r.best = mu_min;
      r.hit = mu_min < -tol;
      r.witness = lift(e_min);
      break;
    case ConeQuery::ZeroNontrivial: {
      r.hit = mu_min <= tol && mu_max >= -tol;
      if (mu_min >= 0) {
        r.witness = lift(e_min);
        r.best = mu_min;
      } else if (mu_max <= 0) {
        r.witness = lift(e_max);
        r.best = mu_max;
      } else {
        // mu_min cos^2 + mu_max sin^2 = 0
        const double th = std::atan(std::sqrt(-mu_min / mu_max));
        r.witness = lift(std::cos(th) * e_min + std::sin(th) * e_max);
        r.best = 0;
      }
      break;
    }
  }
  return r;
}

bool subspace_meets_cone(const std::vector<Vec3>& basis, ConeQuery which, double tol) {
  return search_subspace(basis, which, tol).hit;
}

Mat3 dmatrix(const GL2Transform& m) {
  if (m.detM == 0.0) throw Error(Errc::SingularTransform, "det M = 0");
  const double a = m.M(0, 0), b = m.M(0, 1), c = m.M(1, 0), d = m.M(1, 1);
  Mat3 D;
  D << d * d, -2 * c * d, c * c,
       -b * d, a * d + b * c, -a * c,
       b * b, -2 * a * b, a * a;
  return D / m.detM;
}

Mat3 dmatrix_inverse(const GL2Transform& m) {
  if (m.detM == 0.0) throw Error(Errc::SingularTransform, "det M = 0");
  const double a = m.M(0, 0), b = m.M(0, 1), c = m.M(1, 0), d = m.M(1, 1);
  Mat3 D;
  D << a * a, 2 * a * c, c * c,
       a * b, a * d + b * c, c * d,
       b * b, 2 * b * d, d * d;
  return D / m.detM;
}

SystemRep transform_system(const SystemRep& s, const GL2Transform& m) {
  const Mat3 D = dmatrix(m);
  const Mat3 Di = dmatrix_inverse(m);
  SystemRep out;
  out.A = D * s.A * Di / m.detM;
  out.V = D * s.V / m.detM;
  return out;
}

FieldPair apply(const GL2Transform& m, const FieldPair& u) {
  return {m.M(0, 0) * u.phi1 + m.M(0, 1) * u.phi2, m.M(1, 0) * u.phi1 + m.M(1, 1) * u.phi2};
}

}  // namespace nlslab
