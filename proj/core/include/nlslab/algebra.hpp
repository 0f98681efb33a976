#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "nlslab/errors.hpp"

namespace nlslab {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat2 = Eigen::Matrix2d;

// Relative band used for every sign decision on derived quadratic quantities.
inline constexpr double kTolRel = 1e-9;

// c_1..c_12 in the order of the monomials
//   F1 = c1|u1|^2u1 + c2|u1|^2u2 + c3 u1^2 conj(u2) + c4 u1|u2|^2 + c5 conj(u1)u2^2 + c6|u2|^2u2
// and c7..c12 likewise for F2.
struct CoefficientVector {
  std::array<double, 12> c{};

  // one-based, matching the usual numbering
  double operator()(int j) const { return c[static_cast<std::size_t>(j - 1)]; }
  double& operator()(int j) { return c[static_cast<std::size_t>(j - 1)]; }
};

struct SystemRep {
  Mat3 A = Mat3::Zero();
  Vec3 V = Vec3::Zero();
};

struct FieldPair {
  cplx phi1{0.0, 0.0};
  cplx phi2{0.0, 0.0};
};

struct QuadraticObservables {
  double rho1 = 0, rho2 = 0, R = 0, I = 0;
};

enum class ConeClass { Plus, Zero, Minus };

struct ConeVector {
  Vec3 a = Vec3::Zero();
  ConeClass cone_class = ConeClass::Zero;
  double tol = kTolRel;  // band the class was decided with
};

struct GL2Transform {
  Mat2 M = Mat2::Identity();
  double detM = 1.0;

  static GL2Transform from(const Mat2& m);
  static GL2Transform scalar(double s);
  GL2Transform then(const GL2Transform& next) const;  // next * this
};

SystemRep coefficients_to_system(const CoefficientVector& c);
CoefficientVector system_to_coefficients(const SystemRep& s);

// F(u) from the monomial coefficients.
FieldPair nonlinearity(const CoefficientVector& c, const FieldPair& u);
// F(u) assembled directly from (A, V); agrees with the coefficient path.
FieldPair nonlinearity(const SystemRep& s, const FieldPair& u);

QuadraticObservables observables(const FieldPair& p);
double quadratic_form(const FieldPair& p, const Vec3& a);

// S(a) = [[a1, a2], [a2, a3]]
Mat2 sym_form(const Vec3& a);
// min / max eigenvalue of S(a)
std::pair<double, double> form_bounds(const Vec3& a);

double cone_discriminant(const Vec3& a);  // a1 a3 - a2^2
ConeVector cone_classify(const Vec3& a, double tol = kTolRel);

enum class ConeQuery { Plus, ZeroNontrivial, Minus };

struct ConeSearch {
  bool hit = false;
  Vec3 witness = Vec3::Zero();  // unit vector in the span realizing the query
  double best = 0.0;            // extreme value of det S(v) over unit v in the span
};

ConeSearch search_subspace(const std::vector<Vec3>& basis, ConeQuery which, double tol = kTolRel);
bool subspace_meets_cone(const std::vector<Vec3>& basis, ConeQuery which, double tol = kTolRel);

Mat3 dmatrix(const GL2Transform& m);
Mat3 dmatrix_inverse(const GL2Transform& m);
SystemRep transform_system(const SystemRep& s, const GL2Transform& m);
FieldPair apply(const GL2Transform& m, const FieldPair& u);

}  // namespace nlslab
