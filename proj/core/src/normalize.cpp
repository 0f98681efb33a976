#include "nlslab/normalize.hpp"

#include <cmath>

namespace nlslab {

namespace {

// Running composition with eigenvectors carried along by D(M) and eigenvalues by 1/det.
struct Pipe {
  SystemRep input;
  NormalizationResult res;
  std::vector<Vec3> vecs;
  std::vector<double> lams;

  void apply(const std::string& name, const Mat2& m) {
    const auto T = GL2Transform::from(m);
    const Mat3 D = dmatrix(T);
    for (auto& v : vecs) v = D * v;
    for (auto& l : lams) l /= T.detM;
    res.steps.emplace_back(name, T);
    res.M_total = res.M_total.then(T);
  }

  void finish(FormTag tag, Params p) {
    res.form_tag = tag;
    res.params = std::move(p);
    res.A_standard = transform_system(input, res.M_total);
    const Mat3 T = template_matrix(tag, res.params);
    const double n = res.A_standard.A.norm();
    res.template_residual = n > 0 ? (res.A_standard.A - T).norm() / n : 0.0;
    const std::string why = template_violation(tag, res.params, 1e-12);
    if (!why.empty())
      throw Error(Errc::NumericallyDegenerate, form_name(tag) + " constraint failed: " + why);
  }
};

const Mat2 kFlip = (Mat2() << 1, 0, 0, -1).finished();
const Mat2 kSwap = (Mat2() << 0, 1, -1, 0).finished();

Vec3 unit(const Vec3& v) { return v / v.norm(); }

// p in P+ with p1 > 0 goes to sqrt(det) (1,0,1)
Mat2 square_completion(Vec3 p) {
  if (p(0) < 0) p = -p;
  const double disc = cone_discriminant(p);
  if (!(p(0) > 1e-12 * p.norm()) || !(disc > 0))
    throw Error(Errc::DegenerateWitness, "no P+ eigenvector with nonzero leading entry");
  const double r = std::sqrt(p(0));
  return (Mat2() << r, p(1) / r, 0, std::sqrt(disc / p(0))).finished();
}

// rotation killing the middle entry of q; theta = 0 when q2 = 0.
// The middle entry of D(R)q is (q1 - q3)/2 sin 2t + q2 cos 2t.
Mat2 rotation_for(const Vec3& q) {
  const double th = q(1) == 0.0 ? 0.0 : 0.5 * std::atan2(-2 * q(1), q(0) - q(2));
  const double c = std::cos(th), s = std::sin(th);
  return (Mat2() << c, -s, s, c).finished();
}

// (eta2, 1, eta3) representative; the middle entry must be clearly nonzero
std::pair<double, double> middle_normalized(const Vec3& r) {
  if (std::abs(r(1)) < 1e-10 * r.norm())
    throw Error(Errc::NumericallyDegenerate, "eigenvector has vanishing middle entry");
  return {r(0) / r(1), r(2) / r(1)};
}

// Boundary-cone vector v ∝ (a^2, ab, b^2): returns (a, b) scaled to a^2 + b^2 = 2,
// a >= 0 (b > 0 when a vanishes). Read off the dominant eigenpair of the 2x2 form,
// which stays accurate when v sits next to (0,0,1) where a half-angle formula
// would cancel.
Eigen::Vector2d root_of(Vec3 v) {
  if (v(0) + v(2) < 0) v = -v;
  Eigen::SelfAdjointEigenSolver<Mat2> es(sym_form(v));
  Eigen::Vector2d r = es.eigenvectors().col(1) * std::sqrt(2.0);
  if (r(0) < 0 || (r(0) == 0 && r(1) < 0)) r = -r;
  return r;
}

Vec3 pick_plus(const EigenSpace& sp) {
  if (sp.basis.size() == 1) return sp.basis.front();
  // prefer (1,0,1) when it already lies in the space: keeps standard forms fixed
  Eigen::Matrix<double, 3, Eigen::Dynamic> B(3, static_cast<Eigen::Index>(sp.basis.size()));
  for (std::size_t i = 0; i < sp.basis.size(); ++i) B.col(static_cast<Eigen::Index>(i)) = sp.basis[i];
  const Vec3 e = Vec3(1, 0, 1) / std::sqrt(2.0);
  const Vec3 proj = B * (B.transpose() * e);
  if ((proj - e).norm() < 1e-10) return e;
  const auto r = search_subspace(sp.basis, ConeQuery::Plus);
  if (!r.hit) throw Error(Errc::DegenerateWitness, "eigenspace does not meet P+");
  return r.witness;
}

const EigenSpace& space_of(const EigenStructure& eig, double lambda) {
  const EigenSpace* sp = eig.space(lambda, 1e-12 * std::max(1.0, eig.norm));
  if (!sp) throw Error(Errc::NumericallyDegenerate, "eigenvalue lost between classify and normalize");
  return *sp;
}

NormalizationResult case1(const SystemRep& s, const Classification& cls) {
  const auto& eig = cls.eig;
  const double la = cls.lambdas.at("lambda1"), lb = cls.lambdas.at("lambda2");
  const EigenSpace* third = nullptr;
  for (const auto& sp : eig.spaces)
    if (sp.lambda != la && sp.lambda != lb) third = &sp;
  if (!third) throw Error(Errc::NumericallyDegenerate, "third eigenvalue missing");

  Vec3 va = unit(pick_plus(space_of(eig, la))), vb = unit(pick_plus(space_of(eig, lb)));
  const double l0 = third->lambda;
  Pipe P{s, {}, {}, {}};

  bool flip = false;
  double l1, l2;
  Vec3 v1, v2;
  if (l0 != 0.0) {
    flip = l0 < 0;
    const double sa = flip ? -la : la, sb = flip ? -lb : lb;
    if (sa > sb) { l1 = la; l2 = lb; v1 = va; v2 = vb; }
    else { l1 = lb; l2 = la; v1 = vb; v2 = va; }
  } else {
    // the larger magnitude becomes the negative lambda2; a tie keeps the negative one
    const bool a_big = std::abs(la) > std::abs(lb) || (std::abs(la) == std::abs(lb) && la < 0);
    const double big = a_big ? la : lb;
    flip = big > 0;
    l2 = big;
    l1 = a_big ? lb : la;
    v2 = a_big ? va : vb;
    v1 = a_big ? vb : va;
  }
  P.vecs = {v1, v2, third->basis.front()};
  P.lams = {l1, l2, l0};
  if (flip) P.apply("flip", kFlip);
  P.apply("square_completion", square_completion(P.vecs[0]));

  const bool sub_a = l0 != 0.0;
  const double target = sub_a ? P.lams[2] : -P.lams[1];
  if (!(target > 0)) throw Error(Errc::NumericallyDegenerate, "rescale target has the wrong sign");
  P.apply("rescale", Mat2::Identity() * std::sqrt(target));

  P.apply("rotation", rotation_for(P.vecs[1]));
  double k = P.vecs[1](2) / P.vecs[1](0);
  if (k > 1) {
    P.apply("swap", kSwap);
    k = P.vecs[1](2) / P.vecs[1](0);
  }
  if (!(k > 0 && k < 1)) throw Error(Errc::NumericallyDegenerate, "second eigenvector ratio outside (0,1)");
  const double eta1 = k / (1 - k);
  const auto [e2, e3] = middle_normalized(P.vecs[2]);

  if (sub_a) {
    P.res.subcase = "1-(a)";
    P.finish(FormTag::A11, {{"lambda1", P.lams[0]}, {"lambda2", P.lams[1]}, {"eta1", eta1}, {"eta2", e2}, {"eta3", e3}});
  } else {
    P.res.subcase = "1-(b)";
    P.finish(FormTag::A13, {{"lambda1", P.lams[0]}, {"eta1", eta1}, {"eta2", e2}, {"eta3", e3}});
  }
  return P.res;
}

NormalizationResult case2(const SystemRep& s, const Classification& cls) {
  const auto& eig = cls.eig;
  const EigenSpace* dbl = nullptr;
  const EigenSpace* sgl = nullptr;
  for (const auto& sp : eig.spaces) (sp.multiplicity == 2 ? dbl : sgl) = &sp;
  if (!dbl || !sgl) throw Error(Errc::NumericallyDegenerate, "expected one double and one simple eigenvalue");

  Pipe P{s, {}, {}, {}};
  P.vecs = {unit(pick_plus(*dbl)), unit(pick_plus(*sgl))};
  P.lams = {dbl->lambda, sgl->lambda};
  if (dbl->lambda < 0) P.apply("flip", kFlip);
  P.apply("square_completion", square_completion(P.vecs[0]));
  P.apply("rescale", Mat2::Identity() * std::sqrt(P.lams[0]));
  P.apply("rotation", rotation_for(P.vecs[1]));
  double k = P.vecs[1](2) / P.vecs[1](0);
  if (k > 1) {
    P.apply("swap", kSwap);
    k = P.vecs[1](2) / P.vecs[1](0);
  }
  if (!(k > 0 && k < 1)) throw Error(Errc::NumericallyDegenerate, "second eigenvector ratio outside (0,1)");
  const double eta1 = k / (1 - k);
  const double lam = P.lams[1];

  // The template only sees eta2 - eta3; read it and eta4 off the middle column.
  const SystemRep st = transform_system(s, P.res.M_total);
  const double d = (st.A(0, 1) - st.A(2, 1)) / (1 - lam);
  double eta4 = st.A(2, 1) - eta1 * d * (1 - lam);
  const bool diagonalizable = dbl->basis.size() == 2;
  if (diagonalizable) eta4 = 0.0;
  P.res.subcase = diagonalizable ? "2-(a)" : "2-(b)";
  P.finish(FormTag::A12, {{"lambda", lam}, {"eta1", eta1}, {"eta2", d / 2}, {"eta3", -d / 2}, {"eta4", eta4}});
  return P.res;
}

}  // namespace

NormalizationResult normalize_assumption1(const SystemRep& s) {
  const auto cls = classify(s);
  if (!cls.assumption1) throw Error(Errc::AssumptionNotSatisfied, "Assumption 1 does not hold");
  if (cls.eig.spaces.size() == 3) return case1(s, cls);
  if (cls.eig.spaces.size() == 2) return case2(s, cls);
  throw Error(Errc::NumericallyDegenerate, "unexpected eigenvalue pattern");
}

NormalizationResult normalize_assumption2(const SystemRep& s) {
  const auto cls = classify(s);
  if (!cls.assumption2) throw Error(Errc::AssumptionNotSatisfied, "Assumption 2 does not hold");
  const auto& eig = cls.eig;
  const double l1 = cls.lambdas.at("lambda1"), l2 = cls.lambdas.at("lambda2"), l3 = cls.lambdas.at("lambda3");

  Pipe P{s, {}, {}, {}};
  P.vecs = {unit(space_of(eig, l1).basis.front()), unit(space_of(eig, l2).basis.front()),
            unit(space_of(eig, l3).basis.front())};
  P.lams = {l1, l2, l3};
  if (l3 > 0) P.apply("flip", kFlip);

  const bool z1 = cone_classify(P.vecs[0]).cone_class == ConeClass::Zero;
  const bool z2 = cone_classify(P.vecs[1]).cone_class == ConeClass::Zero;

  if (z1 && z2) {
    const Eigen::Vector2d r1 = root_of(P.vecs[0]), r2 = root_of(P.vecs[1]);
    Mat2 m;
    m << r1(0), r1(1), r2(0), r2(1);
    if (std::abs(m.determinant()) < 1e-8) throw Error(Errc::NumericallyDegenerate, "boundary eigenvectors coincide");
    if (m.determinant() < 0) m.row(0) *= -1;
    P.apply("boundary_pair", m);
    auto [e2, e3] = middle_normalized(P.vecs[2]);
    if (!(e2 * e3 > 0)) throw Error(Errc::NumericallyDegenerate, "lambda3 eigenvector left P+");
    const double r = std::pow(e2 / e3, 0.25), sc = std::sqrt(std::abs(P.lams[2]));
    P.apply("diagonal_rescale", (Mat2() << r * sc, 0, 0, sc / r).finished());
    const double eta = (e2 > 0 ? 1.0 : -1.0) * std::sqrt(e2 * e3);
    P.res.subcase = "(a)";
    P.finish(FormTag::A21, {{"lambda1", P.lams[0]}, {"lambda2", P.lams[1]}, {"eta", eta}});
    return P.res;
  }

  if (z1 != z2) {
    // the boundary eigenvector goes to (1,0,0), the other one to (1,0,-1)
    const int iz = z1 ? 0 : 1, im = z1 ? 1 : 0;
    const Eigen::Vector2d r = root_of(P.vecs[static_cast<std::size_t>(iz)]);
    Mat2 m;
    if (r(0) >= 1e-3) {
      m << r(0), r(1), 0, 1 / r(0);
    } else {
      m << r(0), r(1), -r(1) / 2, r(0) / 2;  // det (a^2 + b^2)/2 = 1
    }
    P.apply("boundary_completion", m);
    const Vec3 w = P.vecs[static_cast<std::size_t>(im)];
    if (std::abs(w(2)) < 1e-10 * w.norm())
      throw Error(Errc::NumericallyDegenerate, "third entry of the P- eigenvector vanishes");
    const double a = w(0) / w(2), b = w(1) / w(2);
    if (!(b * b - a > 0)) throw Error(Errc::NumericallyDegenerate, "P- eigenvector left P-");
    P.apply("shear", (Mat2() << std::sqrt(b * b - a), 0, b, 1).finished());
    P.apply("rescale", Mat2::Identity() * std::sqrt(std::abs(P.lams[2])));
    const auto [e2, e3] = middle_normalized(P.vecs[2]);
    P.res.subcase = z2 ? "(b)" : "(c)";
    P.finish(FormTag::A22, {{"lambda1", P.lams[static_cast<std::size_t>(im)]},
                            {"lambda2", P.lams[static_cast<std::size_t>(iz)]},
                            {"eta1", 0.0}, {"eta2", e2}, {"eta3", e3}});
    return P.res;
  }

  // (d): both eigenlines strictly inside P-
  {
    const Vec3 p = P.vecs[0];
    const double nrm = p.norm();
    const double g = p(1) * p(1) - p(0) * p(2);
    Mat2 m;
    if (std::abs(p(0)) > 1e-8 * nrm) {
      const double sg = p(0) > 0 ? 1.0 : -1.0;
      m << sg * p(0), sg * p(1), 0, std::sqrt(g);
    } else if (std::abs(p(2)) > 1e-8 * nrm) {
      const double sg = p(1) * p(2) > 0 ? 1.0 : -1.0;
      m << sg * p(1), 0, p(1), p(2);
    } else {
      m << 1, 1, -1, 1;
    }
    P.apply("hyperbolic_completion", m);
    const Vec3 t = P.vecs[0];
    if (std::abs(t(1)) > 1e-8 * t.norm() || std::abs(t(0) + t(2)) > 1e-8 * t.norm())
      throw Error(Errc::NumericallyDegenerate, "completion did not reach (1,0,-1)");
  }
  {
    const Vec3 q = P.vecs[1];
    const double sum = q(0) + q(2);
    if (std::abs(sum) - 2 * std::abs(q(1)) < 1e-10 * q.norm())
      throw Error(Errc::NumericallyDegenerate, "2|q2| < |q1 + q3| fails within tolerance");
    const double tau = 0.5 * std::atanh(2 * q(1) / sum);
    P.apply("boost", (Mat2() << std::cosh(tau), std::sinh(tau), std::sinh(tau), std::cosh(tau)).finished());
  }
  double k = -P.vecs[1](2) / P.vecs[1](0);
  if (k > 1) {
    P.apply("swap", kSwap);
    k = -P.vecs[1](2) / P.vecs[1](0);
  }
  if (!(k > 0 && k < 1)) throw Error(Errc::NumericallyDegenerate, "second eigenvector ratio outside (0,1)");
  P.apply("rescale", Mat2::Identity() * std::sqrt(std::abs(P.lams[2])));
  const auto [e2, e3] = middle_normalized(P.vecs[2]);
  P.res.subcase = "(d)";
  P.finish(FormTag::A22, {{"lambda1", P.lams[0]}, {"lambda2", P.lams[1]}, {"eta1", k / (1 - k)}, {"eta2", e2}, {"eta3", e3}});
  return P.res;
}

NormalizationResult normalize(const SystemRep& s) {
  const auto cls = classify(s);
  if (cls.assumption1) return normalize_assumption1(s);
  if (cls.assumption2) return normalize_assumption2(s);
  throw Error(Errc::AssumptionNotSatisfied, "neither Assumption 1 nor Assumption 2 holds");
}

}  // namespace nlslab
