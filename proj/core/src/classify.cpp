#include "nlslab/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

namespace nlslab {

std::string case_name(CaseLabel c) {
  switch (c) {
    case CaseLabel::Case1: return "Case1";
    case CaseLabel::Case2: return "Case2";
    case CaseLabel::Case3: return "Case3";
    case CaseLabel::Case4: return "Case4";
    case CaseLabel::Case5: return "Case5";
    case CaseLabel::Case6: return "Case6";
    case CaseLabel::Case7: return "Case7";
    case CaseLabel::Rank3: return "Rank3";
  }
  return "?";
}

namespace {

Vec3 orient(Vec3 v) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(v(i)) > 1e-12 * v.norm()) {
      if (v(i) < 0) v = -v;
      break;
    }
  }
  return v;
}

// zero out roundoff-size entries, round near-integers
Vec3 snap(Vec3 w) {
  const double mx = w.cwiseAbs().maxCoeff();
  for (int i = 0; i < 3; ++i) {
    const double r = std::round(w(i));
    if (std::abs(w(i) - r) < 1e-9 * std::max(1.0, std::abs(r))) w(i) = r;
    if (std::abs(w(i)) < 1e-12 * mx) w(i) = 0.0;
  }
  return w;
}

// Rescale so the smallest nonzero entry has magnitude one; keeps the textbook
// vectors (2,1,2), (2,0,1), (1,0,0) in their familiar shape.
Vec3 display_scale(const Vec3& v) {
  const double mx = v.cwiseAbs().maxCoeff();
  if (mx == 0) return v;
  double mn = mx;
  for (int i = 0; i < 3; ++i)
    if (std::abs(v(i)) > 1e-9 * mx) mn = std::min(mn, std::abs(v(i)));
  return orient(snap(v / mn));
}

void check_margin(Classification& c, const ConeSearch& r, double tol, const std::string& what) {
  const double b = std::abs(r.best);
  if (b > tol && b <= 10 * tol) {
    c.borderline = true;
    c.notes.push_back(what + ": cone margin " + std::to_string(r.best) + " within 10x of the band");
  }
}

}  // namespace

Classification classify(const SystemRep& s, double cone_tol, double cluster_tol) {
  Classification c;
  c.eig = eigen_decompose(s, cluster_tol);
  c.rank = c.eig.rank;
  if (c.eig.borderline) {
    c.borderline = true;
    c.notes.push_back("eigenvalue gap " + std::to_string(c.eig.min_gap) + " within 10x of the cluster band");
  }

  // rank <= 2 classes by the kernel
  if (c.rank == 0) {
    c.case_label = CaseLabel::Case1;
    c.wngc = true;
    c.witnesses["kernel"] = Vec3(1, 0, 1);
  } else if (c.rank <= 2) {
    const EigenSpace* ker = c.eig.space(0.0);
    const auto plus = search_subspace(ker->basis, ConeQuery::Plus, cone_tol);
    check_margin(c, plus, cone_tol, "kernel");
    if (plus.hit) {
      c.wngc = true;
      c.witnesses["kernel"] = display_scale(plus.witness);
      c.case_label = c.rank == 1 ? CaseLabel::Case2 : CaseLabel::Case5;
    } else {
      const auto zero = search_subspace(ker->basis, ConeQuery::ZeroNontrivial, cone_tol);
      if (zero.hit) {
        c.case_label = c.rank == 1 ? CaseLabel::Case3 : CaseLabel::Case6;
        c.witnesses["kernel"] = display_scale(zero.witness);
        c.borderline = true;
        c.notes.push_back("kernel meets the boundary cone only within tolerance");
      } else {
        c.case_label = c.rank == 1 ? CaseLabel::Case4 : CaseLabel::Case7;
        c.witnesses["kernel"] = display_scale(ker->basis.front());
      }
    }
  } else {
    c.case_label = CaseLabel::Rank3;
  }

  // Assumption 1: two distinct nonzero real eigenvalues with eigenspaces meeting P+.
  std::vector<std::pair<double, Vec3>> plus_spaces;
  for (const auto& sp : c.eig.spaces) {
    if (sp.lambda == 0.0) continue;
    const auto r = search_subspace(sp.basis, ConeQuery::Plus, cone_tol);
    check_margin(c, r, cone_tol, "W(" + std::to_string(sp.lambda) + ")");
    if (r.hit) plus_spaces.emplace_back(sp.lambda, orient(r.witness));
  }
  if (plus_spaces.size() >= 2) {
    c.assumption1 = true;
    c.lambdas["lambda1"] = plus_spaces[0].first;
    c.lambdas["lambda2"] = plus_spaces[1].first;
    c.witnesses["p1"] = display_scale(plus_spaces[0].second);
    c.witnesses["p2"] = display_scale(plus_spaces[1].second);
  }

  // Assumption 2: three simple real eigenvalues, exactly the lambda3 space meets P+,
  // the other two only jointly.
  if (c.eig.spaces.size() == 3 && !c.eig.complex_pair) {
    for (int k = 0; k < 3 && !c.assumption2; ++k) {
      const EigenSpace& s3 = c.eig.spaces[static_cast<std::size_t>(k)];
      if (s3.lambda == 0.0) continue;
      const EigenSpace& si = c.eig.spaces[static_cast<std::size_t>((k + 1) % 3)];
      const EigenSpace& sj = c.eig.spaces[static_cast<std::size_t>((k + 2) % 3)];
      const double ri = si.lambda / s3.lambda, rj = sj.lambda / s3.lambda;
      if (!(ri < 1 && rj < 1)) continue;
      const auto w3 = search_subspace(s3.basis, ConeQuery::Plus, cone_tol);
      if (!w3.hit) continue;
      if (search_subspace(si.basis, ConeQuery::Plus, cone_tol).hit) continue;
      if (search_subspace(sj.basis, ConeQuery::Plus, cone_tol).hit) continue;
      const Vec3 vi = si.basis.front(), vj = sj.basis.front();
      const auto joint = search_subspace({vi, vj}, ConeQuery::Plus, cone_tol);
      check_margin(c, joint, cone_tol, "W(lambda1)+W(lambda2)");
      if (!joint.hit) continue;

      // split the joint witness along the two eigenlines
      Eigen::Matrix<double, 3, 2> B;
      B.col(0) = vi;
      B.col(1) = vj;
      Vec3 w = joint.witness;
      if (w(0) < 0) w = -w;
      const Eigen::Vector2d st = B.colPivHouseholderQr().solve(w);
      Vec3 pi = st(0) * vi, pj = st(1) * vj;
      double li = si.lambda, lj = sj.lambda;
      if (ri > rj) {
        std::swap(pi, pj);
        std::swap(li, lj);
      }
      // common scale keeps p1 + p2 in P+
      const double sc = display_scale(pi + pj).norm() / (pi + pj).norm();
      c.assumption2 = true;
      c.lambdas["lambda1"] = li;
      c.lambdas["lambda2"] = lj;
      c.lambdas["lambda3"] = s3.lambda;
      c.witnesses["p1"] = snap(pi * sc);
      c.witnesses["p2"] = snap(pj * sc);
      c.witnesses["p3"] = display_scale(w3.witness);
    }
    if (c.assumption1 && c.assumption2) {
      // cannot happen for exact inputs (Assumption 2 forbids P+ in two eigenspaces)
      c.notes.push_back("both assumptions detected");
    }
  }
  if (c.assumption2 && !c.assumption1) {
    // Assumption 1 lambdas would have been overwritten otherwise; nothing to do
  }
  return c;
}

// -- conserved quantities ---------------------------------------------------

namespace {

double powabs(double q, double e) {
  if (e == 0.0) return 1.0;
  const double b = std::abs(q);
  if (b == 0.0) {
    if (e < 0) throw Error(Errc::Undefined, "zero base with negative exponent");
    return 0.0;
  }
  return std::pow(b, e);
}

std::string fmt_num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

ConservedQuantitySpec make_pair(const Vec3& a1, double l1, const Vec3& a2, double l2, bool both_plus) {
  ConservedQuantitySpec q;
  q.kind = ConservedQuantitySpec::Kind::Pair;
  q.a1 = a1;
  q.a2 = a2;
  q.lambda1 = l1;
  q.lambda2 = l2;
  q.e1 = l2;
  q.e2 = -l1;
  const double sum = q.e1 + q.e2;
  if (sum < 0 || (sum == 0 && q.e1 < 0)) {
    q.e1 = -q.e1;
    q.e2 = -q.e2;
  }
  q.degree = q.e1 + q.e2;
  q.coercive = both_plus && q.degree > 0;
  q.name = "pair(" + fmt_num(l1) + "," + fmt_num(l2) + ")";
  return q;
}

}  // namespace

std::vector<ConservedQuantitySpec> conserved_quantities(const SystemRep& s) {
  return conserved_quantities(s, classify(s));
}

std::vector<ConservedQuantitySpec> conserved_quantities(const SystemRep& s, const Classification& cls) {
  (void)s;
  const auto& spaces = cls.eig.spaces;
  struct Rep {
    double lambda;
    Vec3 v;
    bool plus;
  };
  std::vector<Rep> reps;
  for (const auto& sp : spaces) {
    const auto r = search_subspace(sp.basis, ConeQuery::Plus);
    if (r.hit)
      reps.push_back({sp.lambda, display_scale(r.witness), true});
    else
      reps.push_back({sp.lambda, display_scale(sp.basis.front()), false});
  }

  std::vector<ConservedQuantitySpec> out;
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (std::size_t j = i + 1; j < reps.size(); ++j)
      out.push_back(make_pair(reps[i].v, reps[i].lambda, reps[j].v, reps[j].lambda,
                              reps[i].plus && reps[j].plus));

  // two independent eigenvectors of one eigenvalue: the ratio is conserved
  for (const auto& sp : spaces) {
    if (sp.basis.size() < 2) continue;
    Vec3 v1 = sp.basis[0], v2 = sp.basis[1];
    if (sp.basis.size() >= 3) {
      v1 = Vec3(1, 0, 1);
      v2 = Vec3(2, 0, 1);
    } else {
      const auto r = search_subspace(sp.basis, ConeQuery::Plus);
      if (r.hit) {
        // the maximizer and a second direction half way to the cone boundary
        const Vec3 p = sp.basis[0], q = sp.basis[1];
        const Vec3 w = r.witness;
        Vec3 u = (w.dot(p) * q - w.dot(q) * p);
        u.normalize();
        const double gw = cone_discriminant(w);
        auto g = [&](double th) { return cone_discriminant(std::cos(th) * w + std::sin(th) * u); };
        double lo = 0, hi = M_PI / 2;
        if (g(hi) <= 0) {
          for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (g(mid) > 0.5 * gw ? lo : hi) = mid;
          }
        } else {
          lo = M_PI / 4;
        }
        v1 = w;
        v2 = std::cos(lo) * w + std::sin(lo) * u;
      }
    }
    ConservedQuantitySpec q;
    q.kind = ConservedQuantitySpec::Kind::Ratio;
    q.a1 = display_scale(v1);
    q.a2 = display_scale(v2);
    q.lambda1 = q.lambda2 = sp.lambda;
    q.e1 = 1;
    q.e2 = -1;
    q.degree = 0;
    q.coercive = false;
    q.name = "ratio(" + fmt_num(sp.lambda) + ")";
    out.push_back(q);
  }

  if (cls.assumption2) {
    const double l1 = cls.lambdas.at("lambda1"), l2 = cls.lambdas.at("lambda2"), l3 = cls.lambdas.at("lambda3");
    const Vec3 p1 = cls.witnesses.at("p1"), p2 = cls.witnesses.at("p2"), p3 = cls.witnesses.at("p3");
    const double th1 = 1.0 / (1.0 - l1 / l3), th2 = 1.0 / (1.0 - l2 / l3);
    const double m = std::max(2.0, 2.0 / std::min(th1, th2));
    ConservedQuantitySpec q;
    q.kind = ConservedQuantitySpec::Kind::Combined;
    q.a1 = p1;
    q.a2 = p2;
    q.lambda1 = l1;
    q.lambda2 = l2;
    q.e1 = m * th1;
    q.e2 = m * th2;
    q.degree = m;
    q.coercive = true;
    q.terms = {{{p1, m * th1}, {p3, m * (1 - th1)}}, {{p2, m * th2}, {p3, m * (1 - th2)}}};
    q.name = "combined";
    out.push_back(q);
  }

  if (out.empty()) throw Error(Errc::NoRealEigenpair, "fewer than two real eigenvectors");
  return out;
}

double evaluate_conserved(const ConservedQuantitySpec& spec, const FieldPair& p) {
  if (spec.kind == ConservedQuantitySpec::Kind::Combined) {
    double sum = 0;
    for (const auto& term : spec.terms) {
      double prod = 1;
      for (const auto& f : term) prod *= powabs(quadratic_form(p, f.a), f.exponent);
      sum += prod;
    }
    return sum;
  }
  return powabs(quadratic_form(p, spec.a1), spec.e1) * powabs(quadratic_form(p, spec.a2), spec.e2);
}

std::string render_quadratic(const Vec3& a) {
  std::string s;
  auto add = [&](double coef, const std::string& mono) {
    if (coef == 0.0) return;
    if (!s.empty()) s += coef < 0 ? " - " : " + ";
    else if (coef < 0) s += "-";
    const double c = std::abs(coef);
    if (c != 1.0) s += fmt_num(c) + "*";
    s += mono;
  };
  add(a(0), "|phi1|^2");
  add(2 * a(1), "Re(conj(phi1)*phi2)");
  add(a(2), "|phi2|^2");
  return s.empty() ? "0" : "(" + s + ")";
}

std::string render_formula(const ConservedQuantitySpec& spec) {
  auto factor = [](const Vec3& a, double e) -> std::string {
    if (e == 0.0) return "";
    std::string base = render_quadratic(a);
    if (e == 1.0) return "|" + base + "|";
    return "|" + base + "|^" + fmt_num(e);
  };
  auto join = [](const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
      if (p.empty()) continue;
      if (!out.empty()) out += " * ";
      out += p;
    }
    return out.empty() ? std::string("1") : out;
  };
  if (spec.kind == ConservedQuantitySpec::Kind::Combined) {
    std::string out;
    for (const auto& term : spec.terms) {
      std::vector<std::string> parts;
      for (const auto& f : term) parts.push_back(factor(f.a, f.exponent));
      if (!out.empty()) out += " + ";
      out += join(parts);
    }
    return out;
  }
  return join({factor(spec.a1, spec.e1), factor(spec.a2, spec.e2)});
}

// -- global bound constant ------------------------------------------------------

namespace {

// G(chi, beta) = H(phi)/|phi|^(2 deg) on the unit sphere, phi = (cos chi, sin chi e^{i beta}).
double sphere_value(const ConservedQuantitySpec& q, double chi, double beta) {
  const FieldPair p{cplx(std::cos(chi), 0), std::sin(chi) * std::polar(1.0, beta)};
  return evaluate_conserved(q, p);
}

// Nelder-Mead on (chi, beta), chi clamped to [0, pi/2].
double refine(const std::function<double(double, double)>& f, double x0, double y0, double h) {
  auto F = [&](const Eigen::Vector2d& v) {
    return f(std::clamp(v(0), 0.0, M_PI / 2), v(1));
  };
  std::array<Eigen::Vector2d, 3> x = {Eigen::Vector2d(x0, y0), Eigen::Vector2d(x0 + h, y0),
                                      Eigen::Vector2d(x0, y0 + h)};
  std::array<double, 3> fx = {F(x[0]), F(x[1]), F(x[2])};
  for (int it = 0; it < 400; ++it) {
    std::array<int, 3> idx = {0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fx[static_cast<std::size_t>(a)] < fx[static_cast<std::size_t>(b)]; });
    auto X = [&](int k) -> Eigen::Vector2d& { return x[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])]; };
    auto FX = [&](int k) -> double& { return fx[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])]; };
    if (std::abs(FX(2) - FX(0)) <= 1e-15 * std::max(1.0, std::abs(FX(0))) && (X(2) - X(0)).norm() < 1e-10) break;
    const Eigen::Vector2d c = 0.5 * (X(0) + X(1));
    const Eigen::Vector2d xr = c + (c - X(2));
    const double fr = F(xr);
    if (fr < FX(0)) {
      const Eigen::Vector2d xe = c + 2.0 * (c - X(2));
      const double fe = F(xe);
      if (fe < fr) { X(2) = xe; FX(2) = fe; } else { X(2) = xr; FX(2) = fr; }
    } else if (fr < FX(1)) {
      X(2) = xr; FX(2) = fr;
    } else {
      const Eigen::Vector2d xc = c + 0.5 * (X(2) - c);
      const double fc = F(xc);
      if (fc < FX(2)) {
        X(2) = xc; FX(2) = fc;
      } else {
        for (int k = 1; k < 3; ++k) {
          X(k) = X(0) + 0.5 * (X(k) - X(0));
          FX(k) = F(X(k));
        }
      }
    }
  }
  return *std::min_element(fx.begin(), fx.end());
}

std::pair<double, double> sphere_extremes(const ConservedQuantitySpec& q) {
  const int nc = 256, nb = 256;
  double lo = INFINITY, hi = -INFINITY;
  double lo_c = 0, lo_b = 0, hi_c = 0, hi_b = 0;
  for (int i = 0; i <= nc; ++i) {
    const double chi = (M_PI / 2) * i / nc;
    for (int j = 0; j <= nb; ++j) {
      const double beta = M_PI * j / nb;  // G depends on beta only through cos(beta)
      const double v = sphere_value(q, chi, beta);
      if (v < lo) { lo = v; lo_c = chi; lo_b = beta; }
      if (v > hi) { hi = v; hi_c = chi; hi_b = beta; }
    }
  }
  const double h = M_PI / 256;
  lo = std::min(lo, refine([&](double c, double b) { return sphere_value(q, c, b); }, lo_c, lo_b, h));
  hi = std::max(hi, -refine([&](double c, double b) { return -sphere_value(q, c, b); }, hi_c, hi_b, h));
  return {lo, hi};
}

}  // namespace

BoundConstant global_bound_constant(const SystemRep& s, const Classification& cls) {
  BoundConstant b;
  if (cls.assumption1) {
    const Vec3 p1 = cls.witnesses.at("p1"), p2 = cls.witnesses.at("p2");
    const auto q = make_pair(p1, cls.lambdas.at("lambda1"), p2, cls.lambdas.at("lambda2"), true);
    double fmin = 1, fmax = 1;
    for (const auto& [a, e] : {std::pair{q.a1, q.e1}, std::pair{q.a2, q.e2}}) {
      const auto [kmin, kmax] = form_bounds(a);
      fmin *= std::pow(e > 0 ? kmin : kmax, e);
      fmax *= std::pow(e > 0 ? kmax : kmin, e);
    }
    b.lower = fmin;
    b.upper = fmax;
    b.degree = q.degree;
    b.C = std::pow(fmax / fmin, 1.0 / q.degree);
    b.source = q.name;
    return b;
  }
  if (cls.assumption2) {
    const auto qs = conserved_quantities(s, cls);
    const auto& q = qs.back();
    const auto [lo, hi] = sphere_extremes(q);
    if (!(lo > 0)) throw Error(Errc::NumericallyDegenerate, "combined quantity is not coercive on the sphere");
    b.lower = lo;
    b.upper = hi;
    b.degree = q.degree;
    b.C = std::pow(hi / lo, 1.0 / q.degree);
    b.source = q.name;
    return b;
  }
  throw Error(Errc::AssumptionNotSatisfied, "global bound needs Assumption 1 or 2");
}

}  // namespace nlslab
