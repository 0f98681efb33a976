#include "nlslab/templates.hpp"

#include <cmath>

namespace nlslab {

std::string form_name(FormTag t) {
  switch (t) {
    case FormTag::A11: return "A11";
    case FormTag::A12: return "A12";
    case FormTag::A13: return "A13";
    case FormTag::A21: return "A21";
    case FormTag::A22: return "A22";
  }
  return "?";
}

FormTag form_from_name(const std::string& s) {
  for (auto t : {FormTag::A11, FormTag::A12, FormTag::A13, FormTag::A21, FormTag::A22})
    if (form_name(t) == s) return t;
  throw Error(Errc::InvalidArgument, "unknown template tag '" + s + "'");
}

const std::vector<std::string>& param_names(FormTag t) {
  static const std::vector<std::string> a11{"lambda1", "lambda2", "eta1", "eta2", "eta3"};
  static const std::vector<std::string> a12{"lambda", "eta1", "eta2", "eta3", "eta4"};
  static const std::vector<std::string> a13{"lambda1", "eta1", "eta2", "eta3"};
  static const std::vector<std::string> a21{"lambda1", "lambda2", "eta"};
  static const std::vector<std::string> a22{"lambda1", "lambda2", "eta1", "eta2", "eta3"};
  switch (t) {
    case FormTag::A11: return a11;
    case FormTag::A12: return a12;
    case FormTag::A13: return a13;
    case FormTag::A21: return a21;
    case FormTag::A22: return a22;
  }
  return a11;
}

namespace {
double get(const Params& p, const std::string& k) {
  auto it = p.find(k);
  if (it == p.end()) throw Error(Errc::InvalidArgument, "missing template parameter " + k);
  return it->second;
}
}  // namespace

Mat3 template_matrix(FormTag t, const Params& p) {
  Mat3 A;
  switch (t) {
    case FormTag::A11: {
      const double l1 = get(p, "lambda1"), l2 = get(p, "lambda2");
      const double e1 = get(p, "eta1"), e2 = get(p, "eta2"), e3 = get(p, "eta3");
      const double d = l1 - l2;
      A << l1 - (1 + e1) * d, e2 * (1 - l1) + (1 + e1) * (e2 - e3) * d, (1 + e1) * d,
           0, 1, 0,
           -e1 * d, e3 * (1 - l1) + e1 * (e2 - e3) * d, l1 + e1 * d;
      break;
    }
    case FormTag::A12: {
      const double l = get(p, "lambda");
      const double e1 = get(p, "eta1"), e2 = get(p, "eta2"), e3 = get(p, "eta3"), e4 = get(p, "eta4");
      const double d = 1 - l;
      A << 1 - (1 + e1) * d, (1 + e1) * (e2 - e3) * d + e4, (1 + e1) * d,
           0, 1, 0,
           -e1 * d, e1 * (e2 - e3) * d + e4, 1 + e1 * d;
      break;
    }
    case FormTag::A13: {
      const double l1 = get(p, "lambda1");
      const double e1 = get(p, "eta1"), e2 = get(p, "eta2"), e3 = get(p, "eta3");
      const double d = l1 + 1;
      A << l1 - (1 + e1) * d, -e2 * l1 + (1 + e1) * (e2 - e3) * d, (1 + e1) * d,
           0, 0, 0,
           -e1 * d, -e3 * l1 + e1 * (e2 - e3) * d, l1 + e1 * d;
      break;
    }
    case FormTag::A21: {
      const double l1 = get(p, "lambda1"), l2 = get(p, "lambda2"), e = get(p, "eta");
      A << l1, -e * (l1 + 1), 0,
           0, -1, 0,
           0, -e * (l2 + 1), l2;
      break;
    }
    case FormTag::A22: {
      const double l1 = get(p, "lambda1"), l2 = get(p, "lambda2");
      const double e1 = get(p, "eta1"), e2 = get(p, "eta2"), e3 = get(p, "eta3");
      const double d = l1 - l2;
      A << l1 - (1 + e1) * d, (1 + e1) * (e2 + e3) * d - (l1 + 1) * e2, -(1 + e1) * d,
           0, -1, 0,
           e1 * d, -e1 * (e2 + e3) * d - (l1 + 1) * e3, e1 * d + l1;
      break;
    }
  }
  return A;
}

std::string template_violation(FormTag t, const Params& p, double tol) {
  for (const auto& k : param_names(t)) {
    auto it = p.find(k);
    if (it == p.end()) return "missing " + k;
    if (!std::isfinite(it->second)) return k + " not finite";
  }
  auto away = [&](double x, double v) { return std::abs(x - v) > tol; };
  switch (t) {
    case FormTag::A11: {
      const double l1 = p.at("lambda1"), l2 = p.at("lambda2");
      if (!(l1 > l2 + tol)) return "need lambda1 > lambda2";
      for (double l : {l1, l2})
        if (!away(l, 0) || !away(l, 1)) return "lambda1, lambda2 must avoid {0, 1}";
      if (!(p.at("eta1") > tol)) return "need eta1 > 0";
      return "";
    }
    case FormTag::A12: {
      const double l = p.at("lambda");
      if (!away(l, 0) || !away(l, 1)) return "lambda must avoid {0, 1}";
      if (!(p.at("eta1") > tol)) return "need eta1 > 0";
      return "";
    }
    case FormTag::A13: {
      const double l1 = p.at("lambda1");
      if (!(l1 > -1 + tol && l1 <= 1 + tol) || !away(l1, 0)) return "need lambda1 in (-1, 1] without 0";
      if (!(p.at("eta1") > tol)) return "need eta1 > 0";
      return "";
    }
    case FormTag::A21: {
      const double l1 = p.at("lambda1"), l2 = p.at("lambda2");
      if (!(l1 > l2 + tol && l2 > -1 + tol)) return "need lambda1 > lambda2 > -1";
      if (!(std::abs(p.at("eta")) > 1 + tol)) return "need |eta| > 1";
      return "";
    }
    case FormTag::A22: {
      const double l1 = p.at("lambda1"), l2 = p.at("lambda2"), e1 = p.at("eta1");
      if (!(l1 > -1 + tol && l2 > -1 + tol)) return "need lambda1, lambda2 > -1";
      if (!away(l1, l2)) return "need lambda1 != lambda2";
      if (!(e1 >= -tol)) return "need eta1 >= 0";
      if (e1 > tol && !(l1 > l2)) return "eta1 > 0 requires lambda1 > lambda2";
      if (!(p.at("eta2") * p.at("eta3") > 1 + tol)) return "need eta2*eta3 > 1";
      return "";
    }
  }
  return "";
}

double template_middle(FormTag t) {
  switch (t) {
    case FormTag::A11:
    case FormTag::A12: return 1;
    case FormTag::A13: return 0;
    case FormTag::A21:
    case FormTag::A22: return -1;
  }
  return 0;
}

}  // namespace nlslab
