#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlslab/eigen.hpp"

namespace nlslab {

enum class CaseLabel { Case1, Case2, Case3, Case4, Case5, Case6, Case7, Rank3 };
std::string case_name(CaseLabel c);

struct Classification {
  int rank = 0;
  CaseLabel case_label = CaseLabel::Rank3;
  bool wngc = false;
  bool assumption1 = false;
  bool assumption2 = false;
  bool borderline = false;
  std::vector<std::string> notes;  // why borderline was raised, etc.

  // Assumption 1: lambda1 > lambda2, witnesses p1, p2 in the eigenspaces and in P+.
  // Assumption 2: lambda1 > lambda2 > lambda3 after the sign convention lambda3 < 0
  // is NOT applied here; the stored values are the raw eigenvalues ordered so that
  // lambda1/lambda3 < lambda2/lambda3 < 1, p1 + p2 in P+, p3 in P+.
  std::map<std::string, double> lambdas;
  std::map<std::string, Vec3> witnesses;

  EigenStructure eig;
};

Classification classify(const SystemRep& s, double cone_tol = kTolRel, double cluster_tol = kClusterTol);

struct QFactor {
  Vec3 a = Vec3::Zero();
  double exponent = 0;
};

struct ConservedQuantitySpec {
  enum class Kind { Pair, Ratio, Combined };
  Kind kind = Kind::Pair;
  Vec3 a1 = Vec3::Zero(), a2 = Vec3::Zero();
  double lambda1 = 0, lambda2 = 0;
  double e1 = 0, e2 = 0;  // exponents on |Q(a1)|, |Q(a2)| after normalization
  bool coercive = false;
  double degree = 0;      // homogeneity in |phi1|^2 + |phi2|^2
  std::vector<std::vector<QFactor>> terms;  // Combined: sum of products
  std::string name;

  std::pair<double, double> exponent_pair() const { return {e1, e2}; }
};

std::vector<ConservedQuantitySpec> conserved_quantities(const SystemRep& s, const Classification& cls);
std::vector<ConservedQuantitySpec> conserved_quantities(const SystemRep& s);

double evaluate_conserved(const ConservedQuantitySpec& spec, const FieldPair& p);
std::string render_formula(const ConservedQuantitySpec& spec);
std::string render_quadratic(const Vec3& a);

// C such that sup|phi|^2 / inf|phi|^2 <= C along every trajectory, derived from the
// coercive quantity: closed form for a coercive pair, sphere optimization for the
// combined quantity. Requires Assumption 1 or 2.
struct BoundConstant {
  double C = 0;
  double lower = 0, upper = 0;  // equivalence constants c-, c+ of the quantity
  double degree = 0;
  std::string source;           // name of the quantity used
};
BoundConstant global_bound_constant(const SystemRep& s, const Classification& cls);

}  // namespace nlslab
