#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nlslab/classify.hpp"
#include "nlslab/templates.hpp"

namespace nlslab {

struct NormalizationResult {
  GL2Transform M_total;
  std::vector<std::pair<std::string, GL2Transform>> steps;
  FormTag form_tag = FormTag::A11;
  Params params;
  SystemRep A_standard;          // transform_system(input, M_total)
  double template_residual = 0;  // |A_standard - template(params)| / |A_standard|
  std::string subcase;           // e.g. "1-(a)", "2-(b)", "(d)"
};

NormalizationResult normalize_assumption1(const SystemRep& s);
NormalizationResult normalize_assumption2(const SystemRep& s);
// Assumption 1 first, then Assumption 2.
NormalizationResult normalize(const SystemRep& s);

}  // namespace nlslab
