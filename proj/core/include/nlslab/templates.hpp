#pragma once

#include <map>
#include <string>

#include "nlslab/algebra.hpp"

namespace nlslab {

enum class FormTag { A11, A12, A13, A21, A22 };

std::string form_name(FormTag t);
FormTag form_from_name(const std::string& s);  // throws InvalidArgument

using Params = std::map<std::string, double>;

// Parameter names each template expects, in display order.
const std::vector<std::string>& param_names(FormTag t);

// The printed standard-form matrices.
Mat3 template_matrix(FormTag t, const Params& p);

// Empty string when the parameter constraints of the family hold, else a reason.
std::string template_violation(FormTag t, const Params& p, double tol = 1e-12);

// Row index 1 (the middle row) of every template is (0, mu, 0) with mu in {1, 0, -1}.
double template_middle(FormTag t);

}  // namespace nlslab
