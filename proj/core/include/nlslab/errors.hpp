#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nlslab {

enum class Errc {
  InvalidArgument,
  EmptyBasis,
  SingularTransform,
  NoRealEigenpair,
  Undefined,
  AssumptionNotSatisfied,
  DegenerateWitness,
  NumericallyDegenerate,
  ZeroTrajectory,
  ZeroTime,
  GridUnderresolved,
  WindowTooShort,
};

std::string_view errc_name(Errc e);

// Every library failure carries one of the codes above; the CLI maps them
// to exit statuses.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what);
  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

}  // namespace nlslab
