#include "nlslab/errors.hpp"

namespace nlslab {

std::string_view errc_name(Errc e) {
  switch (e) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::EmptyBasis: return "EmptyBasis";
    case Errc::SingularTransform: return "SingularTransform";
    case Errc::NoRealEigenpair: return "NoRealEigenpair";
    case Errc::Undefined: return "Undefined";
    case Errc::AssumptionNotSatisfied: return "AssumptionNotSatisfied";
    case Errc::DegenerateWitness: return "DegenerateWitness";
    case Errc::NumericallyDegenerate: return "NumericallyDegenerate";
    case Errc::ZeroTrajectory: return "ZeroTrajectory";
    case Errc::ZeroTime: return "ZeroTime";
    case Errc::GridUnderresolved: return "GridUnderresolved";
    case Errc::WindowTooShort: return "WindowTooShort";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

}  // namespace nlslab
