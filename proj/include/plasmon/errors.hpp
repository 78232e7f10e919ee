// SPDX-License-Identifier: Apache-2.0
#ifndef PLASMON_ERRORS_HPP
#define PLASMON_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace plasmon
{

// Base of everything the library throws on purpose.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

#define PLASMON_DEFINE_ERROR(Name)                                                     \
  class Name : public Error                                                            \
  {                                                                                    \
  public:                                                                              \
    explicit Name(const std::string &what) : Error(std::string(#Name ": ") + what) {} \
  }

// special functions
PLASMON_DEFINE_ERROR(DegenerateArgument);
PLASMON_DEFINE_ERROR(OrderOverflow);
// harmonics
PLASMON_DEFINE_ERROR(DegenerateIndex);
PLASMON_DEFINE_ERROR(NotTangential);
// spectrum
PLASMON_DEFINE_ERROR(AdmissibilityViolation);
PLASMON_DEFINE_ERROR(DegenerateEigenpair);
// scattering
PLASMON_DEFINE_ERROR(SingularPoint);
PLASMON_DEFINE_ERROR(DefectiveMode);
PLASMON_DEFINE_ERROR(NearSingularMode);
PLASMON_DEFINE_ERROR(TooCloseToSurface);
// design
PLASMON_DEFINE_ERROR(NearPole);
PLASMON_DEFINE_ERROR(Unreachable);
// oracle
PLASMON_DEFINE_ERROR(ExtrapolationUnstable);
PLASMON_DEFINE_ERROR(LeakageExcessive);
// configuration
PLASMON_DEFINE_ERROR(ConfigError);

#undef PLASMON_DEFINE_ERROR

}  // namespace plasmon

#endif  // PLASMON_ERRORS_HPP
