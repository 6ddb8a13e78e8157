#ifndef RRS_ERRORS_HPP
#define RRS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rrs {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define RRS_DEFINE_ERROR(Name)            \
  class Name : public Error {             \
  public:                                 \
    using Error::Error;                   \
  }

RRS_DEFINE_ERROR(TrialBudgetExceeded);
RRS_DEFINE_ERROR(ZeroWeight);
RRS_DEFINE_ERROR(RatioExceedsBound);
RRS_DEFINE_ERROR(NonpositiveInterarrival);
RRS_DEFINE_ERROR(QueryPastHorizon);
RRS_DEFINE_ERROR(SingleCycle);
RRS_DEFINE_ERROR(ZeroVariance);
RRS_DEFINE_ERROR(DegenerateComponent);
RRS_DEFINE_ERROR(NoConvergence);
RRS_DEFINE_ERROR(IndefiniteHessian);
RRS_DEFINE_ERROR(SingularDesign);
RRS_DEFINE_ERROR(DataIntegrity);
RRS_DEFINE_ERROR(SchemaMismatch);
RRS_DEFINE_ERROR(IoError);

#undef RRS_DEFINE_ERROR

}  // namespace rrs

#endif
