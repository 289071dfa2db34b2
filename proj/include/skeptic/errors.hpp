#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace skeptic {

// Base class for everything this library throws. `name()` is the stable
// identifier surfaced by the CLI ("NoCensoring", "Separation", ...);
// `what()` carries the context.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& message)
      : std::runtime_error(message), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

#define SKEPTIC_ERROR_TYPE(TYPE)                                          \
  class TYPE##Error : public Error {                                      \
   public:                                                                \
    explicit TYPE##Error(const std::string& message)                      \
        : Error(#TYPE, message) {}                                        \
  }

SKEPTIC_ERROR_TYPE(NonFinite);
SKEPTIC_ERROR_TYPE(RankDeficient);
SKEPTIC_ERROR_TYPE(InsufficientObservations);
SKEPTIC_ERROR_TYPE(SingleClass);
SKEPTIC_ERROR_TYPE(Separation);
SKEPTIC_ERROR_TYPE(NoCensoring);
SKEPTIC_ERROR_TYPE(AllCensored);
SKEPTIC_ERROR_TYPE(EmptyUpdaterSubsample);
SKEPTIC_ERROR_TYPE(TransformMismatch);
SKEPTIC_ERROR_TYPE(EmptyAfterFilter);
SKEPTIC_ERROR_TYPE(SchemaMismatch);
SKEPTIC_ERROR_TYPE(MalformedRow);
SKEPTIC_ERROR_TYPE(InvariantViolation);
SKEPTIC_ERROR_TYPE(OutOfRange);
SKEPTIC_ERROR_TYPE(InvalidConfig);
SKEPTIC_ERROR_TYPE(InvalidArgument);
SKEPTIC_ERROR_TYPE(Conformability);
SKEPTIC_ERROR_TYPE(MissingCovariate);

#undef SKEPTIC_ERROR_TYPE

}  // namespace skeptic
