#pragma once

#include <stdexcept>
#include <string>

namespace bblab {

// Exit-code families used by the CLI.
enum class ErrorFamily { validation = 2, solver = 3, analysis = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorFamily family, std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), family_(family), kind_(std::move(kind)) {}

  ErrorFamily family() const { return family_; }
  const std::string& kind() const { return kind_; }

 private:
  ErrorFamily family_;
  std::string kind_;
};

#define BBLAB_DEFINE_ERROR(Name, Family)                                            \
  class Name : public Error {                                                       \
   public:                                                                          \
    explicit Name(const std::string& what) : Error(ErrorFamily::Family, #Name, what) {} \
  };

BBLAB_DEFINE_ERROR(InvalidArgument, validation)
BBLAB_DEFINE_ERROR(ValidationFailure, validation)
BBLAB_DEFINE_ERROR(NonConvergence, solver)
BBLAB_DEFINE_ERROR(NegativeSolution, solver)
BBLAB_DEFINE_ERROR(SingularSystem, solver)
BBLAB_DEFINE_ERROR(StepUnderflow, solver)
BBLAB_DEFINE_ERROR(UnresolvedRadius, analysis)
BBLAB_DEFINE_ERROR(DegenerateInput, analysis)
BBLAB_DEFINE_ERROR(DegenerateGradient, analysis)
BBLAB_DEFINE_ERROR(NoAdmissiblePerturbation, analysis)
BBLAB_DEFINE_ERROR(AngleOutOfRange, analysis)
BBLAB_DEFINE_ERROR(IoError, analysis)

#undef BBLAB_DEFINE_ERROR

}  // namespace bblab
