#pragma once

#include <stdexcept>
#include <string>

namespace toomlab {

// Every failure raised by the library derives from Error; the subclasses map
// onto the error categories surfaced by the CLI as JSON error objects.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "error"; }
};

#define TOOMLAB_ERROR_KIND(Name, tag)                                   \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(what) {}             \
    const char* kind() const noexcept override { return tag; }          \
  };

TOOMLAB_ERROR_KIND(InputShapeError, "input_shape")
TOOMLAB_ERROR_KIND(ValidationError, "validation")
TOOMLAB_ERROR_KIND(LookupError, "lookup")
TOOMLAB_ERROR_KIND(DomainError, "domain")
TOOMLAB_ERROR_KIND(ConfigError, "config")
TOOMLAB_ERROR_KIND(ResourceError, "resource")
TOOMLAB_ERROR_KIND(NumericalError, "numerical")

#undef TOOMLAB_ERROR_KIND

}  // namespace toomlab
