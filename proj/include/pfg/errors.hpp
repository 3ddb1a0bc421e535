#pragma once

#include <stdexcept>
#include <string>

namespace pfg {

enum class Err {
    ZeroSpeed,
    CoincidentPoints,
    UnknownScenario,
    VerticalHeading,
    NonFiniteState,
    UndefinedAtZeroSigma,
    ParseError,
    ValidationError,
    IoError,
};

// Single exception type carrying a machine-checkable code; guard-type
// conditions in the integration loop are reported through flags instead.
class SimError : public std::runtime_error {
  public:
    SimError(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Err code() const { return code_; }

  private:
    Err code_;
};

const char* err_name(Err code);

}  // namespace pfg
