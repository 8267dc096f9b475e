#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tstab {

enum class Errc {
  MissingColumn,
  NonMonotonicTime,
  NonUniformSampling,
  TooFewSamples,
  NonFiniteInput,
  InvalidAnchor,
  InvalidProfile,
  SeriesTooShort,
  InvalidSpec,
  InvalidParams,
  NonPositiveRadius,
  ExtensionOutOfRange,
  InvalidDt,
  StateInvariantViolation,
  InfeasibleTarget,
  Parse,
  Io,
};

std::string_view to_string(Errc code) noexcept;

/// Single exception type for the toolkit; `code()` carries the failure class.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::NonMonotonicTime: return "NonMonotonicTime";
    case Errc::NonUniformSampling: return "NonUniformSampling";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::NonFiniteInput: return "NonFiniteInput";
    case Errc::InvalidAnchor: return "InvalidAnchor";
    case Errc::InvalidProfile: return "InvalidProfile";
    case Errc::SeriesTooShort: return "SeriesTooShort";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::NonPositiveRadius: return "NonPositiveRadius";
    case Errc::ExtensionOutOfRange: return "ExtensionOutOfRange";
    case Errc::InvalidDt: return "InvalidDt";
    case Errc::StateInvariantViolation: return "StateInvariantViolation";
    case Errc::InfeasibleTarget: return "InfeasibleTarget";
    case Errc::Parse: return "Parse";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace tstab
