#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kb {

enum class Errc {
  OverlappingBlocks,
  UncoveredPoint,
  EmptyBlock,
  UnknownPoint,
  SpaceMismatch,
  NotMeasurable,
  NotWellDefined,
  InvalidMeasure,
  InvalidKernel,
  MeasurementNotAbsolutelyContinuous,
  SampleOffGrid,
  InfeasiblePlan,
  ParseError,
  ValidationError,
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::OverlappingBlocks: return "OverlappingBlocks";
    case Errc::UncoveredPoint: return "UncoveredPoint";
    case Errc::EmptyBlock: return "EmptyBlock";
    case Errc::UnknownPoint: return "UnknownPoint";
    case Errc::SpaceMismatch: return "SpaceMismatch";
    case Errc::NotMeasurable: return "NotMeasurable";
    case Errc::NotWellDefined: return "NotWellDefined";
    case Errc::InvalidMeasure: return "InvalidMeasure";
    case Errc::InvalidKernel: return "InvalidKernel";
    case Errc::MeasurementNotAbsolutelyContinuous: return "MeasurementNotAbsolutelyContinuous";
    case Errc::SampleOffGrid: return "SampleOffGrid";
    case Errc::InfeasiblePlan: return "InfeasiblePlan";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

/// Every failure in the library is reported through this exception type.
/// `step()` is set by the update loop to the index of the failing measurement.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::optional<std::size_t> step = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message), step_(step) {}

  Errc code() const noexcept { return code_; }
  /// The message without the error-code prefix.
  const std::string& message() const noexcept { return message_; }
  std::optional<std::size_t> step() const noexcept { return step_; }

 private:
  Errc code_;
  std::string message_;
  std::optional<std::size_t> step_;
};

}  // namespace kb
