#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dlgibbs {

enum class Errc {
  NotHermitian,
  NoConvergence,
  OverflowDetected,
  DimensionMismatch,
  BadDimensionFactorization,
  SupportOutOfRange,
  DegenerateGap,
  UnknownKind,
  BadParams,
  SingularSigma,
  NotDetailedBalanced,
  PositiveEigenvalue,
  BadGamma,
  BadEps,
  InsufficientSpread,
  FrustrationDetected,
  BadAlpha,
  OverlapTooSmall,
  RankAmbiguous,
  IrreducibilityWarning,
  PositivityFailure,
  BadInputs,
  ParseError,
  UnknownKey,
  MissingKey,
};

constexpr std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::NotHermitian: return "NotHermitian";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::OverflowDetected: return "OverflowDetected";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::BadDimensionFactorization: return "BadDimensionFactorization";
    case Errc::SupportOutOfRange: return "SupportOutOfRange";
    case Errc::DegenerateGap: return "DegenerateGap";
    case Errc::UnknownKind: return "UnknownKind";
    case Errc::BadParams: return "BadParams";
    case Errc::SingularSigma: return "SingularSigma";
    case Errc::NotDetailedBalanced: return "NotDetailedBalanced";
    case Errc::PositiveEigenvalue: return "PositiveEigenvalue";
    case Errc::BadGamma: return "BadGamma";
    case Errc::BadEps: return "BadEps";
    case Errc::InsufficientSpread: return "InsufficientSpread";
    case Errc::FrustrationDetected: return "FrustrationDetected";
    case Errc::BadAlpha: return "BadAlpha";
    case Errc::OverlapTooSmall: return "OverlapTooSmall";
    case Errc::RankAmbiguous: return "RankAmbiguous";
    case Errc::IrreducibilityWarning: return "IrreducibilityWarning";
    case Errc::PositivityFailure: return "PositivityFailure";
    case Errc::BadInputs: return "BadInputs";
    case Errc::ParseError: return "ParseError";
    case Errc::UnknownKey: return "UnknownKey";
    case Errc::MissingKey: return "MissingKey";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
/// The message is prefixed with the module that raised it.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string_view module, const std::string& what)
      : std::runtime_error(std::string(module) + ": " + std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace dlgibbs
