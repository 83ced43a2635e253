#pragma once

#include <stdexcept>
#include <string>

namespace koiter {

/// Base class of every error raised by the library. The `kind()` string is
/// stable and is what the CLI writes into error manifests.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)), message_(what) {}
  const std::string& kind() const noexcept { return kind_; }
  /// what() without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  std::string kind_;
  std::string message_;
};

#define KOITER_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name, what) {}  \
  }

// geometry
KOITER_DEFINE_ERROR(DegenerateChart);
KOITER_DEFINE_ERROR(ThicknessExceedsCurvature);
// kinematics
KOITER_DEFINE_ERROR(MissingSecondDerivatives);
KOITER_DEFINE_ERROR(ZeroThickness);
KOITER_DEFINE_ERROR(InvalidLame);
// mesh
KOITER_DEFINE_ERROR(InvalidResolution);
KOITER_DEFINE_ERROR(OddLayerCount);
// fem
KOITER_DEFINE_ERROR(SpaceMeshMismatch);
KOITER_DEFINE_ERROR(WrongTransverseSpace);
KOITER_DEFINE_ERROR(NotElliptic);
KOITER_DEFINE_ERROR(InvalidPenalty);
// solver
KOITER_DEFINE_ERROR(NotPositiveDefinite);
KOITER_DEFINE_ERROR(NoConvergence);
KOITER_DEFINE_ERROR(SingularSystem);
// experiments / io
KOITER_DEFINE_ERROR(MeshMismatch);
KOITER_DEFINE_ERROR(IoError);
KOITER_DEFINE_ERROR(ConfigError);

#undef KOITER_DEFINE_ERROR

}  // namespace koiter
