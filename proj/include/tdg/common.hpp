#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace tdg {

using Complex = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using CVec2 = Eigen::Vector2cd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Base class of every error raised by the library. `kind()` is a stable
/// identifier used by the CLI for structured messages.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define TDG_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name, what) {}  \
  };

TDG_DEFINE_ERROR(GeometryError)
TDG_DEFINE_ERROR(MaterialStraddle)
TDG_DEFINE_ERROR(PeriodicityViolation)
TDG_DEFINE_ERROR(ParseError)
TDG_DEFINE_ERROR(NotApplicable)
TDG_DEFINE_ERROR(DomainError)
TDG_DEFINE_ERROR(SingularSystem)
TDG_DEFINE_ERROR(InvalidInput)
TDG_DEFINE_ERROR(ResonanceDetected)
TDG_DEFINE_ERROR(DegenerateIncidence)
TDG_DEFINE_ERROR(ConfigError)

#undef TDG_DEFINE_ERROR

}  // namespace tdg
