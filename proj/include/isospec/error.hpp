#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace isospec {

enum class ErrorKind {
  DimensionMismatch,
  NotHermitian,
  HypothesisFailure,
  IllConditioned,
  Degenerate,
  InvalidParameter,
  Domain,
  Quadrature,
  Config,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Structured failure raised by every module. `measured` carries the residual
/// or singular value that triggered the refusal, when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<double> measured = std::nullopt)
      : std::runtime_error(message), kind_(kind), measured_(measured) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<double> measured() const noexcept { return measured_; }

  /// Refusals are the construction saying "the hypotheses do not hold", as
  /// opposed to bad input or broken numerics.
  bool is_refusal() const noexcept {
    return kind_ == ErrorKind::HypothesisFailure || kind_ == ErrorKind::IllConditioned ||
           kind_ == ErrorKind::Degenerate || kind_ == ErrorKind::InvalidParameter ||
           kind_ == ErrorKind::NotHermitian;
  }

 private:
  ErrorKind kind_;
  std::optional<double> measured_;
};

}  // namespace isospec
