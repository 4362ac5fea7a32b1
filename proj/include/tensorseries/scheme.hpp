#pragma once

#include <optional>
#include <string>

#include "tensorseries/core.hpp"

namespace tensorseries {

/// Thrown by ApproximationScheme::stage when the requested stage does not
/// exist. Consumers treat it as the end of the sequence, not as a failure.
class SchemeExhausted : public Error {
 public:
  using Error::Error;
};

/// u_j together with a certified bound eps_j >= alpha(u_j - u).
struct SchemeStage {
  CoefficientTensor approx;
  double bound = 0.0;
};

/// Stage-indexed producer of approximants u_j -> u with non-increasing,
/// summable error bounds. Implementations are pure: stage(j) depends only on
/// j and the construction arguments, and is safe to call concurrently.
class ApproximationScheme {
 public:
  virtual ~ApproximationScheme() = default;

  virtual int rows() const = 0;
  virtual int cols() const = 0;

  /// Stage j >= 1. Throws SchemeExhausted past the last stage.
  virtual SchemeStage stage(int j) const = 0;

  /// Terms summing to u_j - u_{j-1} (u_0 = 0), when the scheme has a
  /// natural basis for its increments.
  virtual std::optional<Representation> difference_terms(int /*j*/) const {
    return std::nullopt;
  }

  /// The limit u, when known exactly in the model.
  virtual std::optional<CoefficientTensor> exact_target() const { return std::nullopt; }

  virtual std::string kind() const = 0;
  virtual std::string description() const { return kind(); }
};

}  // namespace tensorseries
