#pragma once

#include <stdexcept>
#include <string>

namespace tube {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A point or tangent left the domain of its chart.
struct ChartExitError : Error {
  using Error::Error;
};

// Two tangents that must share a base point do not.
struct BaseMismatchError : Error {
  using Error::Error;
};

// The requested operation is not supported by this scene (e.g. curvature
// derivatives of an order with no closed form and finite differences off).
struct CapabilityError : Error {
  using Error::Error;
};

// Bad user input: empty sampler, negative scale, malformed config key.
struct InputError : Error {
  using Error::Error;
};

// A radius hypothesis required by the construction does not hold; carries
// the name of the violated certificate.
struct HypothesisError : Error {
  explicit HypothesisError(const std::string& certificate, const std::string& what)
      : Error(what), certificate_name(certificate) {}
  std::string certificate_name;
};

// Numerical failure inside an integrator or quadrature.
struct NumericsError : Error {
  using Error::Error;
};

// An integral curve left its tube; carries the exit time.
struct TubeExitError : Error {
  TubeExitError(double t, const std::string& what) : Error(what), exit_time(t) {}
  double exit_time;
};

}  // namespace tube
