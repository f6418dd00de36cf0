#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace petalkit {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double inf = std::numeric_limits<double>::infinity();
inline constexpr cplx I{0.0, 1.0};

// Points closer than this to a domain boundary are rejected.
inline constexpr double boundary_eps = 1e-12;

/// Input outside the domain of an operation.
struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

/// Iteration, fitting or integration that did not converge.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed user input (schema, parameter ranges).
struct input_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Estimate that could not be stabilized within budget.
struct indeterminate_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Geometry that does not match any admissible petal shape.
struct classification_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Principal representative of an angle in [-pi, pi).
inline double wrap_angle(double a) {
  double r = std::fmod(a + pi, 2 * pi);
  if (r < 0) r += 2 * pi;
  return r - pi;
}

/// Square root with values in the closed upper half-plane; real inputs
/// take the sign of `side` (used to pick the boundary branch).
inline cplx sqrt_upper(cplx t, double side) {
  cplx s = std::sqrt(t);
  if (s.imag() < 0 || (s.imag() == 0 && side < 0)) s = -s;
  return s;
}

inline double harmonic(int n) {
  double s = 0;
  for (int m = n; m >= 1; --m) s += 1.0 / m;
  return s;
}

}  // namespace petalkit
