#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

// Closed-form Green function of the half Laplacian on I = (-1,1) with the
// exterior condition u == 0 on R \ I, together with its regular (Robin) part
// and the first derivatives the rest of the code needs.  Everything here is
// a pure function of its arguments and safe to call concurrently.

namespace sinhp {

inline constexpr double pi = std::numbers::pi;

namespace detail {

// sqrt(1 - a^2) in the factored form sqrt((1-a)(1+a)); keeps full relative
// accuracy when |a| is close to 1.
template <class Scalar>
Scalar sqrt_1mx2(Scalar a) {
  return std::sqrt((Scalar(1) - a) * (Scalar(1) + a));
}

template <class Scalar>
void require_interior_pole(Scalar xi, const char* who) {
  if (!(std::abs(xi) < Scalar(1)))
    throw std::domain_error(std::string(who) + ": pole xi must lie in (-1,1)");
}

}  // namespace detail

// G(xi, x): Green function with pole xi in (-1,1).  Exactly 0 for |x| >= 1
// (the exterior condition is definitional, not a limit).  Symmetric in its
// two arguments; singular on the diagonal.
template <class Scalar>
Scalar green(Scalar xi, Scalar x) {
  detail::require_interior_pole(xi, "green");
  if (std::abs(x) >= Scalar(1)) return Scalar(0);
  if (x == xi) throw std::domain_error("green: evaluation at the pole x == xi");
  const Scalar s = detail::sqrt_1mx2(xi) * detail::sqrt_1mx2(x);
  return std::log((Scalar(1) - xi * x + s) / std::abs(x - xi)) / Scalar(pi);
}

// H(xi, x): regular part of G, evaluated through its own closed form
// (1/pi) log(1 - xi x + sqrt((1-xi^2)(1-x^2))) so there is no cancellation
// against the log singularity as x -> xi.  On the diagonal this reduces to
// (1/pi) log(2 (1-xi^2)).
template <class Scalar>
Scalar robin(Scalar xi, Scalar x) {
  detail::require_interior_pole(xi, "robin");
  if (std::abs(x) > Scalar(1))
    throw std::domain_error("robin: x must lie in [-1,1]");
  const Scalar s = detail::sqrt_1mx2(xi) * detail::sqrt_1mx2(x);
  return std::log(Scalar(1) - xi * x + s) / Scalar(pi);
}

struct GreenPair {
  double g;  // G(xi, x)
  double h;  // H(xi, x)
};

inline GreenPair green_pair(double xi, double x) {
  return {green(xi, x), robin(xi, x)};
}

// d/dx G(xi, x) = -(1/pi) sqrt(1-xi^2) / ((x-xi) sqrt(1-x^2)); positive left
// of the pole, negative right of it.
template <class Scalar>
Scalar green_dx(Scalar xi, Scalar x) {
  detail::require_interior_pole(xi, "green_dx");
  if (!(std::abs(x) < Scalar(1)))
    throw std::domain_error("green_dx: x must lie in (-1,1)");
  if (x == xi) throw std::domain_error("green_dx: evaluation at the pole x == xi");
  return -detail::sqrt_1mx2(xi) / ((x - xi) * detail::sqrt_1mx2(x)) / Scalar(pi);
}

// d/dxi H(xi, x).  Two branches: the interior formula for |x| < 1 and
// (1/pi) / (xi - x) for |x| >= 1 (they agree in the limit |x| -> 1).
template <class Scalar>
Scalar robin_dxi(Scalar xi, Scalar x) {
  detail::require_interior_pole(xi, "robin_dxi");
  if (std::abs(x) >= Scalar(1)) return (Scalar(1) / (xi - x)) / Scalar(pi);
  const Scalar rxi = detail::sqrt_1mx2(xi);
  const Scalar rx = detail::sqrt_1mx2(x);
  return -((x + xi * rx / rxi) / (Scalar(1) - x * xi + rxi * rx)) / Scalar(pi);
}

}  // namespace sinhp
