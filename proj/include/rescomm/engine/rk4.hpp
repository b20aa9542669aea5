#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "rescomm/error.hpp"

namespace rescomm {

namespace detail {

template <typename Derived>
void require_finite_derivative(const Eigen::MatrixBase<Derived>& k, int stage) {
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    if (!std::isfinite(static_cast<double>(k(i)))) {
      throw NumericError("rk4: non-finite derivative at component " + std::to_string(i) + " (stage " +
                         std::to_string(stage) + ")");
    }
  }
}

}  // namespace detail

/// One classical fourth-order Runge-Kutta step of dy/dt = f(t, y).
///
/// `f` is any callable `(Scalar t, const Vector& y) -> Vector`. The state type
/// is a plain Eigen column vector (fixed or dynamic size); the scalar type is
/// taken from it, so the same routine integrates `double` and `long double`
/// systems.
template <typename Vector, typename F>
Vector rk4_step(F&& f, const Vector& y, typename Vector::Scalar t, typename Vector::Scalar dt) {
  using Scalar = typename Vector::Scalar;
  const Scalar half = dt / Scalar(2);

  const Vector k1 = f(t, y);
  detail::require_finite_derivative(k1, 1);
  const Vector k2 = f(t + half, Vector(y + half * k1));
  detail::require_finite_derivative(k2, 2);
  const Vector k3 = f(t + half, Vector(y + half * k2));
  detail::require_finite_derivative(k3, 3);
  const Vector k4 = f(t + dt, Vector(y + dt * k3));
  detail::require_finite_derivative(k4, 4);

  return y + (dt / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
}

/// Integrates `steps` fixed RK4 steps from t0. Time points are computed as
/// t0 + i*dt rather than accumulated, so the grid is reproducible.
template <typename Vector, typename F>
Vector rk4_integrate(F&& f, Vector y, typename Vector::Scalar t0, typename Vector::Scalar dt, long steps) {
  for (long i = 0; i < steps; ++i) {
    y = rk4_step(f, y, t0 + static_cast<typename Vector::Scalar>(i) * dt, dt);
  }
  return y;
}

}  // namespace rescomm
