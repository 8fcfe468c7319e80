#pragma once

#include <array>
#include <cmath>

namespace twomode {

/// Wavevector with up to three Cartesian components.
///
/// Plane-wave momenta are integer lattice vectors (units of 2*pi per box
/// side); Gaussian-model momenta are one-dimensional reals in units of the
/// inverse mode width and only use x().
struct Momentum {
  std::array<double, 3> v{0.0, 0.0, 0.0};

  constexpr Momentum() = default;
  constexpr explicit Momentum(double x, double y = 0.0, double z = 0.0) : v{x, y, z} {}

  constexpr double x() const { return v[0]; }
  constexpr double y() const { return v[1]; }
  constexpr double z() const { return v[2]; }

  double norm() const { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

  constexpr Momentum operator-() const { return Momentum(-v[0], -v[1], -v[2]); }

  constexpr Momentum& operator+=(const Momentum& o) {
    for (int i = 0; i < 3; ++i) v[i] += o.v[i];
    return *this;
  }
  constexpr Momentum& operator-=(const Momentum& o) {
    for (int i = 0; i < 3; ++i) v[i] -= o.v[i];
    return *this;
  }

  friend constexpr Momentum operator+(Momentum a, const Momentum& b) { return a += b; }
  friend constexpr Momentum operator-(Momentum a, const Momentum& b) { return a -= b; }
  friend constexpr Momentum operator*(double s, const Momentum& m) {
    return Momentum(s * m.v[0], s * m.v[1], s * m.v[2]);
  }
  friend constexpr bool operator==(const Momentum&, const Momentum&) = default;
};

}  // namespace twomode
