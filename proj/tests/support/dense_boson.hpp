#pragma once

// Dense-matrix oracles for the ladder algebra and a first-quantized N = 2
// oracle for the Wick engine. Nothing here calls into the library's
// normal-ordering or contraction code.

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "twomode/ladder.hpp"
#include "twomode/mode_models.hpp"

namespace dense {

using Mat = Eigen::MatrixXcd;

/// Single-mode annihilator on occupations 0..cutoff.
inline Mat annihilator(int cutoff) {
  Mat a = Mat::Zero(cutoff + 1, cutoff + 1);
  for (int m = 1; m <= cutoff; ++m) a(m - 1, m) = std::sqrt(static_cast<double>(m));
  return a;
}

inline Mat kron(const Mat& x, const Mat& y) {
  Mat out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return out;
}

inline Mat power(const Mat& m, int p) {
  Mat out = Mat::Identity(m.rows(), m.cols());
  for (int i = 0; i < p; ++i) out = out * m;
  return out;
}

/// Two modes, each truncated at `cutoff` quanta; basis index na*(cutoff+1)+nb.
struct TwoMode {
  int cutoff;
  Mat a, b, ad, bd;

  explicit TwoMode(int c) : cutoff(c) {
    const Mat one = Mat::Identity(c + 1, c + 1);
    const Mat s = annihilator(c);
    a = kron(s, one);
    b = kron(one, s);
    ad = a.adjoint();
    bd = b.adjoint();
  }

  Eigen::Index index(int na, int nb) const { return na * (cutoff + 1) + nb; }

  Mat monomial(const twomode::LadderMonomial& m) const {
    return power(ad, m.p) * power(bd, m.q) * power(a, m.r) * power(b, m.s);
  }

  Mat poly(const twomode::OperatorPoly& p) const {
    Mat out = Mat::Zero(a.rows(), a.cols());
    for (const auto& [m, c] : p.terms()) out += c * monomial(m);
    return out;
  }
};

/// Orthonormal pair phi_0, phi_1 (harmonic-oscillator states) with kernels
/// from their analytic Fourier transforms.
inline double phi(int which, double x) {
  const double g = std::exp(-x * x / 2.0) / std::pow(std::numbers::pi, 0.25);
  return which == 0 ? g : std::sqrt(2.0) * x * g;
}

inline twomode::ModeKernel hermite_kernel() {
  using twomode::Mode;
  return twomode::ModeKernel(
      [](Mode x, Mode y, const twomode::Momentum& q) -> std::complex<double> {
        const double k = q.x();
        const double e = std::exp(-k * k / 4.0);
        if (x == Mode::a && y == Mode::a) return e;
        if (x == Mode::b && y == Mode::b) return (1.0 - k * k / 2.0) * e;
        return std::complex<double>(0.0, -k / std::sqrt(2.0)) * e;
      },
      false, "hermite");
}

/// First-quantized two-particle oracle for the Hermite pair. Amplitudes are
/// (z_{-1}, z_0, z_1) for occupations (0,2), (1,1), (2,0). Returns <R(k)>
/// and <R(k) R(k2)> with R(k) = |sum_j exp(-i k x_j)|^2 = 2 + 2 cos(k (x1 - x2)).
struct TwoParticleMoments {
  double mean_k = 0.0;
  double mean_k2 = 0.0;
  double product = 0.0;
};

inline TwoParticleMoments two_particle_moments(const std::complex<double> z[3], double k, double k2) {
  const int points = 241;
  const double lim = 9.0;
  const double h = 2.0 * lim / (points - 1);
  TwoParticleMoments out;
  for (int i = 0; i < points; ++i) {
    const double x1 = -lim + i * h;
    for (int j = 0; j < points; ++j) {
      const double x2 = -lim + j * h;
      const std::complex<double> psi = z[2] * phi(0, x1) * phi(0, x2) +
                                       z[1] * (phi(0, x1) * phi(1, x2) + phi(1, x1) * phi(0, x2)) / std::sqrt(2.0) +
                                       z[0] * phi(1, x1) * phi(1, x2);
      const double w = std::norm(psi) * h * h;
      const double r1 = 2.0 + 2.0 * std::cos(k * (x1 - x2));
      const double r2 = 2.0 + 2.0 * std::cos(k2 * (x1 - x2));
      out.mean_k += w * r1;
      out.mean_k2 += w * r2;
      out.product += w * r1 * r2;
    }
  }
  return out;
}

}  // namespace dense
