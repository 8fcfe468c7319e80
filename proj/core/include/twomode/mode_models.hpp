#pragma once

#include <array>
#include <complex>
#include <functional>
#include <string>
#include <variant>

#include "twomode/momentum.hpp"

namespace twomode {

enum class Mode : int { a = 0, b = 1 };

/// The four Fourier kernels of a mode pair,
///
///   F_xy(q) = \int psi_x^*(r) psi_y(r) exp(-i q.r) dr,   x, y in {a, b}.
///
/// rho_a = F_aa, rho_b = F_bb, F[psi_a^* psi_b] = F_ab, F[psi_b^* psi_a] = F_ba.
/// Every model satisfies conj(F_xy(q)) = F_yx(-q) and F_aa(0) = F_bb(0) = 1.
class ModeKernel {
 public:
  using Evaluator = std::function<std::complex<double>(Mode, Mode, const Momentum&)>;

  ModeKernel(Evaluator evaluator, bool lattice, std::string name);

  std::complex<double> operator()(Mode x, Mode y, const Momentum& q) const { return eval_(x, y, q); }

  std::complex<double> rho_a(const Momentum& q) const { return eval_(Mode::a, Mode::a, q); }
  std::complex<double> rho_b(const Momentum& q) const { return eval_(Mode::b, Mode::b, q); }
  std::complex<double> ab(const Momentum& q) const { return eval_(Mode::a, Mode::b, q); }
  std::complex<double> ba(const Momentum& q) const { return eval_(Mode::b, Mode::a, q); }

  /// Discrete (Fourier-series) momentum support.
  bool lattice() const { return lattice_; }
  const std::string& name() const { return name_; }

 private:
  Evaluator eval_;
  bool lattice_;
  std::string name_;
};

/// psi_a = exp(i k0.r), psi_b = exp(-i k0.r) in a periodic unit box.
struct PlaneWaveModel {
  std::array<int, 3> k0{1, 0, 0};
  int dims = 1;

  Momentum k0_momentum() const { return Momentum(k0[0], k0[1], k0[2]); }
  /// Physical wavenumber |k0| in inverse box lengths (2*pi per lattice unit).
  double fringe_half_wavenumber() const;
};

/// Validates dimensionality (1..3), k0 != 0 and unused components == 0.
PlaneWaveModel make_plane_wave(std::array<int, 3> k0, int dims = 1);

/// Two unit-width Gaussians centred at -alpha (mode a) and +alpha (mode b),
/// freely expanded for time t. Lengths in units of the width, times in
/// units of m sigma^2 / hbar.
struct GaussianModel {
  double alpha = 5.0;
  double t = 50.0;
};

inline constexpr double kQuasiOrthogonalityTolerance = 1e-8;

/// Exact delta kernels; values are 0 or 1 with no rounding.
/// Throws ParameterError for k0 = 0.
ModeKernel plane_wave_kernel(const PlaneWaveModel& model);

/// Throws ParameterError unless alpha > 0 and t >= 0.
ModeKernel gaussian_kernel(const GaussianModel& model);

/// Fringe half-wavevector alpha t / (1 + t^2).
double k0_of_t(const GaussianModel& model);

/// Overlap scale exp(-alpha^2) of the two Gaussian modes.
double orthogonality_report(const GaussianModel& model);

bool is_quasi_orthogonal(const GaussianModel& model, double tolerance = kQuasiOrthogonalityTolerance);

/// Initial (t = 0 when model.t == 0) or evolved mode function psi_x(x, t).
std::complex<double> gaussian_mode(const GaussianModel& model, Mode mode, double x);

using ModeModel = std::variant<PlaneWaveModel, GaussianModel>;

ModeKernel kernel_for(const ModeModel& model);

/// Momentum of the interference side peak: 2 k0 (plane waves) or 2 k0(t).
Momentum fringe_wavevector(const ModeModel& model);

/// Wavenumber entering cos^2(k x + phi) for a real-space pattern.
double fringe_half_wavenumber(const ModeModel& model);

/// |psi_x|^2 at coordinate x along the fringe direction (plane waves: 1).
double mode_density(const ModeModel& model, Mode mode, double x);

std::string describe(const ModeModel& model);

}  // namespace twomode
