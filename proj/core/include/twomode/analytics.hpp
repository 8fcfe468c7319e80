#pragma once

#include <complex>
#include <optional>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "twomode/fock.hpp"
#include "twomode/mode_models.hpp"
#include "twomode/momentum.hpp"

namespace twomode {

using Rational = boost::multiprecision::cpp_rational;

double to_double(const Rational& value);

enum class Provenance { closed, exact, montecarlo };
std::string_view to_string(Provenance p);

// ---------------------------------------------------------------------------
// Ensemble averages of diagonal number-operator polynomials
// ---------------------------------------------------------------------------

enum class SumsMode { exact, closed };

/// S_ij = (1/n) sum_l <l| ... |l> with N_a = N/2 + l, N_b = N/2 - l:
///   S20 = N_a(N_a-1)                 S11 = N_a N_b
///   S40 = N_a(N_a-1)(N_a-2)(N_a-3)   S31 = N_b N_a(N_a-1)(N_a-2)
///   S22 = N_a N_b (N_a-1)(N_b-1)     S30 = N_a(N_a-1)(N_a-2)
///   S21 = N_b N_a (N_a-1)
/// The a <-> b mirrored versions have identical averages.
struct SumsRecord {
  Rational S20, S11, S40, S31, S22, S30, S21;
  SumsMode mode = SumsMode::exact;
};

/// Direct summation over the n admissible indices, in exact arithmetic.
SumsRecord s_sums_exact(const SubspaceSpec& spec);

/// Closed forms. S20 and S11 are exact; the quartic and cubic sums keep the
/// displayed terms and drop the O(N^2) remainder.
SumsRecord s_sums_closed(const SubspaceSpec& spec);

/// Stated width c N^2 of the unmodelled remainder.
double remainder_band(const SubspaceSpec& spec, double c = 1.0);

// ---------------------------------------------------------------------------
// Mean of R(k)
// ---------------------------------------------------------------------------

/// N + (|rho_a|^2 + |rho_b|^2) S20
///   + (rho_a^* rho_b + rho_b^* rho_a + |F_ab(-k)|^2 + |F_ba(-k)|^2) S11.
double mean_R_closed(const SubspaceSpec& spec, const ModeKernel& kernel, const Momentum& k);

/// Plane-wave leading form N^2 delta_{k,0} + (N^2/4 - n^2/12)(delta_{k,-2k0} + delta_{k,2k0}).
double mean_R_plane_wave_closed(const SubspaceSpec& spec, const PlaneWaveModel& model, const Momentum& k);

// ---------------------------------------------------------------------------
// Helper combinations of Fourier kernels and the F_ij functions
// ---------------------------------------------------------------------------

/// Sign of the third momentum in U and V. The printed helpers use
/// rho(k1 + k2); contracting the fields gives rho(-k1 - k2), since the site
/// momenta of every term sum to zero. The two agree for kernels with
/// rho(q) = rho(-q) (plane waves) and differ for displaced Gaussians.
enum class Convention { momentum_conserving, as_printed };

class AppendixHelpers {
 public:
  explicit AppendixHelpers(const ModeKernel& kernel, Convention convention = Convention::momentum_conserving)
      : kernel_(kernel), convention_(convention) {}

  using C = std::complex<double>;

  /// rho_a(k) + rho_b(k)
  C I(const Momentum& k) const;
  /// F_ab(k1) F_ba(k2) + F_ba(k1) F_ab(k2)
  C F(const Momentum& k1, const Momentum& k2) const;
  /// F(k1, k2 - k1) + F(-k1, k2 + k1)
  C G(const Momentum& k1, const Momentum& k2) const;
  /// rho_a(k1) rho_a(k2) + rho_b(k1) rho_b(k2)
  C S(const Momentum& k1, const Momentum& k2) const;
  /// rho_a(k1) rho_b(k2) + rho_b(k1) rho_a(k2)
  C T(const Momentum& k1, const Momentum& k2) const;
  /// T(k1, k2) + F(k1, k2); the single-argument form is R(k, -k).
  C R(const Momentum& k1, const Momentum& k2) const;
  C R(const Momentum& k) const { return R(k, -k); }
  /// rho_a(k1) rho_a(k2) rho_b(k3) + rho_b(k1) rho_b(k2) rho_a(k3), k3 = -(k1+k2)
  C U(const Momentum& k1, const Momentum& k2) const;
  /// rho_a(k1) rho_a(k2) rho_a(k3) + rho_b(k1) rho_b(k2) rho_b(k3), k3 = -(k1+k2)
  C V(const Momentum& k1, const Momentum& k2) const;

 private:
  Momentum third(const Momentum& k1, const Momentum& k2) const {
    return convention_ == Convention::as_printed ? k1 + k2 : -(k1 + k2);
  }

  const ModeKernel& kernel_;
  Convention convention_;
};

struct FFunctions {
  std::complex<double> f40, f31, f22, f30, f21;
};

struct AppendixRecord {
  std::complex<double> I_ab, F_ab, G_ab, S_ab, T_ab, R_ab, U_ab, V_ab;  // at (k, k2), R_ab at k
  FFunctions f;
};

/// With the default convention sum_ij F_ij S_ij is the exact ensemble trace
/// of the degree-8 and degree-6 parts of the Wick-reduced r(k) r(k2).
FFunctions f_functions(const ModeKernel& kernel, const Momentum& k, const Momentum& k2,
                       Convention convention = Convention::momentum_conserving);
AppendixRecord appendix_functions(const ModeKernel& kernel, const Momentum& k, const Momentum& k2,
                                  Convention convention = Convention::momentum_conserving);

// ---------------------------------------------------------------------------
// Covariances
// ---------------------------------------------------------------------------

struct EnsembleCovClosed {
  double diag = 0.0;
  double off = 0.0;
  double total() const { return diag + off; }
};

/// Leading diagonal part
///   N^2 n/12 (|rho_a(k)|^2 - |rho_b(k)|^2)(|rho_a(k2)|^2 - |rho_b(k2)|^2)
///   + n^3/180 D(k) D(k2),
/// with D(k) the coefficient of l^2 in <l|r(k)|l>, and the leading
/// off-diagonal bracket N^4/(16 n)[...].
EnsembleCovClosed ensemble_cov_closed(const SubspaceSpec& spec, const ModeKernel& kernel, const Momentum& k,
                                      const Momentum& k2);

/// The interference coefficient D(k) = |rho_a|^2 + |rho_b|^2
///   - (rho_a^* rho_b + rho_b^* rho_a + |F_ab(-k)|^2 + |F_ba(-k)|^2).
double diagonal_curvature(const ModeKernel& kernel, const Momentum& k);

struct QuantumCovClosedParts {
  double f_sum = 0.0;         // sum_ij F_ij S_ij
  double mean_product = 0.0;  // rbar(k) rbar(k2)
  double ensemble = 0.0;      // ensemble_cov_closed
  double total() const { return f_sum - mean_product - ensemble; }
};

QuantumCovClosedParts quantum_cov_closed_parts(const SubspaceSpec& spec, const ModeKernel& kernel,
                                               const Momentum& k, const Momentum& k2);

double quantum_cov_closed(const SubspaceSpec& spec, const ModeKernel& kernel, const Momentum& k,
                          const Momentum& k2);

/// delta-kernel factor delta_{k,-2k0} + delta_{k,2k0}.
double plane_wave_side_peaks(const PlaneWaveModel& model, const Momentum& k);

/// n^3/180 times the side-peak factors.
double ensemble_cov_plane_wave_closed(const SubspaceSpec& spec, const PlaneWaveModel& model, const Momentum& k,
                                      const Momentum& k2);

/// (N^3/4 - N n^2/12 + (n^4 - n^3)/180) times the side-peak factors.
double quantum_cov_plane_wave_closed(const SubspaceSpec& spec, const PlaneWaveModel& model, const Momentum& k,
                                     const Momentum& k2);

// ---------------------------------------------------------------------------
// Expanding Gaussians, large-time forms
// ---------------------------------------------------------------------------

struct GaussianCoefficients {
  double c30 = 0.0;
  double c12 = 0.0;
  double c04 = 0.0;
  double c03 = 0.0;
};

/// C_30, C_12, C_04, C_03 in their large-time form (t^2 for 1 + t^2).
GaussianCoefficients gaussian_coefficients(const GaussianModel& model, double k, double k2);

/// N^2 { e^{-t^2 k^2/2} + 1/4 [e^{-t^2 (k+2k0)^2/2} + e^{-t^2 (k-2k0)^2/2}] }.
double gaussian_mean_large_time(const SubspaceSpec& spec, const GaussianModel& model, double k);

/// N^2/4 [ |I_ab(k)|^2 + |F_ab(k)|^2 + |F_ba(k)|^2 ] with the exact kernels.
double gaussian_mean_leading(const SubspaceSpec& spec, const GaussianModel& model, double k);

double gaussian_ensemble_cov_large_time(const SubspaceSpec& spec, const GaussianModel& model, double k,
                                        double k2);

double gaussian_quantum_cov_large_time(const SubspaceSpec& spec, const GaussianModel& model, double k,
                                       double k2);

/// k in [-4 k0(t) - 8/t, 4 k0(t) + 8/t]; requires t > 0.
std::vector<double> gaussian_default_grid(const GaussianModel& model, std::size_t points = 2048);

enum class Evaluation { exact_kernel, large_time };

struct CovBreakdown {
  double diag = 0.0;
  double off = 0.0;
  GaussianCoefficients c;
};

struct CovReport {
  Momentum k;
  double mean = 0.0;
  double ensemble_cov = 0.0;
  double quantum_cov_avg = 0.0;
  std::optional<CovBreakdown> breakdown;
  Provenance provenance = Provenance::closed;

  double total_fluctuation() const { return ensemble_cov + quantum_cov_avg; }
};

/// Mean, ensemble variance and averaged quantum variance on a k grid.
/// exact_kernel: finite-N kernel-level closed forms. large_time: the
/// three-Gaussian mean, the Gaussian ensemble variance and the C-expansion.
std::vector<CovReport> gaussian_closed_set(const SubspaceSpec& spec, const GaussianModel& model,
                                           const std::vector<double>& grid, Evaluation evaluation);

/// Figure 1 curve: large-N mean divided by N^2 with the exact kernels.
std::vector<double> figure1_curve(const GaussianModel& model, const std::vector<double>& grid);

enum class VarianceRegime { small_n, large_n };

/// Figure 2 slice of the dominant variance term at fixed k2 (default
/// 2 k0(t)): C30(k,k2) N^3 when n << N^{3/4}, C04(k,k2) n^4 when n >> N^{3/4}.
/// Along the diagonal k = k2 the C30 term also has a maximum at |k| ~ 1/t
/// from central-peak number fluctuations.
std::vector<double> figure2_slice(const SubspaceSpec& spec, const GaussianModel& model,
                                  const std::vector<double>& grid, VarianceRegime regime,
                                  std::optional<double> k2 = std::nullopt);

/// (N/2)(|psi_a|^2 + |psi_b|^2) at each position.
std::vector<double> average_density(const ModeModel& model, const std::vector<double>& positions, int total);

}  // namespace twomode
