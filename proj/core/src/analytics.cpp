#include "twomode/analytics.hpp"

#include <cmath>

#include "twomode/error.hpp"

namespace twomode {

double to_double(const Rational& value) { return value.convert_to<double>(); }

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::closed:
      return "closed";
    case Provenance::exact:
      return "exact";
    case Provenance::montecarlo:
      return "montecarlo";
  }
  return "unknown";
}

SumsRecord s_sums_exact(const SubspaceSpec& spec) {
  using boost::multiprecision::cpp_int;
  cpp_int s20, s11, s40, s31, s22, s30, s21;
  for (int l = spec.min_index(); l <= spec.max_index(); ++l) {
    const cpp_int a = spec.occupation_a(l);
    const cpp_int b = spec.occupation_b(l);
    s20 += a * (a - 1);
    s11 += a * b;
    s40 += a * (a - 1) * (a - 2) * (a - 3);
    s31 += b * a * (a - 1) * (a - 2);
    s22 += a * b * (a - 1) * (b - 1);
    s30 += a * (a - 1) * (a - 2);
    s21 += b * a * (a - 1);
  }
  const cpp_int n = spec.dim();
  SumsRecord r;
  r.S20 = Rational(s20, n);
  r.S11 = Rational(s11, n);
  r.S40 = Rational(s40, n);
  r.S31 = Rational(s31, n);
  r.S22 = Rational(s22, n);
  r.S30 = Rational(s30, n);
  r.S21 = Rational(s21, n);
  r.mode = SumsMode::exact;
  return r;
}

SumsRecord s_sums_closed(const SubspaceSpec& spec) {
  const Rational N = spec.total();
  const Rational n = spec.dim();
  const Rational N2 = N * N, N3 = N2 * N, N4 = N3 * N;
  const Rational n2 = n * n, n4 = n2 * n2;
  SumsRecord r;
  r.S20 = (N2 - 2 * N) / 4 + (n2 - 1) / 12;
  r.S11 = N2 / 4 - (n2 - 1) / 12;
  r.S40 = (N4 - 12 * N3) / 16 + n4 / 80 + (N2 - 6 * N) * n2 / 8;
  r.S31 = (N4 - 6 * N3) / 16 - n4 / 80 + N * n2 / 8;
  r.S22 = (N4 - 4 * N3) / 16 + n4 / 80 - (N2 - 2 * N) * n2 / 24;
  r.S30 = (N3 + N * n2) / 8;
  r.S21 = (3 * N3 - N * n2) / 24;
  r.mode = SumsMode::closed;
  return r;
}

double remainder_band(const SubspaceSpec& spec, double c) {
  const double N = spec.total();
  return c * N * N;
}

namespace {

double interference_coefficient(const ModeKernel& kernel, const Momentum& k) {
  const auto ra = kernel.rho_a(k);
  const auto rb = kernel.rho_b(k);
  return (std::conj(ra) * rb + std::conj(rb) * ra).real() + std::norm(kernel.ab(-k)) + std::norm(kernel.ba(-k));
}

double same_mode_coefficient(const ModeKernel& kernel, const Momentum& k) {
  return std::norm(kernel.rho_a(k)) + std::norm(kernel.rho_b(k));
}

}  // namespace

double mean_R_closed(const SubspaceSpec& spec, const ModeKernel& kernel, const Momentum& k) {
  const auto sums = s_sums_closed(spec);
  return spec.total() + same_mode_coefficient(kernel, k) * to_double(sums.S20) +
         interference_coefficient(kernel, k) * to_double(sums.S11);
}

double plane_wave_side_peaks(const PlaneWaveModel& model, const Momentum& k) {
  const Momentum two_k0 = 2.0 * model.k0_momentum();
  return (k == two_k0 ? 1.0 : 0.0) + (k == -two_k0 ? 1.0 : 0.0);
}

double mean_R_plane_wave_closed(const SubspaceSpec& spec, const PlaneWaveModel& model, const Momentum& k) {
  const double N = spec.total();
  const double n = spec.dim();
  const double centre = k == Momentum{} ? N * N : 0.0;
  return centre + (N * N / 4.0 - n * n / 12.0) * plane_wave_side_peaks(model, k);
}

// ---------------------------------------------------------------------------

using C = std::complex<double>;

C AppendixHelpers::I(const Momentum& k) const { return kernel_.rho_a(k) + kernel_.rho_b(k); }

C AppendixHelpers::F(const Momentum& k1, const Momentum& k2) const {
  return kernel_.ab(k1) * kernel_.ba(k2) + kernel_.ba(k1) * kernel_.ab(k2);
}

C AppendixHelpers::G(const Momentum& k1, const Momentum& k2) const { return F(k1, k2 - k1) + F(-k1, k2 + k1); }

C AppendixHelpers::S(const Momentum& k1, const Momentum& k2) const {
  return kernel_.rho_a(k1) * kernel_.rho_a(k2) + kernel_.rho_b(k1) * kernel_.rho_b(k2);
}

C AppendixHelpers::T(const Momentum& k1, const Momentum& k2) const {
  return kernel_.rho_a(k1) * kernel_.rho_b(k2) + kernel_.rho_b(k1) * kernel_.rho_a(k2);
}

C AppendixHelpers::R(const Momentum& k1, const Momentum& k2) const { return T(k1, k2) + F(k1, k2); }

C AppendixHelpers::U(const Momentum& k1, const Momentum& k2) const {
  return kernel_.rho_a(k1) * kernel_.rho_a(k2) * kernel_.rho_b(third(k1, k2)) +
         kernel_.rho_b(k1) * kernel_.rho_b(k2) * kernel_.rho_a(third(k1, k2));
}

C AppendixHelpers::V(const Momentum& k1, const Momentum& k2) const {
  return kernel_.rho_a(k1) * kernel_.rho_a(k2) * kernel_.rho_a(third(k1, k2)) +
         kernel_.rho_b(k1) * kernel_.rho_b(k2) * kernel_.rho_b(third(k1, k2));
}

FFunctions f_functions(const ModeKernel& kernel, const Momentum& k, const Momentum& kp, Convention convention) {
  const AppendixHelpers h(kernel, convention);
  const Momentum mk = -k, mkp = -kp;
  FFunctions f;
  f.f40 = std::norm(kernel.rho_a(k) * kernel.rho_a(kp)) + std::norm(kernel.rho_b(k) * kernel.rho_b(kp));
  f.f31 = h.R(k) * h.S(kp, mkp) + h.S(k, mk) * h.R(kp) + h.S(k, kp) * h.F(mk, mkp) + h.S(mk, kp) * h.F(k, mkp) +
          h.S(k, mkp) * h.F(mk, kp) + h.S(mk, mkp) * h.F(k, kp);
  f.f22 = std::norm(kernel.rho_a(k) * kernel.rho_b(kp)) + std::norm(kernel.rho_b(k) * kernel.rho_a(kp)) +
          h.R(k) * h.R(kp) + h.T(k, kp) * h.F(mk, mkp) + h.T(k, mkp) * h.F(mk, kp) + h.T(mk, kp) * h.F(k, mkp) +
          h.T(mk, mkp) * h.F(k, kp) + kernel.ab(k) * kernel.ab(mk) * kernel.ba(kp) * kernel.ba(mkp) +
          kernel.ba(k) * kernel.ba(mk) * kernel.ab(kp) * kernel.ab(mkp);
  f.f30 = h.V(k, kp) + h.V(k, mkp) + h.V(mk, kp) + h.V(mk, mkp);
  f.f21 = h.I(k) * h.G(kp, mk) + h.I(mk) * h.G(kp, k) + h.I(kp) * h.G(k, mkp) + h.I(mkp) * h.G(k, kp) +
          h.I(k + kp) * h.R(mk, mkp) + h.I(k - kp) * h.R(k, mkp) + h.I(kp - k) * h.R(mk, kp) +
          h.I(mk - kp) * h.R(k, kp) + h.U(k, kp) + h.U(k, mkp) + h.U(mk, kp) + h.U(mk, mkp);
  return f;
}

AppendixRecord appendix_functions(const ModeKernel& kernel, const Momentum& k, const Momentum& k2,
                                  Convention convention) {
  const AppendixHelpers h(kernel, convention);
  AppendixRecord r;
  r.I_ab = h.I(k);
  r.F_ab = h.F(k, k2);
  r.G_ab = h.G(k, k2);
  r.S_ab = h.S(k, k2);
  r.T_ab = h.T(k, k2);
  r.R_ab = h.R(k);
  r.U_ab = h.U(k, k2);
  r.V_ab = h.V(k, k2);
  r.f = f_functions(kernel, k, k2, convention);
  return r;
}

// ---------------------------------------------------------------------------

double diagonal_curvature(const ModeKernel& kernel, const Momentum& k) {
  return same_mode_coefficient(kernel, k) - interference_coefficient(kernel, k);
}

EnsembleCovClosed ensemble_cov_closed(const SubspaceSpec& spec, const ModeKernel& kernel, const Momentum& k,
                                      const Momentum& kp) {
  const double N = spec.total();
  const double n = spec.dim();
  const double asym = std::norm(kernel.rho_a(k)) - std::norm(kernel.rho_b(k));
  const double asym_p = std::norm(kernel.rho_a(kp)) - std::norm(kernel.rho_b(kp));
  EnsembleCovClosed out;
  out.diag = N * N * n / 12.0 * asym * asym_p +
             n * n * n / 180.0 * diagonal_curvature(kernel, k) * diagonal_curvature(kernel, kp);

  const AppendixHelpers h(kernel);
  const Momentum mk = -k, mkp = -kp;
  const C bracket = kernel.ba(k) * kernel.ba(mk) * kernel.ab(kp) * kernel.ab(mkp) +
                    (kernel.ba(mk) * h.I(k) + h.I(mk) * kernel.ba(k)) *
                        (kernel.ab(mkp) * h.I(kp) + h.I(mkp) * kernel.ab(kp));
  out.off = N * N * N * N / (16.0 * n) * 2.0 * bracket.real();
  return out;
}

QuantumCovClosedParts quantum_cov_closed_parts(const SubspaceSpec& spec, const ModeKernel& kernel,
                                               const Momentum& k, const Momentum& kp) {
  const auto sums = s_sums_closed(spec);
  const auto f = f_functions(kernel, k, kp);
  QuantumCovClosedParts parts;
  parts.f_sum = (f.f40 * to_double(sums.S40) + f.f31 * to_double(sums.S31) + f.f22 * to_double(sums.S22) +
                 f.f30 * to_double(sums.S30) + f.f21 * to_double(sums.S21))
                    .real();
  const double N = spec.total();
  parts.mean_product = (mean_R_closed(spec, kernel, k) - N) * (mean_R_closed(spec, kernel, kp) - N);
  parts.ensemble = ensemble_cov_closed(spec, kernel, k, kp).total();
  return parts;
}

double quantum_cov_closed(const SubspaceSpec& spec, const ModeKernel& kernel, const Momentum& k,
                          const Momentum& k2) {
  return quantum_cov_closed_parts(spec, kernel, k, k2).total();
}

double ensemble_cov_plane_wave_closed(const SubspaceSpec& spec, const PlaneWaveModel& model, const Momentum& k,
                                      const Momentum& k2) {
  const double n = spec.dim();
  return n * n * n / 180.0 * plane_wave_side_peaks(model, k) * plane_wave_side_peaks(model, k2);
}

double quantum_cov_plane_wave_closed(const SubspaceSpec& spec, const PlaneWaveModel& model, const Momentum& k,
                                     const Momentum& k2) {
  const double N = spec.total();
  const double n = spec.dim();
  const double coefficient = N * N * N / 4.0 - N * n * n / 12.0 + (n * n * n * n - n * n * n) / 180.0;
  return coefficient * plane_wave_side_peaks(model, k) * plane_wave_side_peaks(model, k2);
}

// ---------------------------------------------------------------------------

namespace {

// exp(-a) sinh^2(b) without overflowing the intermediate sinh.
double damped_sinh2(double a, double b) {
  return (std::exp(2.0 * b - a) + std::exp(-2.0 * b - a) - 2.0 * std::exp(-a)) / 4.0;
}

struct LargeTime {
  double t2;
  double k0;

  double side(double k, double sign) const {
    const double d = k + sign * 2.0 * k0;
    return std::exp(-t2 / 2.0 * d * d);
  }
  double sides(double k) const { return side(k, 1.0) + side(k, -1.0); }
};

LargeTime large_time(const GaussianModel& model) {
  if (!(model.alpha > 0.0)) throw ParameterError("alpha", "alpha must be positive");
  if (!(model.t >= 0.0)) throw ParameterError("t", "t must be non-negative");
  return {model.t * model.t, k0_of_t(model)};
}

}  // namespace

GaussianCoefficients gaussian_coefficients(const GaussianModel& model, double k, double kp) {
  const LargeTime lt = large_time(model);
  const double T = lt.t2;
  const double k0 = lt.k0;
  const double kp_plus = kp + 2.0 * k0, kp_minus = kp - 2.0 * k0;
  const double k_plus = k + 2.0 * k0, k_minus = k - 2.0 * k0;

  const double central = 8.0 * damped_sinh2(T / 2.0 * (k * k + kp * kp), T * k * kp / 4.0);
  double c30 = central;
  c30 -= 0.25 * lt.sides(k) * lt.sides(kp);
  c30 += 2.0 * (damped_sinh2(T / 2.0 * (k * k + kp_plus * kp_plus), T * k * kp_plus / 4.0) +
                damped_sinh2(T / 2.0 * (k * k + kp_minus * kp_minus), T * k * kp_minus / 4.0));
  c30 += 2.0 * (damped_sinh2(T / 2.0 * (kp * kp + k_plus * k_plus), T * kp * k_plus / 4.0) +
                damped_sinh2(T / 2.0 * (kp * kp + k_minus * k_minus), T * kp * k_minus / 4.0));
  const double diff2 = (k - kp) * (k - kp);
  const double sum2 = (k + kp) * (k + kp);
  c30 += 0.5 * (std::exp(-T / 2.0 * (diff2 + k_plus * kp_plus)) + std::exp(-T / 2.0 * (diff2 + k_minus * kp_minus)));
  c30 += 0.5 * (std::exp(-T / 2.0 * (sum2 - k_minus * kp_plus)) + std::exp(-T / 2.0 * (sum2 - k_plus * kp_minus)));

  GaussianCoefficients c;
  c.c30 = c30;
  c.c12 = (central - c30) / 3.0;
  c.c04 = lt.sides(k) * lt.sides(kp) / 180.0;
  c.c03 = -c.c04;
  return c;
}

double gaussian_mean_large_time(const SubspaceSpec& spec, const GaussianModel& model, double k) {
  const LargeTime lt = large_time(model);
  const double N = spec.total();
  return N * N * (std::exp(-lt.t2 / 2.0 * k * k) + 0.25 * lt.sides(k));
}

namespace {

double leading_mean_ratio(const ModeKernel& kernel, double k) {
  const Momentum q(k);
  return 0.25 * (std::norm(kernel.rho_a(q) + kernel.rho_b(q)) + std::norm(kernel.ab(q)) + std::norm(kernel.ba(q)));
}

}  // namespace

double gaussian_mean_leading(const SubspaceSpec& spec, const GaussianModel& model, double k) {
  const double N = spec.total();
  return N * N * leading_mean_ratio(gaussian_kernel(model), k);
}

double gaussian_ensemble_cov_large_time(const SubspaceSpec& spec, const GaussianModel& model, double k,
                                        double k2) {
  const LargeTime lt = large_time(model);
  const double n = spec.dim();
  return n * n * n / 180.0 * lt.sides(k) * lt.sides(k2);
}

double gaussian_quantum_cov_large_time(const SubspaceSpec& spec, const GaussianModel& model, double k,
                                       double k2) {
  const auto c = gaussian_coefficients(model, k, k2);
  const double N = spec.total();
  const double n = spec.dim();
  return c.c30 * N * N * N + c.c12 * N * n * n + c.c04 * n * n * n * n + c.c03 * n * n * n;
}

std::vector<double> gaussian_default_grid(const GaussianModel& model, std::size_t points) {
  if (!(model.t > 0.0)) throw ParameterError("t", "the default grid needs t > 0");
  if (points < 2) throw ParameterError("points", "grid needs at least two points");
  const double half = 4.0 * k0_of_t(model) + 8.0 / model.t;
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = -half + 2.0 * half * static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

std::vector<CovReport> gaussian_closed_set(const SubspaceSpec& spec, const GaussianModel& model,
                                           const std::vector<double>& grid, Evaluation evaluation) {
  const ModeKernel kernel = gaussian_kernel(model);
  std::vector<CovReport> out;
  out.reserve(grid.size());
  for (double kv : grid) {
    const Momentum k(kv);
    CovReport r;
    r.k = k;
    r.provenance = Provenance::closed;
    CovBreakdown b;
    b.c = gaussian_coefficients(model, kv, kv);
    if (evaluation == Evaluation::exact_kernel) {
      r.mean = mean_R_closed(spec, kernel, k);
      const auto ens = ensemble_cov_closed(spec, kernel, k, k);
      b.diag = ens.diag;
      b.off = ens.off;
      r.ensemble_cov = ens.total();
      r.quantum_cov_avg = quantum_cov_closed(spec, kernel, k, k);
    } else {
      r.mean = gaussian_mean_large_time(spec, model, kv);
      r.ensemble_cov = gaussian_ensemble_cov_large_time(spec, model, kv, kv);
      b.diag = r.ensemble_cov;
      r.quantum_cov_avg = gaussian_quantum_cov_large_time(spec, model, kv, kv);
    }
    r.breakdown = b;
    out.push_back(r);
  }
  return out;
}

std::vector<double> figure1_curve(const GaussianModel& model, const std::vector<double>& grid) {
  const ModeKernel kernel = gaussian_kernel(model);
  std::vector<double> out;
  out.reserve(grid.size());
  for (double k : grid) out.push_back(leading_mean_ratio(kernel, k));
  return out;
}

std::vector<double> figure2_slice(const SubspaceSpec& spec, const GaussianModel& model,
                                  const std::vector<double>& grid, VarianceRegime regime,
                                  std::optional<double> k2) {
  const double fixed = k2.value_or(2.0 * k0_of_t(model));
  const double N = spec.total();
  const double n = spec.dim();
  std::vector<double> out;
  out.reserve(grid.size());
  for (double k : grid) {
    const auto c = gaussian_coefficients(model, k, fixed);
    out.push_back(regime == VarianceRegime::small_n ? c.c30 * N * N * N : c.c04 * n * n * n * n);
  }
  return out;
}

std::vector<double> average_density(const ModeModel& model, const std::vector<double>& positions, int total) {
  std::vector<double> out;
  out.reserve(positions.size());
  for (double x : positions)
    out.push_back(0.5 * total * (mode_density(model, Mode::a, x) + mode_density(model, Mode::b, x)));
  return out;
}

}  // namespace twomode
