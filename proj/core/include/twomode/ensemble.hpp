#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "twomode/analytics.hpp"
#include "twomode/fock.hpp"
#include "twomode/mode_models.hpp"

namespace twomode {

struct ExperimentConfig {
  SubspaceSpec spec;
  ModeModel model;
  std::vector<Momentum> k_grid;
  std::size_t samples = 0;
  std::optional<std::uint64_t> seed;  // required
  double tolerance_se = 5.0;
  int batches = 32;

  /// Throws ParameterError naming the offending field.
  void validate() const;
};

/// Value with its uncertainty: a standard error (Monte Carlo), the stated
/// remainder band (closed forms) or zero (exact traces).
struct StatQuantity {
  double value = 0.0;
  double uncertainty = 0.0;
};

struct StatPoint {
  Momentum k;
  StatQuantity mean;             // ensemble mean of R(k)
  StatQuantity ensemble_cov;     // (delta R)^2
  StatQuantity quantum_cov_avg;  // average of (Delta R)^2
  StatQuantity total_cov;        // tr(rho R^2) - tr(rho R)^2
};

struct StatReport {
  SubspaceSpec spec;
  Provenance provenance = Provenance::exact;
  std::vector<StatPoint> points;
  std::size_t samples = 0;  // Monte Carlo only
};

/// Monte Carlo over sampled states. For every state and grid point R(k) and
/// <R(k)^2> are evaluated exactly; the report holds the across-state mean
/// and variance of R and the mean within-state quantum variance.
/// Uncertainties are batch-means standard errors, floored at 1e-12 of the
/// quantity scale. Bit-reproducible for a given seed regardless of thread count.
StatReport run_ensemble(const ExperimentConfig& config);

/// Exact traces against rho_N on the grid.
StatReport exact_report(const SubspaceSpec& spec, const ModeModel& model, const std::vector<Momentum>& grid);

enum class ClosedVariant {
  model_leading,  // plane-wave delta forms or Gaussian large-time forms
  kernel_general  // finite-N kernel-level forms
};

/// Closed forms on the grid, uncertainty = remainder_band(spec, band_scale).
StatReport closed_report(const SubspaceSpec& spec, const ModeModel& model, const std::vector<Momentum>& grid,
                         ClosedVariant variant = ClosedVariant::model_leading, double band_scale = 1.0);

struct ComparisonTolerances {
  double se_units = 5.0;    // threshold when a Monte Carlo report is involved
  double band_units = 1.0;  // threshold when a closed-form report is involved
};

struct Deviation {
  std::size_t index = 0;
  std::string quantity;
  double absolute = 0.0;
  double normalized = 0.0;
  bool within = true;
};

struct ComparisonVerdict {
  bool pass = true;
  std::vector<Deviation> deviations;
  Deviation worst;
};

/// Per-point deviations of mean, ensemble_cov and quantum_cov_avg in units
/// of the combined uncertainty. Throws ParameterError when grids differ.
ComparisonVerdict compare_reports(const StatReport& a, const StatReport& b,
                                  const ComparisonTolerances& tolerances = {});

struct PatternRecord {
  Momentum fringe_wavevector;      // 2 k0 or 2 k0(t)
  double half_wavenumber = 0.0;    // k in 2 N cos^2(k x + phi)
  double phase = 0.0;              // phi_s in [0, 2 pi)
  double amplitude = 0.0;          // |rho~(2k0)|
  double visibility = 0.0;         // 2 amplitude / N
  std::vector<double> positions;
  std::vector<double> density;
};

/// N + 2 A cos(2 (k x + phi)); equals 2 N cos^2(k x + phi) for A = N/2.
std::vector<double> pattern_from_amplitude(int total, double amplitude, double half_wavenumber, double phase,
                                           const std::vector<double>& positions);

/// Single-run fringe reconstruction from R at the fringe wavevector. The
/// pair part R - N fixes |rho~| (clamped to N/2 so densities stay
/// non-negative); the offset phi_s is drawn uniformly from `rng`.
PatternRecord single_run_pattern(const StateVector& state, const ModeModel& model, std::mt19937_64& rng,
                                 const std::vector<double>& positions);

struct PatternAverage {
  std::vector<double> positions;
  std::vector<double> mean;
  std::vector<double> standard_error;
  std::size_t runs = 0;
};

/// Average of `runs` single-run patterns, each with a freshly sampled state
/// and phase drawn from per-run substreams of `seed`.
PatternAverage average_patterns(const SubspaceSpec& spec, const ModeModel& model, std::size_t runs,
                                std::uint64_t seed, const std::vector<double>& positions);

struct ScalingFamily {
  ModeModel model = PlaneWaveModel{};
  double exponent = 0.5;      // n = odd floor of N^exponent
  std::vector<int> totals;    // N values
  double band_scale = 1.0;
  int spot_check_max = 4096;  // exact-oracle checks for N up to this value (0: none)
};

/// Largest odd n <= N^exponent, clamped to [1, N + 1].
int odd_dimension(int total, double exponent);

struct ScalingPoint {
  int total = 0;
  int dim = 0;
  double mean = 0.0;
  double ensemble_cov = 0.0;
  double quantum_cov = 0.0;
  double relative = 0.0;
  std::optional<double> exact_relative;
  bool excluded = false;
};

struct ScalingReport {
  std::vector<ScalingPoint> points;
  double slope = 0.0;
  double slope_standard_error = 0.0;
  double intercept = 0.0;
  std::size_t used_points = 0;
};

/// Relative fluctuation sqrt((delta R)^2 + avg (Delta R)^2) / mean at the
/// fringe wavevector from the model-leading closed forms, and a
/// least-squares slope of its logarithm against log N. The smallest N is
/// dropped when its remainder band exceeds 10% of the total variance.
/// Throws ParameterError with fewer than three N values.
ScalingReport scaling_scan(const ScalingFamily& family);

}  // namespace twomode
