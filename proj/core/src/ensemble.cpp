#include "twomode/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "twomode/error.hpp"
#include "twomode/exact.hpp"
#include "twomode/ladder.hpp"
#include "twomode/parallel.hpp"
#include "twomode/random.hpp"
#include "twomode/wick.hpp"

namespace twomode {

void ExperimentConfig::validate() const {
  if (!seed) throw ParameterError("seed", "a seed is required");
  if (samples < 2) throw ParameterError("samples", "at least two samples are required");
  if (k_grid.empty()) throw ParameterError("k_grid", "the k grid is empty");
  if (batches < 2) throw ParameterError("batches", "batch count must be at least 2");
  if (!(tolerance_se > 0.0)) throw ParameterError("tolerance_se", "tolerance must be positive");
  (void)kernel_for(model);  // model parameters are checked by the kernel factories
}

namespace {

constexpr double kRoundingFloor = 1e-12;

struct MeanSE {
  double mean = 0.0;
  double se = 0.0;
};

// Mean over all values and the standard error from batch means (value i -> batch i % B).
MeanSE batch_estimate(std::span<const double> values, std::size_t batches) {
  MeanSE out;
  const std::size_t m = values.size();
  if (m == 0) return out;
  // Shift by the first value so identical inputs give an exactly zero spread.
  const double shift = values[0];
  std::vector<double> centred(m);
  for (std::size_t i = 0; i < m; ++i) centred[i] = values[i] - shift;
  out.mean = shift + pairwise_sum(centred) / static_cast<double>(m);

  const std::size_t B = std::min(batches, m);
  if (B < 2) return out;
  std::vector<double> sums(B, 0.0);
  std::vector<std::size_t> counts(B, 0);
  for (std::size_t i = 0; i < m; ++i) {
    sums[i % B] += centred[i];
    ++counts[i % B];
  }
  double centre = 0.0;
  for (std::size_t b = 0; b < B; ++b) centre += sums[b] / static_cast<double>(counts[b]);
  centre /= static_cast<double>(B);
  double ss = 0.0;
  for (std::size_t b = 0; b < B; ++b) {
    const double d = sums[b] / static_cast<double>(counts[b]) - centre;
    ss += d * d;
  }
  out.se = std::sqrt(ss / (static_cast<double>(B) * static_cast<double>(B - 1)));
  return out;
}

}  // namespace

StatReport run_ensemble(const ExperimentConfig& config) {
  config.validate();
  const SubspaceSpec& spec = config.spec;
  const ModeKernel kernel = kernel_for(config.model);
  const std::size_t G = config.k_grid.size();
  const std::size_t M = config.samples;
  const auto B = static_cast<std::size_t>(config.batches);

  std::vector<SectorMatrix> r_mats, w_mats;
  r_mats.reserve(G);
  w_mats.reserve(G);
  for (const auto& k : config.k_grid) {
    r_mats.emplace_back(spec, build_r_poly(kernel, k));
    w_mats.emplace_back(spec, wick_product(k, k, kernel));
  }

  // [grid][sample]
  std::vector<std::vector<double>> r(G, std::vector<double>(M)), w(G, std::vector<double>(M));
  const StreamFactory streams(*config.seed);
  parallel_for(M, [&](std::size_t i) {
    auto rng = streams.stream(i, stream_tag::state);
    const StateVector state = sample_state(spec, rng);
    for (std::size_t g = 0; g < G; ++g) {
      r[g][i] = r_mats[g].expectation(state.coefficients()).real();
      w[g][i] = w_mats[g].expectation(state.coefficients()).real();
    }
  });

  StatReport report{spec, Provenance::montecarlo, {}, M};
  const double N = spec.total();
  const double Md = static_cast<double>(M);
  for (std::size_t g = 0; g < G; ++g) {
    StatPoint p;
    p.k = config.k_grid[g];
    const MeanSE rm = batch_estimate(r[g], B);
    p.mean = {N + rm.mean, rm.se};

    std::vector<double> spread(M), quantum(M);
    for (std::size_t i = 0; i < M; ++i) {
      const double d = r[g][i] - rm.mean;
      spread[i] = d * d * Md / (Md - 1.0);
      quantum[i] = w[g][i] - r[g][i] * r[g][i];
    }
    const MeanSE ens = batch_estimate(spread, B);
    const MeanSE q = batch_estimate(quantum, B);
    p.ensemble_cov = {ens.mean, ens.se};
    p.quantum_cov_avg = {q.mean, q.se};

    const MeanSE wm = batch_estimate(w[g], B);
    p.total_cov = {wm.mean - rm.mean * rm.mean, std::hypot(q.se, ens.se)};

    // Zero-variance observables (k = 0, n = 1) still carry rounding noise of
    // order eps * <R^2>; never report an uncertainty below that floor.
    const double floor_mean = kRoundingFloor * std::max(1.0, std::abs(p.mean.value));
    const double floor_cov = kRoundingFloor * std::max(1.0, std::abs(wm.mean));
    p.mean.uncertainty = std::max(p.mean.uncertainty, floor_mean);
    p.ensemble_cov.uncertainty = std::max(p.ensemble_cov.uncertainty, floor_cov);
    p.quantum_cov_avg.uncertainty = std::max(p.quantum_cov_avg.uncertainty, floor_cov);
    p.total_cov.uncertainty = std::max(p.total_cov.uncertainty, floor_cov);
    report.points.push_back(p);
  }
  return report;
}

StatReport exact_report(const SubspaceSpec& spec, const ModeModel& model, const std::vector<Momentum>& grid) {
  if (grid.empty()) throw ParameterError("k_grid", "the k grid is empty");
  const ModeKernel kernel = kernel_for(model);
  StatReport report{spec, Provenance::exact, {}, 0};
  for (const auto& k : grid) {
    StatPoint p;
    p.k = k;
    p.mean = {exact_mean_R(spec, kernel, k), 0.0};
    p.ensemble_cov = {exact_ensemble_cov(spec, kernel, k, k), 0.0};
    p.quantum_cov_avg = {exact_quantum_cov_avg(spec, kernel, k, k), 0.0};
    p.total_cov = {exact_total_cov(spec, kernel, k, k), 0.0};
    report.points.push_back(p);
  }
  return report;
}

StatReport closed_report(const SubspaceSpec& spec, const ModeModel& model, const std::vector<Momentum>& grid,
                         ClosedVariant variant, double band_scale) {
  if (grid.empty()) throw ParameterError("k_grid", "the k grid is empty");
  const ModeKernel kernel = kernel_for(model);
  const double band = remainder_band(spec, band_scale);
  StatReport report{spec, Provenance::closed, {}, 0};
  for (const auto& k : grid) {
    double mean = 0.0, ens = 0.0, q = 0.0;
    if (variant == ClosedVariant::kernel_general) {
      mean = mean_R_closed(spec, kernel, k);
      ens = ensemble_cov_closed(spec, kernel, k, k).total();
      q = quantum_cov_closed(spec, kernel, k, k);
    } else if (const auto* pw = std::get_if<PlaneWaveModel>(&model)) {
      mean = mean_R_plane_wave_closed(spec, *pw, k);
      ens = ensemble_cov_plane_wave_closed(spec, *pw, k, k);
      q = quantum_cov_plane_wave_closed(spec, *pw, k, k);
    } else {
      const auto& g = std::get<GaussianModel>(model);
      mean = gaussian_mean_large_time(spec, g, k.x());
      ens = gaussian_ensemble_cov_large_time(spec, g, k.x(), k.x());
      q = gaussian_quantum_cov_large_time(spec, g, k.x(), k.x());
    }
    StatPoint p;
    p.k = k;
    p.mean = {mean, band};
    p.ensemble_cov = {ens, band};
    p.quantum_cov_avg = {q, band};
    p.total_cov = {ens + q, band};
    report.points.push_back(p);
  }
  return report;
}

ComparisonVerdict compare_reports(const StatReport& a, const StatReport& b, const ComparisonTolerances& tolerances) {
  if (!(a.spec == b.spec)) throw ParameterError("spec", "reports belong to different subspaces");
  if (a.points.size() != b.points.size()) throw ParameterError("k_grid", "reports use different k grids");
  for (std::size_t i = 0; i < a.points.size(); ++i)
    if (!(a.points[i].k == b.points[i].k)) throw ParameterError("k_grid", "reports use different k grids");

  const bool closed = a.provenance == Provenance::closed || b.provenance == Provenance::closed;
  const double threshold = closed ? tolerances.band_units : tolerances.se_units;

  ComparisonVerdict verdict;
  verdict.worst.normalized = -1.0;
  auto check = [&](std::size_t index, const char* name, const StatQuantity& x, const StatQuantity& y) {
    Deviation d;
    d.index = index;
    d.quantity = name;
    d.absolute = std::abs(x.value - y.value);
    // Exact-vs-exact comparisons fall back to a relative rounding floor.
    const double floor = 1e-12 * std::max({1.0, std::abs(x.value), std::abs(y.value)});
    const double combined = std::max(std::hypot(x.uncertainty, y.uncertainty), floor);
    d.normalized = d.absolute / combined;
    d.within = d.normalized <= threshold;
    verdict.pass = verdict.pass && d.within;
    if (d.normalized > verdict.worst.normalized) verdict.worst = d;
    verdict.deviations.push_back(d);
  };
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    check(i, "mean", a.points[i].mean, b.points[i].mean);
    check(i, "ensemble_cov", a.points[i].ensemble_cov, b.points[i].ensemble_cov);
    check(i, "quantum_cov_avg", a.points[i].quantum_cov_avg, b.points[i].quantum_cov_avg);
  }
  if (verdict.deviations.empty()) verdict.worst = {};
  return verdict;
}

std::vector<double> pattern_from_amplitude(int total, double amplitude, double half_wavenumber, double phase,
                                           const std::vector<double>& positions) {
  std::vector<double> out;
  out.reserve(positions.size());
  for (double x : positions)
    out.push_back(std::max(0.0, total + 2.0 * amplitude * std::cos(2.0 * (half_wavenumber * x + phase))));
  return out;
}

namespace {

double draw_phase(std::mt19937_64& rng) {
  const double phi = 2.0 * std::numbers::pi * std::generate_canonical<double, 53>(rng);
  return phi < 2.0 * std::numbers::pi ? phi : 0.0;
}

PatternRecord pattern_for(const StateVector& state, const ModeModel& model, const SectorMatrix& fringe,
                          std::mt19937_64& rng, const std::vector<double>& positions) {
  const double N = state.spec().total();
  const double R = N + fringe.expectation(state.coefficients()).real();
  PatternRecord rec;
  rec.fringe_wavevector = fringe_wavevector(model);
  rec.half_wavenumber = fringe_half_wavenumber(model);
  rec.phase = draw_phase(rng);
  rec.amplitude = std::min(std::sqrt(std::max(R - N, 0.0)), N / 2.0);
  rec.visibility = 2.0 * rec.amplitude / N;
  rec.positions = positions;
  rec.density = pattern_from_amplitude(state.spec().total(), rec.amplitude, rec.half_wavenumber, rec.phase, positions);
  return rec;
}

}  // namespace

PatternRecord single_run_pattern(const StateVector& state, const ModeModel& model, std::mt19937_64& rng,
                                 const std::vector<double>& positions) {
  const SectorMatrix fringe(state.spec(), build_r_poly(kernel_for(model), fringe_wavevector(model)));
  return pattern_for(state, model, fringe, rng, positions);
}

PatternAverage average_patterns(const SubspaceSpec& spec, const ModeModel& model, std::size_t runs,
                                std::uint64_t seed, const std::vector<double>& positions) {
  if (runs < 2) throw ParameterError("runs", "at least two runs are required");
  if (positions.empty()) throw ParameterError("positions", "the position grid is empty");
  const SectorMatrix fringe(spec, build_r_poly(kernel_for(model), fringe_wavevector(model)));
  const StreamFactory streams(seed);
  std::vector<std::vector<double>> densities(runs);
  parallel_for(runs, [&](std::size_t i) {
    auto state_rng = streams.stream(i, stream_tag::state);
    auto phase_rng = streams.stream(i, stream_tag::phase);
    const StateVector state = sample_state(spec, state_rng);
    densities[i] = pattern_for(state, model, fringe, phase_rng, positions).density;
  });

  PatternAverage avg;
  avg.positions = positions;
  avg.runs = runs;
  std::vector<double> column(runs);
  for (std::size_t x = 0; x < positions.size(); ++x) {
    for (std::size_t i = 0; i < runs; ++i) column[i] = densities[i][x];
    const MeanSE est = batch_estimate(column, 32);
    avg.mean.push_back(est.mean);
    avg.standard_error.push_back(est.se);
  }
  return avg;
}

int odd_dimension(int total, double exponent) {
  int n = static_cast<int>(std::floor(std::pow(static_cast<double>(total), exponent) + 1e-9));
  if (n % 2 == 0) --n;
  return std::clamp(n, 1, total + 1);
}

ScalingReport scaling_scan(const ScalingFamily& family) {
  if (family.totals.size() < 3) throw ParameterError("totals", "a scaling fit needs at least three N values");
  std::vector<int> totals = family.totals;
  std::sort(totals.begin(), totals.end());

  const ModeKernel kernel = kernel_for(family.model);
  const Momentum K = fringe_wavevector(family.model);
  ScalingReport report;
  for (int N : totals) {
    const SubspaceSpec spec(N, odd_dimension(N, family.exponent));
    ScalingPoint p;
    p.total = N;
    p.dim = spec.dim();
    if (const auto* pw = std::get_if<PlaneWaveModel>(&family.model)) {
      p.mean = mean_R_plane_wave_closed(spec, *pw, K);
      p.ensemble_cov = ensemble_cov_plane_wave_closed(spec, *pw, K, K);
      p.quantum_cov = quantum_cov_plane_wave_closed(spec, *pw, K, K);
    } else {
      const auto& g = std::get<GaussianModel>(family.model);
      p.mean = gaussian_mean_large_time(spec, g, K.x());
      p.ensemble_cov = gaussian_ensemble_cov_large_time(spec, g, K.x(), K.x());
      p.quantum_cov = gaussian_quantum_cov_large_time(spec, g, K.x(), K.x());
    }
    p.relative = std::sqrt(p.ensemble_cov + p.quantum_cov) / p.mean;
    if (N <= family.spot_check_max) {
      const double m = exact_mean_R(spec, kernel, K);
      const double v = exact_ensemble_cov(spec, kernel, K, K) + exact_quantum_cov_avg(spec, kernel, K, K);
      p.exact_relative = std::sqrt(std::max(v, 0.0)) / m;
    }
    report.points.push_back(p);
  }
  auto& first = report.points.front();
  first.excluded = remainder_band(SubspaceSpec(first.total, first.dim), family.band_scale) >
                   0.1 * (first.ensemble_cov + first.quantum_cov);

  std::vector<double> xs, ys;
  for (const auto& p : report.points) {
    if (p.excluded) continue;
    xs.push_back(std::log(static_cast<double>(p.total)));
    ys.push_back(std::log(p.relative));
  }
  const std::size_t m = xs.size();
  report.used_points = m;
  const double mx = pairwise_sum(xs) / static_cast<double>(m);
  const double my = pairwise_sum(ys) / static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  report.slope = sxy / sxx;
  report.intercept = my - report.slope * mx;
  if (m > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = ys[i] - report.intercept - report.slope * xs[i];
      rss += r * r;
    }
    report.slope_standard_error = std::sqrt(rss / static_cast<double>(m - 2) / sxx);
  }
  return report;
}

}  // namespace twomode
