#include "twomode/exact.hpp"

#include "twomode/ladder.hpp"
#include "twomode/wick.hpp"

namespace twomode {

namespace {

struct Pair {
  SectorMatrix first;
  SectorMatrix second;
};

Pair r_matrices(const SubspaceSpec& spec, const ModeKernel& kernel, const Momentum& k, const Momentum& k2) {
  return {SectorMatrix(spec, build_r_poly(kernel, k)), SectorMatrix(spec, build_r_poly(kernel, k2))};
}

EnsembleCovParts cov_parts(const SubspaceSpec& spec, const SectorMatrix& A, const SectorMatrix& B) {
  const double n = spec.dim();
  const double ra = A.trace().real() / n;
  const double rb = B.trace().real() / n;
  const double diag_sum = A.diagonal_product(B).real();
  const double full_sum = A.trace_product(B).real();
  EnsembleCovParts parts;
  parts.diag = -(ra * rb) / (n + 1.0) + diag_sum / (n * (n + 1.0));
  parts.off = (full_sum - diag_sum) / (n * (n + 1.0));
  return parts;
}

}  // namespace

double exact_mean_r(const SubspaceSpec& spec, const ModeKernel& kernel, const Momentum& k) {
  return SectorMatrix(spec, build_r_poly(kernel, k)).trace().real() / spec.dim();
}

double exact_mean_R(const SubspaceSpec& spec, const ModeKernel& kernel, const Momentum& k) {
  return spec.total() + exact_mean_r(spec, kernel, k);
}

EnsembleCovParts exact_ensemble_cov_parts(const SubspaceSpec& spec, const ModeKernel& kernel, const Momentum& k,
                                          const Momentum& k2) {
  auto m = r_matrices(spec, kernel, k, k2);
  return cov_parts(spec, m.first, m.second);
}

double exact_ensemble_cov(const SubspaceSpec& spec, const ModeKernel& kernel, const Momentum& k,
                          const Momentum& k2) {
  return exact_ensemble_cov_parts(spec, kernel, k, k2).total();
}

double exact_total_cov(const SubspaceSpec& spec, const ModeKernel& kernel, const Momentum& k,
                       const Momentum& k2) {
  // The N cross terms of R = r + N cancel against the mean product.
  const double n = spec.dim();
  auto m = r_matrices(spec, kernel, k, k2);
  const double w = SectorMatrix(spec, wick_product(k, k2, kernel)).trace().real() / n;
  return w - (m.first.trace().real() / n) * (m.second.trace().real() / n);
}

double exact_quantum_cov_avg(const SubspaceSpec& spec, const ModeKernel& kernel, const Momentum& k,
                             const Momentum& k2) {
  const double n = spec.dim();
  auto m = r_matrices(spec, kernel, k, k2);
  const double w = SectorMatrix(spec, wick_product(k, k2, kernel)).trace().real() / n;
  const double ra = m.first.trace().real() / n;
  const double rb = m.second.trace().real() / n;
  return w - ra * rb - cov_parts(spec, m.first, m.second).total();
}

}  // namespace twomode
