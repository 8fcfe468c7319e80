#pragma once

#include "twomode/fock.hpp"
#include "twomode/mode_models.hpp"
#include "twomode/momentum.hpp"

namespace twomode {

// Exact-trace oracles against the uniform ensemble rho_N = P_n / n. Every
// value is assembled from Fock-basis matrix elements of the operator
// polynomials in wick.hpp; nothing here uses the closed forms.

/// tr(rho_N r(k)) = (1/n) sum_l <l| r(k) |l>.
double exact_mean_r(const SubspaceSpec& spec, const ModeKernel& kernel, const Momentum& k);

/// tr(rho_N R(k)) = N + exact_mean_r.
double exact_mean_R(const SubspaceSpec& spec, const ModeKernel& kernel, const Momentum& k);

struct EnsembleCovParts {
  double diag = 0.0;
  double off = 0.0;
  double total() const { return diag + off; }
};

/// Ensemble covariance of R(k), R(k2) split into the diagonal and
/// off-diagonal Fock-basis contributions:
///   -1/(n+1) rbar(k) rbar(k2) + 1/(n(n+1)) sum_{l1,l2} <l1|r(k)|l2><l2|r(k2)|l1>.
EnsembleCovParts exact_ensemble_cov_parts(const SubspaceSpec& spec, const ModeKernel& kernel,
                                          const Momentum& k, const Momentum& k2);

double exact_ensemble_cov(const SubspaceSpec& spec, const ModeKernel& kernel, const Momentum& k,
                          const Momentum& k2);

/// Ensemble average of <R(k) R(k2)> - <R(k)><R(k2)>, from the trace of the
/// Wick-reduced product minus the mean product and the ensemble covariance.
double exact_quantum_cov_avg(const SubspaceSpec& spec, const ModeKernel& kernel, const Momentum& k,
                             const Momentum& k2);

/// tr(rho_N R(k) R(k2)) - tr(rho_N R(k)) tr(rho_N R(k2)), the mixed-state
/// variance; equals ensemble + averaged quantum covariance.
double exact_total_cov(const SubspaceSpec& spec, const ModeKernel& kernel, const Momentum& k,
                       const Momentum& k2);

}  // namespace twomode
