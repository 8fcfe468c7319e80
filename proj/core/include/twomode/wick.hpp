#pragma once

#include <compare>
#include <vector>

#include "twomode/ladder.hpp"
#include "twomode/mode_models.hpp"
#include "twomode/momentum.hpp"

namespace twomode {

/// Symbolic momentum c_k * k + c_k2 * k2. Kernels are evaluated only after
/// all contractions have been resolved.
struct MomentumCombo {
  int k = 0;
  int k2 = 0;

  Momentum evaluate(const Momentum& first, const Momentum& second) const {
    return static_cast<double>(k) * first + static_cast<double>(k2) * second;
  }

  friend MomentumCombo operator+(MomentumCombo x, MomentumCombo y) { return {x.k + y.k, x.k2 + y.k2}; }
  friend MomentumCombo operator-(MomentumCombo x) { return {-x.k, -x.k2}; }
  friend auto operator<=>(const MomentumCombo&, const MomentumCombo&) = default;
};

/// Normal-ordered product of field operators integrated over its sites,
///
///   \int prod_s dr_s exp(-i q_s . r_s)  Psi^dag(r_c1) ... Psi(r_a1) ...
///
/// Each entry of creators() / annihilators() names the site carrying that
/// operator. Sites are merged when a contraction produces a delta function.
class FieldMonomial {
 public:
  FieldMonomial(std::vector<MomentumCombo> site_phases, std::vector<int> creators,
                std::vector<int> annihilators);

  /// \int dr dr' exp(-i q.(r - r')) Psi^dag(r) Psi^dag(r') Psi(r') Psi(r)
  /// with q the symbolic momentum `k`.
  static FieldMonomial density_pair(MomentumCombo k);

  const std::vector<MomentumCombo>& site_phases() const { return sites_; }
  const std::vector<int>& creators() const { return creators_; }
  const std::vector<int>& annihilators() const { return annihilators_; }
  std::size_t operator_count() const { return creators_.size() + annihilators_.size(); }

 private:
  std::vector<MomentumCombo> sites_;
  std::vector<int> creators_;
  std::vector<int> annihilators_;
};

struct ContractionTerm {
  FieldMonomial monomial;
  int contractions = 0;
};

/// Wick expansion of left * right for bosonic fields. Every partial matching
/// of left annihilators with right creators contributes one term; a matched
/// pair is replaced by the delta function of [Psi(r), Psi^dag(r')], which
/// merges the two sites and adds their phases.
std::vector<ContractionTerm> wick_expand(const FieldMonomial& left, const FieldMonomial& right);

/// Two-mode part of a field monomial: Psi -> psi_a a + psi_b b at every
/// site. Each site must carry exactly one creator and one annihilator so its
/// integral is a single kernel value F_xy(q_site).
OperatorPoly reduce_to_modes(const FieldMonomial& monomial, const ModeKernel& kernel, const Momentum& k,
                             const Momentum& k2 = Momentum{});

/// Two-mode part of r(k) = R(k) - N. Terms with an annihilator outside
/// {a, b} vanish on H_n and are not represented.
OperatorPoly build_r_poly(const ModeKernel& kernel, const Momentum& k);

/// Contraction orders kept by wick_product.
struct WickOrders {
  bool zero = true;    // eight-operator term
  bool single = true;  // four six-operator terms
  bool double_ = true; // two four-operator terms

  static WickOrders all() { return {}; }
  static WickOrders uncontracted() { return {true, false, false}; }
};

/// Exact two-mode reduction of r(k) r(k2), including the contraction terms
/// that pass through modes other than a and b.
OperatorPoly wick_product(const Momentum& k, const Momentum& k2, const ModeKernel& kernel,
                          WickOrders orders = WickOrders::all());

}  // namespace twomode
