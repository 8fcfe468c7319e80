#pragma once

#include <compare>
#include <complex>
#include <map>
#include <span>
#include <vector>

#include "twomode/fock.hpp"

namespace twomode {

using Coefficient = std::complex<double>;

/// (a^dag)^p (b^dag)^q a^r b^s, already normal ordered.
struct LadderMonomial {
  int p = 0;
  int q = 0;
  int r = 0;
  int s = 0;

  bool conserves_number() const { return p + q == r + s; }
  /// Change of the Fock index l produced on a number-conserving state.
  int index_shift() const { return p - r; }
  int degree() const { return p + q + r + s; }
  bool diagonal() const { return p == r && q == s; }

  LadderMonomial adjoint() const { return {r, s, p, q}; }

  friend auto operator<=>(const LadderMonomial&, const LadderMonomial&) = default;
};

/// Finite linear combination of normal-ordered two-mode monomials.
/// Coefficients that are exactly zero are never stored.
class OperatorPoly {
 public:
  using TermMap = std::map<LadderMonomial, Coefficient>;

  OperatorPoly() = default;

  static OperatorPoly identity();
  static OperatorPoly monomial(LadderMonomial m, Coefficient c = 1.0);
  static OperatorPoly a();
  static OperatorPoly a_dagger();
  static OperatorPoly b();
  static OperatorPoly b_dagger();
  static OperatorPoly number_a();
  static OperatorPoly number_b();

  void add(const LadderMonomial& m, Coefficient c);

  const TermMap& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  Coefficient coefficient(const LadderMonomial& m) const;

  OperatorPoly adjoint() const;
  bool conserves_number() const;

  /// Drops terms with |c| <= tolerance.
  OperatorPoly pruned(double tolerance) const;

  /// Largest coefficient difference against `other`.
  double distance(const OperatorPoly& other) const;

  OperatorPoly& operator+=(const OperatorPoly& other);
  OperatorPoly& operator-=(const OperatorPoly& other);
  OperatorPoly& operator*=(Coefficient scale);

  friend OperatorPoly operator+(OperatorPoly x, const OperatorPoly& y) { return x += y; }
  friend OperatorPoly operator-(OperatorPoly x, const OperatorPoly& y) { return x -= y; }
  friend OperatorPoly operator*(Coefficient c, OperatorPoly x) { return x *= c; }
  friend bool operator==(const OperatorPoly&, const OperatorPoly&) = default;

 private:
  TermMap terms_;
};

/// Exact normal-ordered form of A * B using
///   a^r (a^dag)^p = sum_j C(r,j) C(p,j) j! (a^dag)^(p-j) a^(r-j)
/// and the same for b.
OperatorPoly normal_order_product(const OperatorPoly& lhs, const OperatorPoly& rhs);

inline OperatorPoly operator*(const OperatorPoly& lhs, const OperatorPoly& rhs) {
  return normal_order_product(lhs, rhs);
}

/// <n - annihilate + create| (x^dag)^create x^annihilate |n> for a single
/// mode. Paired factors are multiplied as integers; only the unpaired ones
/// go under a square root. Zero when annihilate > n.
double ladder_amplitude(long occupation, int annihilate, int create);

/// <l1| P |l2> in the full N-particle sector (|l| <= N/2 for both indices).
/// Terms that change the particle number contribute zero.
/// Throws std::out_of_range for indices outside the sector.
Coefficient matrix_element(const SubspaceSpec& spec, int l1, const OperatorPoly& poly, int l2);

/// Restriction P_n P P_n stored by diagonal bands.
class SectorMatrix {
 public:
  SectorMatrix(const SubspaceSpec& spec, const OperatorPoly& poly);

  const SubspaceSpec& spec() const { return spec_; }

  Coefficient at(int l1, int l2) const;

  /// Band `shift` holds <l + shift| P |l> for every l with both indices in H_n,
  /// ordered by increasing l.
  const std::map<int, std::vector<Coefficient>>& bands() const { return bands_; }

  /// <psi| P |psi> for amplitudes given in offset order.
  Coefficient expectation(std::span<const Amplitude> z) const;

  Coefficient trace() const;

  /// sum_{l1,l2} A(l1,l2) B(l2,l1).
  Coefficient trace_product(const SectorMatrix& other) const;

  /// sum_l A(l,l) B(l,l).
  Coefficient diagonal_product(const SectorMatrix& other) const;

 private:
  SubspaceSpec spec_;
  std::map<int, std::vector<Coefficient>> bands_;
};

}  // namespace twomode
