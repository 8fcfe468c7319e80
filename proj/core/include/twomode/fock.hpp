#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace twomode {

using Amplitude = std::complex<double>;

/// Norm tolerance for state vectors.
inline constexpr double kNormTolerance = 1e-12;

/// The N-particle two-mode sector together with the sampling subspace H_n.
///
/// Fock state |l> carries N/2 + l bosons in mode a and N/2 - l in mode b.
/// H_n is spanned by the n states with |l| <= (n-1)/2. N is even, n is odd
/// and 1 <= n <= N + 1; construction throws ParameterError otherwise.
class SubspaceSpec {
 public:
  SubspaceSpec(int total, int dim);

  int total() const { return total_; }
  int dim() const { return dim_; }
  int half_width() const { return (dim_ - 1) / 2; }
  int min_index() const { return -half_width(); }
  int max_index() const { return half_width(); }

  /// True when |l| lies inside H_n.
  bool contains(int l) const { return l >= min_index() && l <= max_index(); }
  /// True when |l| is a state of the full N-particle sector.
  bool in_sector(int l) const { return 2 * l >= -total_ && 2 * l <= total_; }

  /// Dense storage offset of index l (l + (n-1)/2).
  std::size_t offset(int l) const { return static_cast<std::size_t>(l + half_width()); }
  int index_at(std::size_t offset) const { return static_cast<int>(offset) - half_width(); }

  std::vector<int> indices() const;

  long occupation_a(int l) const { return total_ / 2 + l; }
  long occupation_b(int l) const { return total_ / 2 - l; }

  friend bool operator==(const SubspaceSpec&, const SubspaceSpec&) = default;

 private:
  int total_;
  int dim_;
};

SubspaceSpec make_subspace(int total, int dim);

/// Pure state in H_n, stored densely by Fock index offset.
class StateVector {
 public:
  /// Throws ParameterError when the size does not match the subspace or the
  /// norm deviates from one by more than kNormTolerance.
  StateVector(SubspaceSpec spec, std::vector<Amplitude> coefficients);

  const SubspaceSpec& spec() const { return spec_; }
  std::span<const Amplitude> coefficients() const { return coeffs_; }

  /// z_l, zero for indices outside H_n.
  Amplitude amplitude(int l) const;

  double norm_squared() const;

 private:
  SubspaceSpec spec_;
  std::vector<Amplitude> coeffs_;
};

/// The Fock state |l> itself.
StateVector basis_state(const SubspaceSpec& spec, int l);

/// Uniform draw from the unit sphere of H_n: 2n standard normals are paired
/// into complex amplitudes and normalized. For n = 1 the only state is |0>
/// and the amplitude is returned as exactly 1 (a global phase).
StateVector sample_state(const SubspaceSpec& spec, std::mt19937_64& rng);

struct MomentEstimate {
  std::complex<double> value;
  double standard_error = 0.0;
  std::size_t sample_count = 0;
};

/// Streaming estimator for a batch of second and fourth order moments
///
///   order 2:  mean of conj(z_l1) z_l2
///   order 4:  mean of conj(z_l1) conj(z_l2) z_l3 z_l4
///
/// Standard errors come from batch means; sample i lands in batch i % B.
/// The complex standard error is sqrt(SE_re^2 + SE_im^2).
class MomentAccumulator {
 public:
  MomentAccumulator(SubspaceSpec spec, std::vector<std::vector<int>> index_sets, int batches = 32);

  /// Throws ParameterError when the state belongs to a different subspace.
  void add(const StateVector& state);

  std::size_t count() const { return count_; }
  const std::vector<std::vector<int>>& index_sets() const { return index_sets_; }

  std::vector<MomentEstimate> estimates() const;

 private:
  SubspaceSpec spec_;
  std::vector<std::vector<int>> index_sets_;
  std::size_t batches_;
  std::size_t count_ = 0;
  std::complex<double> batch_sum(std::size_t set, std::size_t batch) const;

  struct Slot {
    bool quartic;
    std::size_t pos;
  };
  std::vector<std::array<std::uint32_t, 2>> pairs_;
  std::vector<std::array<std::uint32_t, 4>> quartics_;
  std::vector<Slot> slots_;
  // [batch][pairs then quartics][re, im]
  std::vector<double> sums_;
  std::vector<std::size_t> batch_counts_;
};

/// One-shot moment estimate over stored samples (all from one subspace).
MomentEstimate estimate_moments(std::span<const StateVector> samples, std::span<const int> indices,
                                int batches = 32);

/// Draws `samples` states (sample i from substream (seed, i)) and feeds them to
/// a MomentAccumulator in index order. Generation runs in parallel blocks,
/// so the result does not depend on the thread count.
std::vector<MomentEstimate> sample_moments(const SubspaceSpec& spec, const std::vector<std::vector<int>>& index_sets,
                                           std::size_t samples, std::uint64_t seed, int batches = 32);

/// Uniform-ensemble prediction for the same moment:
/// delta_{l1 l2} / n, or (delta_13 delta_24 + delta_14 delta_23) / (n (n+1)).
double uniform_moment(const SubspaceSpec& spec, std::span<const int> indices);

}  // namespace twomode
