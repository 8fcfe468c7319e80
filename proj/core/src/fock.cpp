#include "twomode/fock.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "twomode/error.hpp"
#include "twomode/parallel.hpp"
#include "twomode/random.hpp"

namespace twomode {

SubspaceSpec::SubspaceSpec(int total, int dim) : total_(total), dim_(dim) {
  if (total % 2 != 0) throw ParameterError("N", "N must be even");
  if (total < 2) throw ParameterError("N", "N must be at least 2");
  if (dim < 1) throw ParameterError("n", "n must be at least 1");
  if (dim % 2 == 0) throw ParameterError("n", "n must be odd");
  if (dim > total + 1) throw ParameterError("n", "n must not exceed N + 1");
}

std::vector<int> SubspaceSpec::indices() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(dim_));
  for (int l = min_index(); l <= max_index(); ++l) out.push_back(l);
  return out;
}

SubspaceSpec make_subspace(int total, int dim) { return SubspaceSpec(total, dim); }

StateVector::StateVector(SubspaceSpec spec, std::vector<Amplitude> coefficients)
    : spec_(spec), coeffs_(std::move(coefficients)) {
  if (coeffs_.size() != static_cast<std::size_t>(spec_.dim()))
    throw ParameterError("coefficients", "expected " + std::to_string(spec_.dim()) + " amplitudes, got " +
                                             std::to_string(coeffs_.size()));
  if (std::abs(norm_squared() - 1.0) > kNormTolerance)
    throw ParameterError("coefficients", "state is not normalized");
}

Amplitude StateVector::amplitude(int l) const {
  return spec_.contains(l) ? coeffs_[spec_.offset(l)] : Amplitude{};
}

double StateVector::norm_squared() const {
  double s = 0.0;
  for (const auto& z : coeffs_) s += std::norm(z);
  return s;
}

StateVector basis_state(const SubspaceSpec& spec, int l) {
  if (!spec.contains(l)) throw ParameterError("l", "index " + std::to_string(l) + " outside H_n");
  std::vector<Amplitude> c(static_cast<std::size_t>(spec.dim()));
  c[spec.offset(l)] = 1.0;
  return StateVector(spec, std::move(c));
}

StateVector sample_state(const SubspaceSpec& spec, std::mt19937_64& rng) {
  if (spec.dim() == 1) return StateVector(spec, {Amplitude{1.0, 0.0}});
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Amplitude> c(static_cast<std::size_t>(spec.dim()));
  double norm2 = 0.0;
  for (auto& z : c) {
    double re = gauss(rng);
    double im = gauss(rng);
    z = {re, im};
    norm2 += re * re + im * im;
  }
  double inv = 1.0 / std::sqrt(norm2);
  for (auto& z : c) z *= inv;
  return StateVector(spec, std::move(c));
}

MomentAccumulator::MomentAccumulator(SubspaceSpec spec, std::vector<std::vector<int>> index_sets, int batches)
    : spec_(spec), index_sets_(std::move(index_sets)) {
  if (batches < 2) throw ParameterError("batches", "batch count must be at least 2");
  for (const auto& set : index_sets_) {
    if (set.size() != 2 && set.size() != 4)
      throw ParameterError("indices", "moments take 2 or 4 Fock indices");
    for (int l : set)
      if (!spec_.contains(l)) throw ParameterError("indices", "index " + std::to_string(l) + " outside H_n");
  }
  batches_ = static_cast<std::size_t>(batches);
  // Offsets into the coefficient array; pairs are padded to (i, j, -, -).
  const int h = spec_.max_index();
  for (const auto& set : index_sets_) {
    if (set.size() == 2) {
      pairs_.push_back({static_cast<std::uint32_t>(set[0] + h), static_cast<std::uint32_t>(set[1] + h)});
      slots_.push_back({false, pairs_.size() - 1});
    } else {
      quartics_.push_back({static_cast<std::uint32_t>(set[0] + h), static_cast<std::uint32_t>(set[1] + h),
                           static_cast<std::uint32_t>(set[2] + h), static_cast<std::uint32_t>(set[3] + h)});
      slots_.push_back({true, quartics_.size() - 1});
    }
  }
  sums_.assign(batches_ * 2 * index_sets_.size(), 0.0);
  batch_counts_.assign(batches_, 0);
}

void MomentAccumulator::add(const StateVector& state) {
  if (!(state.spec() == spec_)) throw ParameterError("samples", "sample belongs to a different subspace");
  const std::size_t batch = count_ % batches_;
  const auto z = state.coefficients();
  // Plain real arithmetic: std::complex products carry NaN-recovery calls.
  double* pair_out = sums_.data() + batch * 2 * index_sets_.size();
  double* quartic_out = pair_out + 2 * pairs_.size();
  for (std::size_t s = 0; s < pairs_.size(); ++s) {
    const auto [i, j] = pairs_[s];
    const double ar = z[i].real(), ai = -z[i].imag(), br = z[j].real(), bi = z[j].imag();
    pair_out[2 * s] += ar * br - ai * bi;
    pair_out[2 * s + 1] += ar * bi + ai * br;
  }
  for (std::size_t s = 0; s < quartics_.size(); ++s) {
    const auto& q = quartics_[s];
    const double ar = z[q[0]].real(), ai = -z[q[0]].imag(), br = z[q[1]].real(), bi = -z[q[1]].imag();
    const double cr = z[q[2]].real(), ci = z[q[2]].imag(), dr = z[q[3]].real(), di = z[q[3]].imag();
    const double xr = ar * br - ai * bi, xi = ar * bi + ai * br;
    const double yr = cr * dr - ci * di, yi = cr * di + ci * dr;
    quartic_out[2 * s] += xr * yr - xi * yi;
    quartic_out[2 * s + 1] += xr * yi + xi * yr;
  }
  ++batch_counts_[batch];
  ++count_;
}

std::complex<double> MomentAccumulator::batch_sum(std::size_t set, std::size_t batch) const {
  const auto [quartic, pos] = slots_[set];
  const std::size_t offset = batch * 2 * index_sets_.size() + 2 * (quartic ? pairs_.size() + pos : pos);
  return {sums_[offset], sums_[offset + 1]};
}

std::vector<MomentEstimate> MomentAccumulator::estimates() const {
  std::vector<MomentEstimate> out;
  out.reserve(index_sets_.size());
  for (std::size_t s = 0; s < index_sets_.size(); ++s) {
    MomentEstimate e;
    e.sample_count = count_;
    if (count_ == 0) {
      out.push_back(e);
      continue;
    }
    const auto sum = [&](std::size_t b) { return batch_sum(s, b); };
    std::complex<double> total;
    for (std::size_t b = 0; b < batches_; ++b) total += sum(b);
    e.value = total / static_cast<double>(count_);

    std::vector<std::complex<double>> means;
    for (std::size_t b = 0; b < batches_; ++b)
      if (batch_counts_[b] > 0) means.push_back(sum(b) / static_cast<double>(batch_counts_[b]));
    if (means.size() >= 2) {
      std::complex<double> centre;
      for (const auto& m : means) centre += m;
      centre /= static_cast<double>(means.size());
      double var_re = 0.0, var_im = 0.0;
      for (const auto& m : means) {
        var_re += (m.real() - centre.real()) * (m.real() - centre.real());
        var_im += (m.imag() - centre.imag()) * (m.imag() - centre.imag());
      }
      double B = static_cast<double>(means.size());
      e.standard_error = std::sqrt((var_re + var_im) / (B * (B - 1.0)));
    }
    out.push_back(e);
  }
  return out;
}

MomentEstimate estimate_moments(std::span<const StateVector> samples, std::span<const int> indices, int batches) {
  if (samples.empty()) throw ParameterError("samples", "no samples");
  MomentAccumulator acc(samples.front().spec(), {std::vector<int>(indices.begin(), indices.end())}, batches);
  for (const auto& s : samples) acc.add(s);
  return acc.estimates().front();
}

std::vector<MomentEstimate> sample_moments(const SubspaceSpec& spec, const std::vector<std::vector<int>>& index_sets,
                                           std::size_t samples, std::uint64_t seed, int batches) {
  MomentAccumulator acc(spec, index_sets, batches);
  const StreamFactory streams(seed);
  constexpr std::size_t block = 4096;
  std::vector<std::optional<StateVector>> states(block);
  for (std::size_t start = 0; start < samples; start += block) {
    const std::size_t count = std::min(block, samples - start);
    parallel_for(count, [&](std::size_t j) {
      auto rng = streams.stream(start + j, stream_tag::state);
      states[j] = sample_state(spec, rng);
    });
    for (std::size_t j = 0; j < count; ++j) acc.add(*states[j]);
  }
  return acc.estimates();
}

double uniform_moment(const SubspaceSpec& spec, std::span<const int> indices) {
  for (int l : indices)
    if (!spec.contains(l)) throw ParameterError("indices", "index " + std::to_string(l) + " outside H_n");
  double n = spec.dim();
  if (indices.size() == 2) return indices[0] == indices[1] ? 1.0 / n : 0.0;
  if (indices.size() == 4) {
    int pairs = (indices[0] == indices[2] && indices[1] == indices[3]) +
                (indices[0] == indices[3] && indices[1] == indices[2]);
    return pairs / (n * (n + 1.0));
  }
  throw ParameterError("indices", "moments take 2 or 4 Fock indices");
}

}  // namespace twomode
