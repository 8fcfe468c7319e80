#include "twomode/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace twomode {

OperatorPoly OperatorPoly::identity() { return monomial({0, 0, 0, 0}); }

OperatorPoly OperatorPoly::monomial(LadderMonomial m, Coefficient c) {
  OperatorPoly p;
  p.add(m, c);
  return p;
}

OperatorPoly OperatorPoly::a() { return monomial({0, 0, 1, 0}); }
OperatorPoly OperatorPoly::a_dagger() { return monomial({1, 0, 0, 0}); }
OperatorPoly OperatorPoly::b() { return monomial({0, 0, 0, 1}); }
OperatorPoly OperatorPoly::b_dagger() { return monomial({0, 1, 0, 0}); }
OperatorPoly OperatorPoly::number_a() { return monomial({1, 0, 1, 0}); }
OperatorPoly OperatorPoly::number_b() { return monomial({0, 1, 0, 1}); }

void OperatorPoly::add(const LadderMonomial& m, Coefficient c) {
  if (c == Coefficient{}) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Coefficient{}) terms_.erase(it);
  }
}

Coefficient OperatorPoly::coefficient(const LadderMonomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Coefficient{} : it->second;
}

OperatorPoly OperatorPoly::adjoint() const {
  OperatorPoly out;
  for (const auto& [m, c] : terms_) out.add(m.adjoint(), std::conj(c));
  return out;
}

bool OperatorPoly::conserves_number() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.first.conserves_number(); });
}

OperatorPoly OperatorPoly::pruned(double tolerance) const {
  OperatorPoly out;
  for (const auto& [m, c] : terms_)
    if (std::abs(c) > tolerance) out.add(m, c);
  return out;
}

double OperatorPoly::distance(const OperatorPoly& other) const {
  double d = 0.0;
  for (const auto& [m, c] : terms_) d = std::max(d, std::abs(c - other.coefficient(m)));
  for (const auto& [m, c] : other.terms_)
    if (!terms_.count(m)) d = std::max(d, std::abs(c));
  return d;
}

OperatorPoly& OperatorPoly::operator+=(const OperatorPoly& other) {
  for (const auto& [m, c] : other.terms_) add(m, c);
  return *this;
}

OperatorPoly& OperatorPoly::operator-=(const OperatorPoly& other) {
  for (const auto& [m, c] : other.terms_) add(m, -c);
  return *this;
}

OperatorPoly& OperatorPoly::operator*=(Coefficient scale) {
  if (scale == Coefficient{}) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= scale;
  return *this;
}

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// C(r,j) C(p,j) j! for a^r (a^dag)^p
double reorder_weight(int r, int p, int j) {
  double f = 1.0;
  for (int i = 2; i <= j; ++i) f *= i;
  return binomial(r, j) * binomial(p, j) * f;
}

}  // namespace

OperatorPoly normal_order_product(const OperatorPoly& lhs, const OperatorPoly& rhs) {
  OperatorPoly out;
  for (const auto& [x, cx] : lhs.terms()) {
    for (const auto& [y, cy] : rhs.terms()) {
      for (int j = 0; j <= std::min(x.r, y.p); ++j) {
        double wa = reorder_weight(x.r, y.p, j);
        for (int i = 0; i <= std::min(x.s, y.q); ++i) {
          double wb = reorder_weight(x.s, y.q, i);
          LadderMonomial m{x.p + y.p - j, x.q + y.q - i, x.r - j + y.r, x.s - i + y.s};
          out.add(m, cx * cy * (wa * wb));
        }
      }
    }
  }
  return out;
}

double ladder_amplitude(long occupation, int annihilate, int create) {
  if (occupation < 0 || annihilate > occupation) return 0.0;
  // annihilation factors: occupation - annihilate + 1 .. occupation
  // creation factors:     occupation - annihilate + 1 .. occupation - annihilate + create
  const long base = occupation - annihilate;
  const int paired = std::min(annihilate, create);
  double exact = 1.0;
  for (long v = base + 1; v <= base + paired; ++v) exact *= static_cast<double>(v);
  double unpaired = 1.0;
  for (long v = base + paired + 1; v <= base + std::max(annihilate, create); ++v)
    unpaired *= static_cast<double>(v);
  return unpaired == 1.0 ? exact : exact * std::sqrt(unpaired);
}

namespace {

Coefficient element(const SubspaceSpec& spec, int l1, const LadderMonomial& m, Coefficient c, int l2) {
  if (!m.conserves_number() || m.index_shift() != l1 - l2) return {};
  double amp = ladder_amplitude(spec.occupation_a(l2), m.r, m.p) * ladder_amplitude(spec.occupation_b(l2), m.s, m.q);
  return amp == 0.0 ? Coefficient{} : c * amp;
}

}  // namespace

Coefficient matrix_element(const SubspaceSpec& spec, int l1, const OperatorPoly& poly, int l2) {
  if (!spec.in_sector(l1) || !spec.in_sector(l2))
    throw std::out_of_range("Fock index outside the N = " + std::to_string(spec.total()) + " sector");
  Coefficient sum{};
  for (const auto& [m, c] : poly.terms()) sum += element(spec, l1, m, c, l2);
  return sum;
}

SectorMatrix::SectorMatrix(const SubspaceSpec& spec, const OperatorPoly& poly) : spec_(spec) {
  const int n = spec.dim();
  for (const auto& [m, c] : poly.terms()) {
    if (!m.conserves_number()) continue;
    const int d = m.index_shift();
    if (std::abs(d) >= n) continue;
    auto& band = bands_[d];
    band.resize(static_cast<std::size_t>(n - std::abs(d)));
    const int lo = d >= 0 ? spec.min_index() : spec.min_index() - d;
    for (std::size_t i = 0; i < band.size(); ++i) band[i] += element(spec, lo + static_cast<int>(i) + d, m, c, lo + static_cast<int>(i));
  }
}

Coefficient SectorMatrix::at(int l1, int l2) const {
  if (!spec_.contains(l1) || !spec_.contains(l2)) return {};
  const int d = l1 - l2;
  auto it = bands_.find(d);
  if (it == bands_.end()) return {};
  const int lo = d >= 0 ? spec_.min_index() : spec_.min_index() - d;
  return it->second[static_cast<std::size_t>(l2 - lo)];
}

Coefficient SectorMatrix::expectation(std::span<const Amplitude> z) const {
  Coefficient sum{};
  for (const auto& [d, band] : bands_) {
    const std::size_t start = d >= 0 ? 0 : static_cast<std::size_t>(-d);
    for (std::size_t i = 0; i < band.size(); ++i) {
      const std::size_t col = start + i;
      const std::size_t row = static_cast<std::size_t>(static_cast<long>(col) + d);
      sum += std::conj(z[row]) * band[i] * z[col];
    }
  }
  return sum;
}

Coefficient SectorMatrix::trace() const {
  auto it = bands_.find(0);
  Coefficient sum{};
  if (it != bands_.end())
    for (const auto& v : it->second) sum += v;
  return sum;
}

Coefficient SectorMatrix::trace_product(const SectorMatrix& other) const {
  Coefficient sum{};
  for (const auto& [d, band] : bands_) {
    auto it = other.bands_.find(-d);
    if (it == other.bands_.end()) continue;
    // A(l+d, l) B(l, l+d); both bands list the same column set shifted by d.
    const int lo_a = d >= 0 ? spec_.min_index() : spec_.min_index() - d;
    const int lo_b = -d >= 0 ? spec_.min_index() : spec_.min_index() + d;
    for (std::size_t i = 0; i < band.size(); ++i) {
      const int l = lo_a + static_cast<int>(i);
      sum += band[i] * it->second[static_cast<std::size_t>(l + d - lo_b)];
    }
  }
  return sum;
}

Coefficient SectorMatrix::diagonal_product(const SectorMatrix& other) const {
  auto a = bands_.find(0);
  auto b = other.bands_.find(0);
  Coefficient sum{};
  if (a == bands_.end() || b == other.bands_.end()) return sum;
  for (std::size_t i = 0; i < a->second.size(); ++i) sum += a->second[i] * b->second[i];
  return sum;
}

}  // namespace twomode
