#include "twomode/wick.hpp"

#include <array>
#include <numeric>
#include <stdexcept>

namespace twomode {

FieldMonomial::FieldMonomial(std::vector<MomentumCombo> site_phases, std::vector<int> creators,
                             std::vector<int> annihilators)
    : sites_(std::move(site_phases)), creators_(std::move(creators)), annihilators_(std::move(annihilators)) {
  const int n = static_cast<int>(sites_.size());
  for (int s : creators_)
    if (s < 0 || s >= n) throw std::invalid_argument("creator site out of range");
  for (int s : annihilators_)
    if (s < 0 || s >= n) throw std::invalid_argument("annihilator site out of range");
}

FieldMonomial FieldMonomial::density_pair(MomentumCombo k) {
  // Psi^dag(r) Psi^dag(r') Psi(r') Psi(r): r carries exp(-i k.r), r' carries exp(+i k.r').
  return FieldMonomial({k, -k}, {0, 1}, {1, 0});
}

namespace {

struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (left annihilator slot, right creator slot)
};

void enumerate(std::size_t slot, std::size_t left_count, std::vector<bool>& used,
               std::vector<std::pair<std::size_t, std::size_t>>& current, std::vector<Matching>& out) {
  if (slot == left_count) {
    out.push_back({current});
    return;
  }
  enumerate(slot + 1, left_count, used, current, out);
  for (std::size_t j = 0; j < used.size(); ++j) {
    if (used[j]) continue;
    used[j] = true;
    current.emplace_back(slot, j);
    enumerate(slot + 1, left_count, used, current, out);
    current.pop_back();
    used[j] = false;
  }
}

int find(std::vector<int>& parent, int x) {
  while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
  return x;
}

}  // namespace

std::vector<ContractionTerm> wick_expand(const FieldMonomial& left, const FieldMonomial& right) {
  const int offset = static_cast<int>(left.site_phases().size());
  const int total_sites = offset + static_cast<int>(right.site_phases().size());

  std::vector<Matching> matchings;
  std::vector<bool> used(right.creators().size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> current;
  enumerate(0, left.annihilators().size(), used, current, matchings);

  std::vector<ContractionTerm> terms;
  terms.reserve(matchings.size());
  for (const auto& m : matchings) {
    std::vector<int> parent(static_cast<std::size_t>(total_sites));
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<bool> left_gone(left.annihilators().size(), false);
    std::vector<bool> right_gone(right.creators().size(), false);
    for (auto [i, j] : m.pairs) {
      left_gone[i] = right_gone[j] = true;
      int a = find(parent, left.annihilators()[i]);
      int b = find(parent, right.creators()[j] + offset);
      if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }

    // Compact the merged sites, keeping first-appearance order.
    std::vector<int> label(static_cast<std::size_t>(total_sites), -1);
    std::vector<MomentumCombo> phases;
    for (int s = 0; s < total_sites; ++s) {
      int root = find(parent, s);
      if (label[static_cast<std::size_t>(root)] < 0) {
        label[static_cast<std::size_t>(root)] = static_cast<int>(phases.size());
        phases.push_back({});
      }
      const MomentumCombo& q = s < offset ? left.site_phases()[static_cast<std::size_t>(s)]
                                          : right.site_phases()[static_cast<std::size_t>(s - offset)];
      phases[static_cast<std::size_t>(label[static_cast<std::size_t>(root)])] =
          phases[static_cast<std::size_t>(label[static_cast<std::size_t>(root)])] + q;
    }
    auto relabel = [&](int s) { return label[static_cast<std::size_t>(find(parent, s))]; };

    std::vector<int> creators, annihilators;
    for (int s : left.creators()) creators.push_back(relabel(s));
    for (std::size_t j = 0; j < right.creators().size(); ++j)
      if (!right_gone[j]) creators.push_back(relabel(right.creators()[j] + offset));
    for (std::size_t i = 0; i < left.annihilators().size(); ++i)
      if (!left_gone[i]) annihilators.push_back(relabel(left.annihilators()[i]));
    for (int s : right.annihilators()) annihilators.push_back(relabel(s + offset));

    terms.push_back({FieldMonomial(std::move(phases), std::move(creators), std::move(annihilators)),
                     static_cast<int>(m.pairs.size())});
  }
  return terms;
}

OperatorPoly reduce_to_modes(const FieldMonomial& monomial, const ModeKernel& kernel, const Momentum& k,
                             const Momentum& k2) {
  const std::size_t sites = monomial.site_phases().size();
  std::vector<int> creator_of(sites, -1), annihilator_of(sites, -1);
  for (std::size_t c = 0; c < monomial.creators().size(); ++c) {
    auto s = static_cast<std::size_t>(monomial.creators()[c]);
    if (creator_of[s] >= 0) throw std::logic_error("site carries more than one creator");
    creator_of[s] = static_cast<int>(c);
  }
  for (std::size_t a = 0; a < monomial.annihilators().size(); ++a) {
    auto s = static_cast<std::size_t>(monomial.annihilators()[a]);
    if (annihilator_of[s] >= 0) throw std::logic_error("site carries more than one annihilator");
    annihilator_of[s] = static_cast<int>(a);
  }
  for (std::size_t s = 0; s < sites; ++s)
    if (creator_of[s] < 0 || annihilator_of[s] < 0)
      throw std::logic_error("every site needs one creator and one annihilator");

  // kernel values per site, indexed by 2*x + y
  std::vector<std::array<std::complex<double>, 4>> values(sites);
  for (std::size_t s = 0; s < sites; ++s) {
    const Momentum q = monomial.site_phases()[s].evaluate(k, k2);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) values[s][static_cast<std::size_t>(2 * x + y)] = kernel(Mode(x), Mode(y), q);
  }

  OperatorPoly out;
  std::size_t combos = std::size_t{1} << (2 * sites);
  for (std::size_t code = 0; code < combos; ++code) {
    std::complex<double> c = 1.0;
    LadderMonomial m;
    for (std::size_t s = 0; s < sites && c != 0.0; ++s) {
      std::size_t xy = (code >> (2 * s)) & 3u;
      c *= values[s][xy];
      (xy >> 1 ? m.q : m.p) += 1;
      (xy & 1 ? m.s : m.r) += 1;
    }
    out.add(m, c);
  }
  return out;
}

OperatorPoly build_r_poly(const ModeKernel& kernel, const Momentum& k) {
  return reduce_to_modes(FieldMonomial::density_pair({1, 0}), kernel, k);
}

OperatorPoly wick_product(const Momentum& k, const Momentum& k2, const ModeKernel& kernel, WickOrders orders) {
  const auto terms = wick_expand(FieldMonomial::density_pair({1, 0}), FieldMonomial::density_pair({0, 1}));
  OperatorPoly out;
  for (const auto& term : terms) {
    bool keep = (term.contractions == 0 && orders.zero) || (term.contractions == 1 && orders.single) ||
                (term.contractions == 2 && orders.double_);
    if (keep) out += reduce_to_modes(term.monomial, kernel, k, k2);
  }
  return out;
}

}  // namespace twomode
