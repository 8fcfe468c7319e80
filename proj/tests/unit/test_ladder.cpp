#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dense_boson.hpp"
#include "twomode/ladder.hpp"

using namespace twomode;
using Catch::Matchers::WithinAbs;

namespace {

OperatorPoly random_poly(std::mt19937_64& rng, int max_exp, int terms, bool conserving) {
  std::uniform_int_distribution<int> e(0, max_exp);
  std::normal_distribution<double> c;
  OperatorPoly p;
  while (static_cast<int>(p.size()) < terms) {
    LadderMonomial m{e(rng), e(rng), e(rng), e(rng)};
    if (conserving && !m.conserves_number()) continue;
    p.add(m, {c(rng), c(rng)});
  }
  return p;
}

}  // namespace

TEST_CASE("documented normal-ordering identities") {
  const auto na = OperatorPoly::number_a();
  const auto sq = na * na;
  CHECK(sq.size() == 2);
  CHECK(sq.coefficient({2, 0, 2, 0}) == Coefficient(1.0));
  CHECK(sq.coefficient({1, 0, 1, 0}) == Coefficient(1.0));

  const auto bda = OperatorPoly::b_dagger() * OperatorPoly::a();
  const auto adb = OperatorPoly::a_dagger() * OperatorPoly::b();
  const auto prod = bda * adb;
  // b^dag a a^dag b = b^dag (N_a + 1) b, so the extra term is N_b.
  const auto expected = OperatorPoly::number_a() * OperatorPoly::number_b() + OperatorPoly::number_b();
  CHECK(prod.distance(expected) == 0.0);
  const dense::TwoMode dm(6);
  CHECK((dm.poly(prod) - dm.poly(bda) * dm.poly(adb)).block(0, 0, 30, 30).norm() < 1e-12);

  CHECK((sq * OperatorPoly::identity()) == sq);
  CHECK((OperatorPoly::a() * OperatorPoly::a_dagger()).distance(OperatorPoly::number_a() + OperatorPoly::identity()) ==
        0.0);
}

TEST_CASE("zero coefficients are not stored") {
  OperatorPoly p = OperatorPoly::number_a();
  p.add({1, 0, 1, 0}, -1.0);
  CHECK(p.empty());
  auto q = OperatorPoly::monomial({1, 1, 0, 0}, 1e-14) + OperatorPoly::number_b();
  CHECK(q.pruned(1e-12).size() == 1);
}

TEST_CASE("documented matrix elements") {
  const auto spec = make_subspace(4, 3);
  const auto bda = OperatorPoly::b_dagger() * OperatorPoly::a();
  CHECK_THAT(matrix_element(spec, -1, bda, 0).real(), WithinAbs(std::sqrt(6.0), 1e-15));
  CHECK(matrix_element(spec, 1, bda, 0) == Coefficient(0.0));
  CHECK(matrix_element(spec, 0, OperatorPoly::number_a() * OperatorPoly::number_b(), 0) == Coefficient(4.0));
  CHECK_THROWS_AS(matrix_element(spec, 3, bda, 0), std::out_of_range);
  // Number-changing monomials vanish inside a fixed-N sector.
  CHECK(matrix_element(spec, 0, OperatorPoly::a(), 0) == Coefficient(0.0));
}

TEST_CASE("ladder amplitudes pair integer factors") {
  CHECK(ladder_amplitude(5, 2, 2) == 20.0);
  CHECK_THAT(ladder_amplitude(5, 1, 0), WithinAbs(std::sqrt(5.0), 1e-15));
  CHECK_THAT(ladder_amplitude(3, 0, 2), WithinAbs(std::sqrt(20.0), 1e-14));
  CHECK(ladder_amplitude(1, 2, 0) == 0.0);
  // Large occupations stay finite.
  CHECK(std::isfinite(ladder_amplitude(1000000, 4, 4)));
}

TEST_CASE("normal ordering matches dense matrices") {
  const int cutoff = 10;
  const dense::TwoMode dm(cutoff);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    const auto lhs = random_poly(rng, 2, 3, false);
    const auto rhs = random_poly(rng, 2, 3, false);
    const dense::Mat expected = dm.poly(lhs) * dm.poly(rhs);
    const dense::Mat got = dm.poly(lhs * rhs);
    // Truncation corrupts only states within 4 quanta of the cutoff.
    double worst = 0.0;
    for (int na = 0; na + 4 <= cutoff; ++na)
      for (int nb = 0; nb + 4 <= cutoff; ++nb)
        for (int ma = 0; ma + 4 <= cutoff; ++ma)
          for (int mb = 0; mb + 4 <= cutoff; ++mb) {
            const auto i = dm.index(na, nb), j = dm.index(ma, mb);
            worst = std::max(worst, std::abs(expected(i, j) - got(i, j)) / (1.0 + std::abs(expected(i, j))));
          }
    INFO("trial " << trial);
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("sector matrix elements match dense matrices for N <= 12") {
  std::mt19937_64 rng(3);
  for (int total = 2; total <= 12; total += 2) {
    const dense::TwoMode dm(total + 2);
    const auto spec = make_subspace(total, total + 1);
    const auto p = random_poly(rng, 3, 6, true);
    const dense::Mat m = dm.poly(p);
    const int h = total / 2;
    for (int l1 = -h; l1 <= h; ++l1)
      for (int l2 = -h; l2 <= h; ++l2) {
        const auto ref = m(dm.index(h + l1, h - l1), dm.index(h + l2, h - l2));
        REQUIRE(std::abs(matrix_element(spec, l1, p, l2) - ref) < 1e-9 * (1.0 + std::abs(ref)));
      }
  }
}

TEST_CASE("sector matrix traces and expectations") {
  std::mt19937_64 rng(9);
  const auto spec = make_subspace(12, 7);
  const auto p = random_poly(rng, 2, 5, true);
  const auto q = random_poly(rng, 2, 5, true);
  const SectorMatrix mp(spec, p), mq(spec, q);

  Coefficient trace = 0.0, tp = 0.0, dp = 0.0;
  for (int l1 : spec.indices()) {
    trace += matrix_element(spec, l1, p, l1);
    dp += matrix_element(spec, l1, p, l1) * matrix_element(spec, l1, q, l1);
    for (int l2 : spec.indices()) tp += matrix_element(spec, l1, p, l2) * matrix_element(spec, l2, q, l1);
    for (int l2 : spec.indices()) REQUIRE(std::abs(mp.at(l1, l2) - matrix_element(spec, l1, p, l2)) < 1e-12);
  }
  CHECK(std::abs(mp.trace() - trace) < 1e-9);
  CHECK(std::abs(mp.trace_product(mq) - tp) < 1e-9 * std::abs(tp));
  CHECK(std::abs(mp.diagonal_product(mq) - dp) < 1e-9 * (1.0 + std::abs(dp)));

  std::vector<Amplitude> z(7);
  std::normal_distribution<double> g;
  double norm = 0.0;
  for (auto& c : z) {
    c = {g(rng), g(rng)};
    norm += std::norm(c);
  }
  for (auto& c : z) c /= std::sqrt(norm);
  Coefficient expect = 0.0;
  for (int l1 : spec.indices())
    for (int l2 : spec.indices())
      expect += std::conj(z[spec.offset(l1)]) * matrix_element(spec, l1, p, l2) * z[spec.offset(l2)];
  CHECK(std::abs(mp.expectation(z) - expect) < 1e-9 * (1.0 + std::abs(expect)));
}

TEST_CASE("adjoint and number conservation flags") {
  const LadderMonomial m{2, 1, 0, 3};
  CHECK(m.conserves_number());
  CHECK(m.index_shift() == 2);
  CHECK(m.adjoint() == LadderMonomial{0, 3, 2, 1});
  auto p = OperatorPoly::monomial(m, {1.0, 2.0});
  CHECK(p.adjoint().coefficient(m.adjoint()) == Coefficient(1.0, -2.0));
  CHECK_FALSE((p + OperatorPoly::a()).conserves_number());
}
