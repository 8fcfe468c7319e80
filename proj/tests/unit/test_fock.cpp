#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "twomode/error.hpp"
#include "twomode/fock.hpp"
#include "twomode/parallel.hpp"
#include "twomode/random.hpp"

using namespace twomode;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::string field_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ParameterError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("subspace validation names the offending field") {
  CHECK(field_of([] { make_subspace(5, 3); }) == "N");
  CHECK(field_of([] { make_subspace(0, 1); }) == "N");
  CHECK(field_of([] { make_subspace(4, 2); }) == "n");
  CHECK(field_of([] { make_subspace(4, 7); }) == "n");
  CHECK_NOTHROW(make_subspace(4, 5));

  const auto spec = make_subspace(10, 5);
  CHECK(spec.indices() == std::vector<int>{-2, -1, 0, 1, 2});
  CHECK(spec.contains(2));
  CHECK_FALSE(spec.contains(3));
  CHECK(spec.in_sector(5));
  CHECK_FALSE(spec.in_sector(6));
  CHECK(spec.occupation_a(-2) == 3);
  CHECK(spec.occupation_b(-2) == 7);
  CHECK(spec.offset(-2) == 0);
  CHECK(spec.index_at(4) == 2);
}

TEST_CASE("state vectors reject wrong size or norm") {
  const auto spec = make_subspace(4, 3);
  CHECK_THROWS_AS(StateVector(spec, {1.0, 0.0}), ParameterError);
  CHECK_THROWS_AS(StateVector(spec, {1.0, 1.0, 0.0}), ParameterError);
  const StateVector s(spec, {0.0, {0.0, 1.0}, 0.0});
  CHECK(s.amplitude(0) == Amplitude(0.0, 1.0));
  CHECK(s.amplitude(5) == Amplitude(0.0));
  CHECK(basis_state(spec, -1).amplitude(-1) == Amplitude(1.0));
  CHECK_THROWS_AS(basis_state(spec, 2), ParameterError);
}

TEST_CASE("sampled states are normalized and seed-deterministic") {
  const auto spec = make_subspace(100, 11);
  const StreamFactory streams(42);
  for (std::uint64_t i = 0; i < 200; ++i) {
    auto rng = streams.stream(i);
    CHECK_THAT(sample_state(spec, rng).norm_squared(), WithinAbs(1.0, 1e-12));
  }
  auto r1 = streams.stream(7);
  auto r2 = StreamFactory(42).stream(7);
  const auto s1 = sample_state(spec, r1);
  const auto s2 = sample_state(spec, r2);
  CHECK(std::equal(s1.coefficients().begin(), s1.coefficients().end(), s2.coefficients().begin()));

  auto other = streams.stream(7, stream_tag::phase);
  const auto s3 = sample_state(spec, other);
  CHECK_FALSE(std::equal(s1.coefficients().begin(), s1.coefficients().end(), s3.coefficients().begin()));
}

TEST_CASE("n = 1 has a single state with unit amplitude") {
  const auto spec = make_subspace(4, 1);
  for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
    auto rng = StreamFactory(seed).stream(0);
    const auto s = sample_state(spec, rng);
    CHECK(s.amplitude(0) == Amplitude(1.0));
  }
  const std::vector<int> idx{0, 0};
  std::vector<StateVector> samples;
  for (std::uint64_t i = 0; i < 64; ++i) {
    auto rng = StreamFactory(3).stream(i);
    samples.push_back(sample_state(spec, rng));
  }
  const auto est = estimate_moments(samples, idx);
  CHECK(est.value == std::complex<double>(1.0));
  CHECK(est.standard_error == 0.0);
}

TEST_CASE("uniform moment predictions") {
  const auto spec = make_subspace(100, 11);
  CHECK(uniform_moment(spec, std::vector<int>{0, 0}) == 1.0 / 11);
  CHECK(uniform_moment(spec, std::vector<int>{0, 1}) == 0.0);
  CHECK_THAT(uniform_moment(spec, std::vector<int>{0, 1, 0, 1}), WithinRel(1.0 / 132, 1e-15));
  CHECK_THAT(uniform_moment(spec, std::vector<int>{0, 0, 0, 0}), WithinRel(2.0 / 132, 1e-15));
  CHECK(uniform_moment(spec, std::vector<int>{0, 1, 1, 1}) == 0.0);
  CHECK_THROWS_AS(uniform_moment(spec, std::vector<int>{0, 9}), ParameterError);
  CHECK_THROWS_AS(uniform_moment(spec, std::vector<int>{0, 1, 2}), ParameterError);
}

TEST_CASE("moment estimates match the uniform measure") {
  const auto spec = make_subspace(100, 11);
  const std::vector<std::vector<int>> sets{{0, 0}, {0, 1}, {-5, 5}, {0, 1, 0, 1}, {0, 1, 1, 0}, {2, 2, 2, 2}, {0, 1, 2, 3}};
  const auto est = sample_moments(spec, sets, 200000, 42);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    INFO("set " << i);
    const double z = std::abs(est[i].value - uniform_moment(spec, sets[i])) / est[i].standard_error;
    CHECK(z < 5.0);
    CHECK(est[i].sample_count == 200000);
  }
}

TEST_CASE("accumulator and one-shot estimator agree") {
  const auto spec = make_subspace(20, 5);
  const std::vector<int> idx{-1, 2, -1, 2};
  MomentAccumulator acc(spec, {idx}, 8);
  std::vector<StateVector> samples;
  for (std::uint64_t i = 0; i < 500; ++i) {
    auto rng = StreamFactory(11).stream(i);
    samples.push_back(sample_state(spec, rng));
    acc.add(samples.back());
  }
  const auto a = acc.estimates().front();
  const auto b = estimate_moments(samples, idx, 8);
  CHECK(a.value == b.value);
  CHECK(a.standard_error == b.standard_error);

  auto rng = StreamFactory(1).stream(0);
  CHECK_THROWS_AS(acc.add(sample_state(make_subspace(20, 7), rng)), ParameterError);
}

// A fixed Haar-random unitary applied to every sample leaves the moments
// at their uniform values.
TEST_CASE("moments are invariant under a fixed unitary rotation") {
  const auto spec = make_subspace(40, 7);
  const int n = spec.dim();
  auto rot_rng = StreamFactory(5).stream(0, stream_tag::rotation);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXcd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = {gauss(rot_rng), gauss(rot_rng)};
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  const Eigen::MatrixXcd u = qr.householderQ();
  REQUIRE((u.adjoint() * u - Eigen::MatrixXcd::Identity(n, n)).norm() < 1e-12);

  const std::vector<std::vector<int>> sets{{0, 0}, {1, -2}, {3, 3}, {0, 1, 0, 1}, {-3, -3, -3, -3}, {1, 2, 2, 1}};
  MomentAccumulator plain(spec, sets);
  MomentAccumulator rotated(spec, sets);
  const StreamFactory streams(8);
  for (std::uint64_t i = 0; i < 100000; ++i) {
    auto rng = streams.stream(i);
    const auto s = sample_state(spec, rng);
    Eigen::VectorXcd v(n);
    for (int j = 0; j < n; ++j) v(j) = s.coefficients()[static_cast<std::size_t>(j)];
    const Eigen::VectorXcd w = u * v;
    plain.add(s);
    rotated.add(StateVector(spec, std::vector<Amplitude>(w.data(), w.data() + n)));
  }
  const auto p = plain.estimates();
  const auto r = rotated.estimates();
  for (std::size_t i = 0; i < sets.size(); ++i) {
    INFO("set " << i);
    const double expected = uniform_moment(spec, sets[i]);
    CHECK(std::abs(r[i].value - expected) < 5.0 * r[i].standard_error);
    CHECK(std::abs(p[i].value - expected) < 5.0 * p[i].standard_error);
  }
}

// Run by ctest at two TWOMODE_THREADS settings. The parallel result must
// equal a serial accumulation bit for bit.
TEST_CASE("sampled moments do not depend on the thread count", "[threads]") {
  const auto spec = make_subspace(60, 9);
  const auto est = sample_moments(spec, {{0, 0}, {1, -1, 1, -1}}, 20000, 2024);
  const auto again = sample_moments(spec, {{0, 0}, {1, -1, 1, -1}}, 20000, 2024);
  for (std::size_t i = 0; i < est.size(); ++i) {
    CHECK(est[i].value == again[i].value);
    CHECK(est[i].standard_error == again[i].standard_error);
  }
  MomentAccumulator acc(spec, {{0, 0}, {1, -1, 1, -1}});
  const StreamFactory streams(2024);
  for (std::uint64_t i = 0; i < 20000; ++i) {
    auto rng = streams.stream(i);
    acc.add(sample_state(spec, rng));
  }
  const auto ref = acc.estimates();
  CHECK(ref[0].value == est[0].value);
  CHECK(ref[1].value == est[1].value);
  CHECK(ref[1].standard_error == est[1].standard_error);
  INFO("workers " << worker_count());
  CHECK(worker_count() >= 1);
}

TEST_CASE("pairwise summation is exact on representable inputs") {
  std::vector<double> v(1000, 0.125);
  CHECK(pairwise_sum(v) == 125.0);
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(1013, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
}
