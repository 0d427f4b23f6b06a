#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "coreprune/activation.hpp"
#include "coreprune/sensitivity.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace coreprune;
using support::error_of;

namespace {

void check_contract(const SensitivityMap& map) {
  REQUIRE(map.peel.size() == static_cast<std::size_t>(map.size()));
  REQUIRE(map.rank.size() == static_cast<std::size_t>(map.size()));
  int top = 0;
  for (Index i = 0; i < map.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    CHECK(map.peel[k] >= 1);
    CHECK(map.rank[k] >= 1);
    const double expected = 2.0 * std::pow(static_cast<double>(map.rank[k]), 1.5) / map.peel[k];
    CHECK(map.s(i) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(map.s(i) > 0.0);
    top = std::max(top, map.peel[k]);
  }
  for (int level = 1; level <= top; ++level)
    CHECK(std::find(map.peel.begin(), map.peel.end(), level) != map.peel.end());
  CHECK(map.total == doctest::Approx(map.s.sum()).epsilon(1e-9));
}

}  // namespace

TEST_CASE("tiny sets are scored in a single level") {
  std::mt19937_64 rng(1);
  const PointSet p(oracle::gaussian(12, 3, rng));
  const SensitivityMap map = onion_sensitivities(p);
  check_contract(map);
  for (Index i = 0; i < p.size(); ++i) {
    CHECK(map.peel[static_cast<std::size_t>(i)] == 1);
    CHECK(map.s(i) == doctest::Approx(2.0 * std::pow(3.0, 1.5)));
  }
}

TEST_CASE("single row") {
  const SensitivityMap map = onion_sensitivities(PointSet(Matrix::Ones(1, 4)));
  check_contract(map);
  CHECK(map.s(0) == doctest::Approx(2.0));
}

TEST_CASE("total sensitivity grows like the harmonic bound") {
  std::mt19937_64 rng(2);
  const PointSet p(oracle::affine_cloud(400, 12, 4, rng));
  const SensitivityMap map = onion_sensitivities(p);
  check_contract(map);
  const double r = 4.0;
  CHECK(map.total <= 4.0 * r * (r + 1.0) * std::pow(r, 1.5) * (1.0 + std::log(400.0)));
  CHECK(*std::max_element(map.peel.begin(), map.peel.end()) > 1);
}

TEST_CASE("earlier peels carry larger sensitivities") {
  std::mt19937_64 rng(3);
  const PointSet p(oracle::affine_cloud(300, 6, 3, rng));
  const SensitivityMap map = onion_sensitivities(p);
  check_contract(map);
  for (Index i = 0; i < p.size(); ++i)
    for (Index j = 0; j < p.size(); ++j) {
      const auto a = static_cast<std::size_t>(i);
      const auto b = static_cast<std::size_t>(j);
      if (map.rank[a] == map.rank[b] && map.peel[a] < map.peel[b]) CHECK(map.s(i) >= map.s(j));
    }
}

TEST_CASE("uniform sensitivities with m = n give unit weights") {
  std::mt19937_64 rng(4);
  const PointSet p(oracle::gaussian(20, 5, rng));
  const SensitivityMap map = onion_sensitivities(p);
  const WeightedCoreset c = sample_coreset(p, map, 20, 0);
  CHECK(c.size() == 20);
  for (double u : c.u) CHECK(u == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("sampling is reproducible") {
  std::mt19937_64 rng(5);
  const PointSet p(oracle::affine_cloud(200, 5, 3, rng));
  const SensitivityMap map = onion_sensitivities(p);
  const WeightedCoreset a = sample_coreset(p, map, 50, 7);
  const WeightedCoreset b = sample_coreset(p, map, 50, 7);
  const WeightedCoreset c = sample_coreset(p, map, 50, 8);
  CHECK(a.indices == b.indices);
  CHECK(a.u == b.u);
  CHECK(a.indices != c.indices);
  for (std::size_t k = 0; k < a.indices.size(); ++k)
    CHECK(a.u[k] == doctest::Approx(map.total / (50.0 * map.s(a.indices[k]))).epsilon(1e-15));
}

TEST_CASE("sample size must be positive") {
  const PointSet p(Matrix::Identity(3, 3));
  const SensitivityMap map = onion_sensitivities(p);
  CHECK(error_of([&] { sample_coreset(p, map, 0, 0); }) == ErrorKind::InvalidSampleSize);
  CHECK(error_of([&] { split_sample_size(3, 3, 0); }) == ErrorKind::InvalidSampleSize);
  CHECK(error_of([&] { split_sample_size(3, 3, 1); }) == ErrorKind::InvalidSampleSize);
}

TEST_CASE("selection frequencies follow the sensitivities") {
  std::mt19937_64 rng(6);
  const PointSet p(oracle::affine_cloud(150, 4, 2, rng));
  const SensitivityMap map = onion_sensitivities(p);
  const Index draws = 100000;
  const WeightedCoreset c = sample_coreset(p, map, draws, 11);
  std::vector<Index> counts(static_cast<std::size_t>(p.size()), 0);
  for (Index i : c.indices) ++counts[static_cast<std::size_t>(i)];
  for (Index i = 0; i < p.size(); ++i) {
    const double prob = map.s(i) / map.total;
    const double mean = prob * static_cast<double>(draws);
    const double sd = std::sqrt(static_cast<double>(draws) * prob * (1.0 - prob));
    CHECK(std::abs(static_cast<double>(counts[static_cast<std::size_t>(i)]) - mean) <= 3.0 * sd + 1.0);
  }
}

TEST_CASE("weighted estimator is unbiased for relu and abs") {
  std::mt19937_64 rng(7);
  const PointSet p(oracle::affine_cloud(200, 6, 3, rng));
  const SensitivityMap map = onion_sensitivities(p);
  const Matrix queries = oracle::gaussian(3, 6, rng);
  for (Activation kind : {Activation::Relu, Activation::Abs}) {
    for (Index q = 0; q < queries.rows(); ++q) {
      const Vector x = queries.row(q).transpose();
      const double full = layer_cost(p, x, kind);
      double acc = 0.0;
      const int trials = 4000;
      for (int t = 0; t < trials; ++t) acc += coreset_cost(p, sample_coreset(p, map, 30, t), x, kind);
      CHECK(std::abs(acc / trials - full) <= 0.02 * std::abs(full));
    }
  }
}

TEST_CASE("nonnegative weights reduce to the unweighted path") {
  std::mt19937_64 rng(8);
  const Matrix P = oracle::affine_cloud(120, 5, 3, rng);
  const PointSet plain(P);
  const WeightedCoreset a = gen_coreset(PointSet(P, Vector::Ones(120)), 40, 3);
  const WeightedCoreset b = sample_coreset(plain, onion_sensitivities(plain), 40, 3);
  CHECK(a.indices == b.indices);
  CHECK(a.u == b.u);

  Vector w(120);
  for (Index i = 0; i < 120; ++i) w(i) = 0.5 + static_cast<double>(i % 3);
  const PointSet weighted(P, w);
  Matrix scaled = P;
  for (Index i = 0; i < 120; ++i) scaled.row(i) *= w(i);
  const SignedSensitivities sens = signed_sensitivities(weighted);
  const SensitivityMap direct = onion_sensitivities(PointSet(scaled));
  CHECK(sens.map.s == direct.s);
  CHECK(sens.n_negative == 0);
}

TEST_CASE("proportional split") {
  const SampleSplit s = split_sample_size(80, 20, 10);
  CHECK(s.positive == 8);
  CHECK(s.negative == 2);
  const SampleSplit one_sided = split_sample_size(0, 20, 10);
  CHECK(one_sided.positive == 0);
  CHECK(one_sided.negative == 10);
  const SampleSplit skewed = split_sample_size(99, 1, 10);
  CHECK(skewed.positive == 9);
  CHECK(skewed.negative == 1);
}

TEST_CASE("mixed-sign estimator is unbiased") {
  std::mt19937_64 rng(9);
  const Matrix P = oracle::affine_cloud(160, 5, 3, rng);
  std::uniform_real_distribution<double> pos(0.5, 1.5);
  std::uniform_real_distribution<double> neg(-0.5, -0.1);
  Vector w(160);
  for (Index i = 0; i < 160; ++i) w(i) = i % 5 == 0 ? neg(rng) : pos(rng);
  const PointSet weighted(P, w);
  const SignedSensitivities sens = signed_sensitivities(weighted);
  CHECK(sens.n_positive == 128);
  CHECK(sens.n_negative == 32);
  const Matrix queries = oracle::gaussian(3, 5, rng);
  for (Index q = 0; q < queries.rows(); ++q) {
    const Vector x = queries.row(q).transpose();
    const double full = layer_cost(weighted, x, Activation::Relu);
    double acc = 0.0;
    const int trials = 4000;
    for (int t = 0; t < trials; ++t)
      acc += coreset_cost(weighted, sample_signed(weighted, sens, 40, t), x, Activation::Relu);
    CHECK(std::abs(acc / trials - full) <= 0.02 * std::abs(full));
  }
}

TEST_CASE("signed weights follow the class totals") {
  std::mt19937_64 rng(10);
  const Matrix P = oracle::gaussian(60, 4, rng);
  Vector w(60);
  for (Index i = 0; i < 60; ++i) w(i) = i % 4 == 0 ? -2.0 : 1.5;
  const PointSet weighted(P, w);
  const SignedSensitivities sens = signed_sensitivities(weighted);
  const WeightedCoreset c = sample_signed(weighted, sens, 20, 1);
  CHECK(c.size() == 20);
  const SampleSplit split = split_sample_size(45, 15, 20);
  for (std::size_t k = 0; k < c.indices.size(); ++k) {
    const Index i = c.indices[k];
    const bool positive = w(i) >= 0.0;
    const double total = positive ? sens.total_positive : sens.total_negative;
    const double m = static_cast<double>(positive ? split.positive : split.negative);
    CHECK(c.u[k] == doctest::Approx(total * w(i) / (m * sens.map.s(i))).epsilon(1e-15));
  }
}

TEST_CASE("sample size bound") {
  const Index m = sample_size_bound(1000, 10, 10, 15.0, 0.5, 0.1);
  const double ln_n = std::log(1000.0);
  const double direct = std::ceil(15.0 * std::pow(10.0, 3.5) * ln_n / 0.25 *
                                  (10.0 * std::log(15.0 * 10.0 * ln_n) + std::log(10.0)));
  CHECK(static_cast<double>(m) == direct);
  CHECK(sample_size_bound(1000, 10, 10, 15.0, 0.25, 0.1) >= 4 * m - 4);
  CHECK(sample_size_bound(1000, 10, 10, 15.0, 0.5, 0.1, 2.0) >= 2 * m - 1);
  CHECK(sample_size_bound(1000, 10, 10, 0.0, 0.5, 0.1) >= 1);
  CHECK(error_of([] { sample_size_bound(10, 2, 2, 1.0, 1.0, 0.1); }) == ErrorKind::InvalidParameter);
  CHECK(error_of([] { sample_size_bound(10, 2, 2, 1.0, 0.5, 0.0); }) == ErrorKind::InvalidParameter);
  CHECK(error_of([] { sample_size_bound(10, 2, 2, -1.0, 0.5, 0.1); }) == ErrorKind::InvalidParameter);
  CHECK(error_of([] { sample_size_bound(10, 2, 2, 1.0, 0.5, 0.1, 0.0); }) == ErrorKind::InvalidParameter);
}
