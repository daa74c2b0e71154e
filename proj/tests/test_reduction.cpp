#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "quadform/reduction.hpp"
#include "quadform/transforms.hpp"

using namespace quadform;
using doctest::Approx;

namespace {

RawForm example_rank_deficient() {
  RawForm f;
  f.A = 0.5 * Mat{{-1, -1, 1, -1}, {-1, -1, -1, 1}, {1, -1, 1, 1}, {-1, 1, 1, 1}};
  f.b = Vec::Zero(4);
  f.mu = Vec{{0, 1, 0, 1}};
  f.sigma_mat = 0.25 * Mat{{5, 5, 3, 3}, {5, 5, 3, 3}, {3, 3, 9, 1}, {3, 3, 1, 9}};
  return f;
}

RawForm example_linear_term() {
  RawForm f;
  f.A = Mat{{7, 24, 0}, {24, -7, 0}, {0, 0, 25}};
  f.b = Vec{{40, 50, 30}};
  f.mu = Vec::Zero(3);
  f.sigma_mat = Mat::Identity(3, 3);
  return f;
}

RawComplexForm example_complex() {
  const cplx i(0, 1);
  RawComplexForm f;
  f.A = CMat{{1.0, -i}, {i, 1.0}};
  f.b = CVec{{1.0, 1.0}};
  f.mu = CVec{{1.0, 1.0 + i}};
  f.sigma_mat = CMat{{10.0, -6.0 * i}, {6.0 * i, 10.0}};
  return f;
}

Mat random_spd(std::mt19937_64& g, int n, int rank) {
  std::normal_distribution<double> z;
  Mat L(n, rank);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rank; ++j) L(i, j) = z(g);
  return L * L.transpose();
}

Mat random_sym(std::mt19937_64& g, int n) {
  std::normal_distribution<double> z;
  Mat M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = z(g);
  return 0.5 * (M + M.transpose());
}

}  // namespace

TEST_CASE("rank-deficient covariance example") {
  const EffectiveForm e = reduce_real(example_rank_deficient());
  REQUIRE(e.size() == 2);
  CHECK(e.lambda[0] == Approx(2.0).epsilon(1e-12));
  CHECK(e.lambda[1] == Approx(-2.0).epsilon(1e-12));
  CHECK(e.h2[0] == Approx(0.125).epsilon(1e-12));
  CHECK(e.h2[1] == Approx(0.125).epsilon(1e-12));
  CHECK(e.sigma_gauss == Approx(2.0).epsilon(1e-12));
  CHECK(e.constant == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("linear term example groups the repeated eigenvalue") {
  const ReducedForm r = reduce(example_linear_term());
  REQUIRE(r.size() == 2);
  CHECK(r.omega[0] == Approx(25.0).epsilon(1e-12));
  CHECK(r.omega[1] == Approx(-25.0).epsilon(1e-12));
  CHECK(r.nu == std::vector<int>{2, 1});
  CHECK(r.delta2[0] == Approx(1186.0 / 625.0).epsilon(1e-12));
  CHECK(r.delta2[1] == Approx(64.0 / 625.0).epsilon(1e-12));
  CHECK(r.sigma_gauss == 0.0);
  CHECK(r.constant == Approx(-1122.0 / 25.0).epsilon(1e-12));
}

TEST_CASE("complex example") {
  const ReducedForm r = reduce_complex(example_complex());
  REQUIRE(r.size() == 1);
  CHECK(r.omega[0] == Approx(16.0).epsilon(1e-12));
  CHECK(r.nu[0] == 2);
  CHECK(r.delta2[0] == Approx(53.0 / 128.0).epsilon(1e-12));
  CHECK(r.sigma_gauss == Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r.constant == Approx(3.0 / 8.0).epsilon(1e-12));
}

TEST_CASE("reduction preserves mean and variance") {
  std::mt19937_64 g(11);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + trial % 5;
    RawForm f;
    f.A = random_sym(g, n);
    f.sigma_mat = random_spd(g, n, 1 + trial % n);
    f.mu = Vec(n);
    f.b = Vec(n);
    for (int i = 0; i < n; ++i) {
      f.mu[i] = z(g);
      f.b[i] = z(g);
    }
    f.c = z(g);
    const double mean = (f.A * f.sigma_mat).trace() + f.mu.dot(f.A * f.mu) + f.b.dot(f.mu) + f.c;
    const Vec lin = 2.0 * f.A * f.mu + f.b;
    const Mat AS = f.A * f.sigma_mat;
    const double var = 2.0 * (AS * AS).trace() + lin.dot(f.sigma_mat * lin);
    const auto k = cumulants(reduce(f), 2);
    CHECK(k[0] == Approx(mean).epsilon(1e-9).scale(1.0));
    CHECK(k[1] == Approx(var).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("factored eigenvalues agree with the direct nonsymmetric solve") {
  std::mt19937_64 g(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 6;
    const Mat S = random_spd(g, n, n);
    const Mat A = random_sym(g, n);
    RawForm f{A, Vec::Zero(n), 0.0, Vec::Zero(n), S};
    auto e = reduce_real(f).lambda;
    std::sort(e.begin(), e.end(), std::greater<>());
    const auto d = eigenvalues_sigma_a(S, A);
    REQUIRE(e.size() == d.size());
    for (std::size_t i = 0; i < e.size(); ++i) CHECK(e[i] == Approx(d[i]).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("grouping and expansion round trip") {
  EffectiveForm e{{3.0, 1.0, 3.0, -2.0}, {0.5, 0.0, 0.25, 1.0}, 0.3, 1.5};
  const ReducedForm r = group_eigenvalues(e);
  REQUIRE(r.size() == 3);
  int dof = r.total_dof();
  CHECK(dof == 4);
  const EffectiveForm back = expand(r);
  const auto k1 = cumulants(r, 4);
  const auto k2 = cumulants(group_eigenvalues(back), 4);
  for (int j = 0; j < 4; ++j) CHECK(k1[j] == Approx(k2[j]).epsilon(1e-13));
}

TEST_CASE("classification") {
  CHECK(classify(ReducedForm{{1, 2}, {2, 4}, {0, 0}, 0, 0}).even_degrees);
  CHECK(classify(ReducedForm{{1, 2}, {2, 4}, {0, 0}, 0, 0}).definiteness == Definiteness::positive);
  CHECK(classify(ReducedForm{{-1, -2}, {1, 1}, {0, 0}, 0, 0}).definiteness == Definiteness::negative);
  const FormClass c = classify(ReducedForm{{1, -2}, {1, 1}, {0, 0.5}, 1.0, 0});
  CHECK(c.definiteness == Definiteness::indefinite);
  CHECK(c.centrality == Centrality::noncentral);
  CHECK(c.has_gaussian);
  CHECK_FALSE(c.even_degrees);
}

TEST_CASE("invalid inputs are rejected") {
  RawForm f = example_linear_term();
  f.A(0, 1) += 1.0;
  CHECK_THROWS_AS(reduce(f), InvalidInput);

  f = example_linear_term();
  f.sigma_mat(0, 0) = -1.0;
  CHECK_THROWS_AS(reduce(f), InvalidInput);

  f = example_linear_term();
  f.mu = Vec::Zero(2);
  CHECK_THROWS_AS(reduce(f), InvalidInput);

  CHECK_THROWS_AS(validate(ReducedForm{{1.0}, {0}, {0.0}, 0, 0}), InvalidInput);
  CHECK_THROWS_AS(validate(ReducedForm{{0.0}, {1}, {0.0}, 0, 0}), InvalidInput);
  CHECK_THROWS_AS(validate(ReducedForm{{1.0}, {1}, {-1.0}, 0, 0}), InvalidInput);
}

TEST_CASE("a form without randomness is a degenerate constant") {
  RawForm f{Mat::Zero(2, 2), Vec::Zero(2), 4.0, Vec{{1.0, 2.0}}, Mat::Identity(2, 2)};
  try {
    reduce(f);
    FAIL("expected DegenerateConstant");
  } catch (const DegenerateConstant& e) {
    CHECK(e.value == Approx(4.0));
  }
}

TEST_CASE("linear term in the null space of A becomes a Gaussian component") {
  RawForm f{Mat{{1.0, 0.0}, {0.0, 0.0}}, Vec{{0.0, 3.0}}, 0.0, Vec::Zero(2), Mat::Identity(2, 2)};
  const ReducedForm r = reduce(f);
  REQUIRE(r.size() == 1);
  CHECK(r.sigma_gauss == Approx(3.0));
  CHECK(r.delta2[0] == Approx(0.0));
}
