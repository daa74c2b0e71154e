#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "quadform/transforms.hpp"

using namespace quadform;
using doctest::Approx;

TEST_CASE("noncentral chi-square cumulants") {
  // kappa_j = 2^{j-1} (j-1)! (nu + j delta2)
  const ReducedForm r{{1.0}, {3}, {2.5}, 0.0, 0.0};
  const auto k = cumulants(r, 6);
  double fact = 1.0;
  for (int j = 1; j <= 6; ++j) {
    if (j > 1) fact *= j - 1;
    CHECK(k[j - 1] == Approx(std::pow(2.0, j - 1) * fact * (3.0 + j * 2.5)).epsilon(1e-13));
  }
}

TEST_CASE("Gaussian term and constant enter the first two cumulants only") {
  const ReducedForm a{{2.0, -1.0}, {1, 2}, {0.3, 0.0}, 0.0, 0.0};
  ReducedForm b = a;
  b.sigma_gauss = 1.5;
  b.constant = -4.0;
  const auto ka = cumulants(a, 5), kb = cumulants(b, 5);
  CHECK(kb[0] == Approx(ka[0] - 4.0));
  CHECK(kb[1] == Approx(ka[1] + 2.25));
  for (int j = 2; j < 5; ++j) CHECK(kb[j] == Approx(ka[j]));
}

TEST_CASE("MGF domain") {
  const auto d = mgf_domain(ReducedForm{{1.0, -2.0}, {1, 1}, {0.0, 0.0}, 0.0, 0.0});
  CHECK(d.t_right == Approx(0.5));
  CHECK(d.t_left == Approx(-0.25));
  const auto p = mgf_domain(ReducedForm{{1.0}, {1}, {0.0}, 0.0, 0.0});
  CHECK(std::isinf(p.t_left));
  CHECK_THROWS_AS(log_mgf(ReducedForm{{1.0}, {1}, {0.0}, 0.0, 0.0}, 0.6), DomainError);
}

TEST_CASE("MGF, CGF and CF are consistent") {
  std::mt19937_64 g(3);
  for (int trial = 0; trial < 20; ++trial) {
    ReducedForm r = testutil::random_form(g, 8, false, false);
    r.sigma_gauss = 0.5;
    r.constant = 0.7;
    const auto d = mgf_domain(r);
    const double t = 0.3 * std::max(d.t_left, -1.0);
    CHECK(mgf(r, t) == Approx(std::exp(log_mgf(r, t))).epsilon(1e-12));
    CHECK(cgf_derivative(r, t, 0) == Approx(log_mgf(r, t)).epsilon(1e-12));
    // derivatives against central differences
    const double h = 1e-5;
    const double fd = (log_mgf(r, t + h) - log_mgf(r, t - h)) / (2 * h);
    CHECK(cgf_derivative(r, t, 1) == Approx(fd).epsilon(1e-6));
    const double fd2 = (cgf_derivative(r, t + h, 1) - cgf_derivative(r, t - h, 1)) / (2 * h);
    CHECK(cgf_derivative(r, t, 2) == Approx(fd2).epsilon(1e-6));
    // derivatives at 0 are the cumulants
    const auto k = cumulants(r, 4);
    for (int m = 1; m <= 4; ++m) CHECK(cgf_derivative(r, 0.0, m) == Approx(k[m - 1]).epsilon(1e-12));
    // |cf| <= 1 and cf(0) = 1
    CHECK(std::abs(cf(r, 1.7)) <= 1.0 + 1e-15);
    CHECK(std::abs(cf(r, 0.0) - 1.0) < 1e-15);
  }
}

TEST_CASE("chi-square two CF closed form") {
  const ReducedForm r{{1.0}, {2}, {0.0}, 0.0, 0.0};
  const double b = 0.8;
  const cplx expect = 1.0 / cplx(1.0, -2.0 * b);
  CHECK(std::abs(cf(r, b) - expect) < 1e-15);
}

TEST_CASE("raw moments from cumulants") {
  // standard normal: 0, 1, 0, 3
  const auto m = raw_moments({0.0, 1.0, 0.0, 0.0});
  CHECK(m[0] == Approx(0.0));
  CHECK(m[1] == Approx(1.0));
  CHECK(m[2] == Approx(0.0));
  CHECK(m[3] == Approx(3.0));
  // chi-square 1: E X^k = (2k-1)!!
  const auto c = raw_moments(cumulants(ReducedForm{{1.0}, {1}, {0.0}, 0.0, 0.0}, 4));
  CHECK(c[0] == Approx(1.0));
  CHECK(c[1] == Approx(3.0));
  CHECK(c[2] == Approx(15.0));
  CHECK(c[3] == Approx(105.0));
}
