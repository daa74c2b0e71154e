#pragma once

#include "quadform/methods.hpp"
#include "quadform/types.hpp"

namespace quadform {

// R = x'Ax / x'Bx, x ~ N(mu, sigma_mat), B symmetric PSD and nonzero
struct RatioSpec {
  Mat A;
  Mat B;
  Vec mu;
  Mat sigma_mat;
};

void validate(const RatioSpec& spec);

// The ratio in standard coordinates: R = w'Aw / w'Bw with w ~ N(m, I_r).
// Requires mu in the range of sigma_mat (InvalidInput otherwise).
struct WhitenedRatio {
  Mat A;
  Mat B;
  Vec m;
};

WhitenedRatio whiten(const RatioSpec& spec);

RawForm ratio_to_indefinite(const RatioSpec& spec, double r);

// F_R(r) = P(x'(A - rB)x <= 0)
MethodResult cdf_ratio(const RatioSpec& spec, double r, Method method = Method::davies,
                       const EvalOptions& opt = {});

struct RatioSupport {
  double lo;  // -inf when unbounded
  double hi;  // +inf when unbounded
};

// Smallest interval containing R almost surely: sup{r : A - rB >= 0} and
// inf{r : A - rB <= 0} in whitened coordinates.
RatioSupport ratio_support(const RatioSpec& spec);

struct RatioSpaOptions {
  bool normalize = true;
  // precomputed integral of the raw approximation (<= 0: compute it)
  double normalizer = 0.0;
};

// Saddlepoint density of R; value 0 with flag "outside_support" when r is
// outside the support. diagnostics["raw_value"], ["normalizer"], ["t0"].
MethodResult pdf_ratio_spa(const RatioSpec& spec, double r, const RatioSpaOptions& opt = {});
// Integral of the raw approximation over the support.
double ratio_spa_normalizer(const RatioSpec& spec, double tol = 1e-8);

struct MomentExistence {
  bool exists = true;
  std::string condition;
  int r_B = 0;
};

MomentExistence moment_exists(const RatioSpec& spec, int p);

struct RatioSeriesOptions {
  double beta = 0.0;  // <= 0: 1 / max eigenvalue of B
  int j_max = 500;
  double tol = 1e-12;
};

MethodResult ratio_moment_series(const RatioSpec& spec, int p, const RatioSeriesOptions& opt = {});

struct RatioIntegralOptions {
  double quadrature_tol = 1e-10;
};

MethodResult ratio_moment_integral(const RatioSpec& spec, int p,
                                   const RatioIntegralOptions& opt = {});

// d_0..d_p (d_0 = 1) of the top-order recursion for C = diag(lambda), mean h:
// E[(w'Cw)^k] building blocks, with 2^k k! d_k = E[(w'Cw)^k] for w ~ N(h, I).
std::vector<double> top_order_coefficients(const Vec& lambda, const Vec& h, int p);

// h_{p,j} coefficients of the series, j = 0..J (whitened inputs, mu = m).
std::vector<double> series_h_coefficients(const Mat& A1, const Mat& A2, const Vec& m, int p, int J);

}  // namespace quadform
