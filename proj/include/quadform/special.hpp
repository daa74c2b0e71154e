#pragma once

// Thin wrappers over Boost.Math for the reference distributions used by the
// series and moment-matching methods.

#include <cmath>
#include <limits>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace quadform::special {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double inf = std::numeric_limits<double>::infinity();

inline double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi); }
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
inline double norm_ccdf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

inline double chisq_cdf(double x, double k) {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(0.5 * k, 0.5 * x);
}

inline double chisq_ccdf(double x, double k) {
  if (!(x > 0.0)) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(0.5 * k, 0.5 * x);
}

inline double chisq_logpdf(double x, double k) {
  if (x < 0.0) return -inf;
  if (x == 0.0) {
    if (k < 2.0) return inf;
    if (k == 2.0) return std::log(0.5);
    return -inf;
  }
  const double a = 0.5 * k;
  return (a - 1.0) * std::log(x) - 0.5 * x - a * std::log(2.0) - std::lgamma(a);
}

inline double chisq_pdf(double x, double k) { return std::exp(chisq_logpdf(x, k)); }

inline double ncx2_cdf(double x, double k, double lam) {
  if (!(x > 0.0)) return 0.0;
  if (lam <= 0.0) return chisq_cdf(x, k);
  return boost::math::cdf(boost::math::non_central_chi_squared(k, lam), x);
}

inline double ncx2_ccdf(double x, double k, double lam) {
  if (!(x > 0.0)) return 1.0;
  if (lam <= 0.0) return chisq_ccdf(x, k);
  return boost::math::cdf(
      boost::math::complement(boost::math::non_central_chi_squared(k, lam), x));
}

inline double f_cdf(double x, double d1, double d2) {
  if (!(x > 0.0)) return 0.0;
  return boost::math::cdf(boost::math::fisher_f(d1, d2), x);
}

inline double f_ccdf(double x, double d1, double d2) {
  if (!(x > 0.0)) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::fisher_f(d1, d2), x));
}

inline double f_pdf(double x, double d1, double d2) {
  if (x < 0.0) return 0.0;
  return boost::math::pdf(boost::math::fisher_f(d1, d2), x);
}

}  // namespace quadform::special
