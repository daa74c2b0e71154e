#include "quadform/transforms.hpp"

#include <cmath>
#include <limits>

namespace quadform {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_domain(const ReducedForm& red, double t) {
  const auto d = mgf_domain(red);
  if (!(t > d.t_left && t < d.t_right))
    throw DomainError("t outside the MGF domain (" + std::to_string(d.t_left) + ", " +
                          std::to_string(d.t_right) + ")",
                      d.t_left, d.t_right);
}

}  // namespace

MgfDomain mgf_domain(const ReducedForm& red) {
  double pmax = 0.0, nmax = 0.0;
  for (double w : red.omega) {
    if (w > 0) pmax = std::max(pmax, w);
    if (w < 0) nmax = std::max(nmax, -w);
  }
  return {nmax > 0 ? -1.0 / (2.0 * nmax) : -kInf, pmax > 0 ? 1.0 / (2.0 * pmax) : kInf};
}

double log_mgf(const ReducedForm& red, double t) {
  check_domain(red, t);
  double s = 0.5 * red.sigma_gauss * red.sigma_gauss * t * t + red.constant * t;
  for (std::size_t l = 0; l < red.size(); ++l) {
    const double w = red.omega[l];
    const double a = 1.0 - 2.0 * w * t;
    s += -0.5 * red.nu[l] * std::log(a) + t * red.delta2[l] * w / a;
  }
  return s;
}

double mgf(const ReducedForm& red, double t) { return std::exp(log_mgf(red, t)); }

cplx cf(const ReducedForm& red, double beta) {
  const cplx i(0.0, 1.0);
  cplx s = -0.5 * red.sigma_gauss * red.sigma_gauss * beta * beta + i * beta * red.constant;
  for (std::size_t l = 0; l < red.size(); ++l) {
    const double w = red.omega[l];
    const cplx a = 1.0 - 2.0 * i * w * beta;
    s += -0.5 * red.nu[l] * std::log(a) + i * beta * red.delta2[l] * w / a;
  }
  return std::exp(s);
}

double cgf_derivative(const ReducedForm& red, double t, int m) {
  if (m < 0) throw InvalidInput("derivative order must be >= 0");
  if (m == 0) return log_mgf(red, t);
  check_domain(red, t);
  // 2^{m-1} (m-1)!
  double pref = std::ldexp(std::tgamma(static_cast<double>(m)), m - 1);
  double s = 0.0;
  for (std::size_t l = 0; l < red.size(); ++l) {
    const double w = red.omega[l];
    const double a = 1.0 - 2.0 * w * t;
    const double wm = std::pow(w, m);
    const double am = std::pow(a, m);
    s += wm * (red.nu[l] / am + m * red.delta2[l] / (am * a));
  }
  s *= pref;
  const double s2 = red.sigma_gauss * red.sigma_gauss;
  if (m == 1) s += s2 * t + red.constant;
  if (m == 2) s += s2;
  return s;
}

std::vector<double> cumulants(const ReducedForm& red, int J) {
  if (J < 1) throw InvalidInput("number of cumulants must be >= 1");
  std::vector<double> k(J, 0.0);
  for (int j = 1; j <= J; ++j) {
    const double pref = std::ldexp(std::tgamma(static_cast<double>(j)), j - 1);
    double s = 0.0;
    for (std::size_t l = 0; l < red.size(); ++l)
      s += std::pow(red.omega[l], j) * (red.nu[l] + j * red.delta2[l]);
    k[j - 1] = pref * s;
  }
  k[0] += red.constant;
  if (J >= 2) k[1] += red.sigma_gauss * red.sigma_gauss;
  return k;
}

std::vector<double> raw_moments(const std::vector<double>& kappas) {
  const int J = static_cast<int>(kappas.size());
  std::vector<double> mu(J + 1, 0.0);
  mu[0] = 1.0;
  for (int k = 1; k <= J; ++k) {
    double s = 0.0, binom = 1.0;  // C(k-1, l)
    for (int l = 0; l < k; ++l) {
      s += binom * mu[l] * kappas[k - l - 1];
      binom = binom * (k - 1 - l) / (l + 1);
    }
    mu[k] = s;
  }
  return {mu.begin() + 1, mu.end()};
}

}  // namespace quadform
