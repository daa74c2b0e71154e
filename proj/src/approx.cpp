#include "quadform/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "quadform/reduction.hpp"
#include "quadform/special.hpp"
#include "quadform/transforms.hpp"

namespace quadform {

namespace {

using special::norm_cdf;
using special::norm_ccdf;
using special::norm_pdf;

constexpr double kInf = std::numeric_limits<double>::infinity();

void need(const std::vector<double>& k, std::size_t n, MatchFamily f) {
  if (k.size() < n)
    throw InvalidInput(std::string(to_string(f)) + " needs " + std::to_string(n) + " cumulants");
}

double chi_cdf_tail(double x, double df, Tail tail) {
  return tail == Tail::lower ? special::chisq_cdf(x, df) : special::chisq_ccdf(x, df);
}

// chi-square cumulants 2^{j-1} (j-1)! (df + j delta), scaled by s^j
std::vector<double> scaled_ncx2_cumulants(double df, double delta, double s, int J) {
  std::vector<double> k(J);
  for (int j = 1; j <= J; ++j)
    k[j - 1] = std::ldexp(std::tgamma(static_cast<double>(j)), j - 1) * (df + j * delta) *
               std::pow(s, j);
  return k;
}

}  // namespace

const char* to_string(MatchFamily f) {
  switch (f) {
    case MatchFamily::satterthwaite: return "satterthwaite";
    case MatchFamily::pearson: return "pearson";
    case MatchFamily::hbe: return "hbe";
    case MatchFamily::wood: return "wood";
    case MatchFamily::liu: return "liu";
  }
  return "?";
}

MatchedSurrogate match(const std::vector<double>& k, MatchFamily family) {
  MatchedSurrogate s;
  s.family = family;
  switch (family) {
    case MatchFamily::satterthwaite: {
      need(k, 2, family);
      if (!(k[0] > 0.0)) throw NotApplicable("satterthwaite requires kappa_1 > 0");
      if (!(k[1] > 0.0)) throw NotApplicable("satterthwaite requires kappa_2 > 0");
      s.params = {0.5 * k[1] / k[0], 2.0 * k[0] * k[0] / k[1]};
      break;
    }
    case MatchFamily::pearson:
    case MatchFamily::hbe: {
      need(k, 3, family);
      if (!(k[1] > 0.0)) throw NotApplicable(std::string(to_string(family)) + " requires kappa_2 > 0");
      if (!(k[2] > 0.0))
        throw NotApplicable(std::string(to_string(family)) + " requires kappa_3 > 0");
      const double b = 8.0 * k[1] * k[1] * k[1] / (k[2] * k[2]);
      if (family == MatchFamily::pearson)
        s.params = {k[2] / (4.0 * k[1]), b, k[0] - 2.0 * k[1] * k[1] / k[2]};
      else
        s.params = {b, k[0], k[1]};
      break;
    }
    case MatchFamily::wood: {
      need(k, 3, family);
      const double k1 = k[0], k2 = k[1], k3 = k[2];
      if (!(k1 > 0.0 && k2 > 0.0 && k3 > 0.0))
        throw NotApplicable("wood requires kappa_1, kappa_2, kappa_3 > 0");
      const double den = k1 * k3 - 2.0 * k2 * k2;
      const double num = 4.0 * k1 * k2 * k2 + k3 * (k2 - k1 * k1);
      if (!(den > 0.0)) throw NotApplicable("wood requires kappa_1 kappa_3 > 2 kappa_2^2");
      const double a1 = 2.0 * k1 * (k1 * k3 + k1 * k1 * k2 - k2 * k2) / num;
      const double a2 = 3.0 + 2.0 * k2 * (k2 + k1 * k1) / den;
      const double beta = num / den;
      if (!(a1 > 0.0 && beta > 0.0)) throw NotApplicable("wood parameters are not positive");
      s.params = {a1, a2, beta};
      break;
    }
    case MatchFamily::liu: {
      need(k, 4, family);
      if (!(k[1] > 0.0)) throw NotApplicable("liu requires kappa_2 > 0");
      if (!(k[2] > 0.0)) throw NotApplicable("liu requires kappa_3 > 0");
      const double s1 = k[2] / (2.0 * std::sqrt(2.0) * std::pow(k[1], 1.5));
      const double s2 = k[3] / (12.0 * k[1] * k[1]);
      double a, delta, l;
      if (s1 * s1 > s2 * (1.0 + 1e-12)) {
        a = 1.0 / (s1 - std::sqrt(s1 * s1 - s2));
        delta = s1 * a * a * a - a * a;
        l = a * a - 2.0 * delta;
        s.branch = "s1^2 > s2";
      } else {
        a = 1.0 / s1;
        delta = 0.0;
        l = 1.0 / (s1 * s1);
        s.branch = "s1^2 <= s2";
      }
      s.params = {a, delta, l, k[0], k[1]};
      break;
    }
  }
  return s;
}

std::vector<double> surrogate_cumulants(const MatchedSurrogate& s, int J) {
  const auto& p = s.params;
  std::vector<double> k;
  switch (s.family) {
    case MatchFamily::satterthwaite:
      k = scaled_ncx2_cumulants(p[1], 0.0, p[0], J);
      break;
    case MatchFamily::pearson:
      k = scaled_ncx2_cumulants(p[1], 0.0, p[0], J);
      k[0] += p[2];
      break;
    case MatchFamily::hbe: {
      // kappa_1 + sqrt(kappa_2 / 2b) (chi2_b - b)
      const double sc = std::sqrt(p[2] / (2.0 * p[0]));
      k = scaled_ncx2_cumulants(p[0], 0.0, sc, J);
      k[0] += p[1] - sc * p[0];
      break;
    }
    case MatchFamily::wood: {
      // beta G1 / G2 with unit-scale gammas: E[Y^j] = beta^j (a1)_j Gamma(a2 - j) / Gamma(a2)
      const double a1 = p[0], a2 = p[1], beta = p[2];
      if (a2 <= J) throw NotApplicable("wood surrogate has fewer than J finite moments");
      std::vector<double> mu(J + 1, 1.0);
      for (int j = 1; j <= J; ++j) mu[j] = mu[j - 1] * beta * (a1 + j - 1) / (a2 - j);
      // cumulants from raw moments
      k.assign(J, 0.0);
      for (int n = 1; n <= J; ++n) {
        double v = mu[n], binom = 1.0;  // C(n-1, m-1)
        for (int m = 1; m < n; ++m) {
          v -= binom * k[m - 1] * mu[n - m];
          binom = binom * (n - 1 - m + 1) / m;
        }
        k[n - 1] = v;
      }
      break;
    }
    case MatchFamily::liu: {
      // kappa_1 + sqrt(kappa_2) (chi2_l(delta) - l - delta) / (sqrt(2) a)
      const double a = p[0], delta = p[1], l = p[2];
      const double sc = std::sqrt(p[4]) / (std::sqrt(2.0) * a);
      k = scaled_ncx2_cumulants(l, delta, sc, J);
      k[0] += p[3] - sc * (l + delta);
      break;
    }
  }
  return k;
}

double surrogate_cdf(const MatchedSurrogate& s, double q, Tail tail) {
  const auto& p = s.params;
  const bool up = tail == Tail::upper;
  switch (s.family) {
    case MatchFamily::satterthwaite:
      return chi_cdf_tail(q / p[0], p[1], tail);
    case MatchFamily::pearson:
      return chi_cdf_tail((q - p[2]) / p[0], p[1], tail);
    case MatchFamily::hbe:
      return chi_cdf_tail(p[0] + std::sqrt(2.0 * p[0]) * (q - p[1]) / std::sqrt(p[2]), p[0], tail);
    case MatchFamily::wood: {
      const double x = p[1] * q / (p[0] * p[2]);
      return up ? special::f_ccdf(x, 2.0 * p[0], 2.0 * p[1]) : special::f_cdf(x, 2.0 * p[0], 2.0 * p[1]);
    }
    case MatchFamily::liu: {
      const double x = p[2] + p[1] + std::sqrt(2.0) * p[0] * (q - p[3]) / std::sqrt(p[4]);
      return up ? special::ncx2_ccdf(x, p[2], p[1]) : special::ncx2_cdf(x, p[2], p[1]);
    }
  }
  return 0.0;
}

MethodResult cdf_matched(const ReducedForm& red, double q, MatchFamily family, Tail tail) {
  validate(red);
  if (red.sigma_gauss > 0.0)
    throw NotApplicable(std::string(to_string(family)) + " requires sigma = 0");
  if (red.size() == 0) throw NotApplicable("moment matching needs at least one weight");
  for (double w : red.omega)
    if (w <= 0.0)
      throw NotApplicable(std::string(to_string(family)) + " requires all weights > 0");
  const auto s = match(cumulants(red, 4), family);
  MethodResult r;
  r.method = to_string(family);
  r.value = surrogate_cdf(s, q, tail);
  r.flags.push_back("approximate");
  for (std::size_t i = 0; i < s.params.size(); ++i)
    r.diagnostics["param" + std::to_string(i)] = s.params[i];
  return r;
}

// --- saddlepoint ------------------------------------------------------------

double spa_switch(const ReducedForm& red) {
  const auto d = mgf_domain(red);
  const double width = d.t_right - d.t_left;
  const double k2 = cumulants(red, 2)[1];
  return 1e-4 * std::min(width, 1.0 / std::sqrt(k2));
}

SaddlepointSolution saddlepoint_solve(const ReducedForm& red, double q) {
  validate(red);
  const auto dom = mgf_domain(red);
  bool has_pos = false, has_neg = false;
  for (double w : red.omega) (w > 0 ? has_pos : has_neg) = true;
  const bool gauss = red.sigma_gauss > 0.0;
  if (!has_neg && !gauss && q <= red.constant)
    throw DomainError("q at or below the lower end of the support", dom.t_left, dom.t_right);
  if (!has_pos && !gauss && q >= red.constant)
    throw DomainError("q at or above the upper end of the support", dom.t_left, dom.t_right);

  auto K1 = [&](double t) { return cgf_derivative(red, t, 1); };
  const double k1 = K1(0.0);
  double lo = 0.0, hi = 0.0;
  if (q > k1) {
    if (std::isfinite(dom.t_right)) {
      for (int j = 1;; ++j) {
        hi = dom.t_right * (1.0 - std::ldexp(1.0, -j));
        if (K1(hi) > q) break;
        lo = hi;
        if (j > 1000) throw DomainError("saddlepoint bracket failed", dom.t_left, dom.t_right);
      }
    } else {
      hi = 1.0 / std::sqrt(cumulants(red, 2)[1]);
      while (K1(hi) <= q) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw DomainError("saddlepoint bracket failed", dom.t_left, dom.t_right);
      }
    }
  } else if (q < k1) {
    if (std::isfinite(dom.t_left)) {
      for (int j = 1;; ++j) {
        lo = dom.t_left * (1.0 - std::ldexp(1.0, -j));
        if (K1(lo) < q) break;
        hi = lo;
        if (j > 1000) throw DomainError("saddlepoint bracket failed", dom.t_left, dom.t_right);
      }
    } else {
      lo = -1.0 / std::sqrt(cumulants(red, 2)[1]);
      while (K1(lo) >= q) {
        hi = lo;
        lo *= 2.0;
        if (lo < -1e300) throw DomainError("saddlepoint bracket failed", dom.t_left, dom.t_right);
      }
    }
  }

  double t = 0.5 * (lo + hi);
  const double ftol = 1e-10 * (1.0 + std::abs(q));
  if (q != k1) {
    for (int it = 0; it < 500; ++it) {
      const double f = K1(t) - q;
      if (std::abs(f) <= 0.01 * ftol) break;
      if (f > 0) hi = t; else lo = t;
      const double step = t - f / cgf_derivative(red, t, 2);
      t = (step > lo && step < hi) ? step : 0.5 * (lo + hi);
      if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi)))
        break;
    }
  }
  SaddlepointSolution s;
  s.t0 = t;
  s.K = cgf_derivative(red, t, 0);
  s.K2 = cgf_derivative(red, t, 2);
  const double arg = std::max(0.0, 2.0 * (t * q - s.K));
  s.w = (t > 0 ? 1.0 : (t < 0 ? -1.0 : 0.0)) * std::sqrt(arg);
  s.v = t * std::sqrt(s.K2);
  return s;
}

MethodResult pdf_spa(const ReducedForm& red, double q) {
  const auto s = saddlepoint_solve(red, q);
  MethodResult r;
  r.method = "spa";
  r.value = std::exp(s.K - s.t0 * q) / std::sqrt(2.0 * special::pi * s.K2);
  r.flags.push_back("approximate");
  r.diagnostics["t0"] = s.t0;
  r.diagnostics["K2"] = s.K2;
  return r;
}

namespace {

// Mills ratio minus its leading term, R(x) - 1/x, for x > 0
double mills_excess(double x) {
  if (x < 30.0) return norm_ccdf(x) / norm_pdf(x) - 1.0 / x;
  const double x2 = x * x;
  double term = -1.0 / (x2 * x), sum = 0.0;
  for (int k = 1; k <= 6; ++k) {
    sum += term;
    term *= -(2.0 * k + 1.0) / x2;
  }
  return sum;
}

double log_norm_pdf(double x) { return -0.5 * x * x - 0.5 * std::log(2.0 * special::pi); }

}  // namespace

MethodResult cdf_spa(const ReducedForm& red, double q, SpaVariant variant, Tail tail) {
  const auto s = saddlepoint_solve(red, q);
  const bool up = tail == Tail::upper;
  const double eps = spa_switch(red);
  const double at = std::abs(s.t0);

  auto far_value = [&]() {
    if (variant == SpaVariant::lugannani_rice) {
      const double corr = norm_pdf(s.w) * (1.0 / s.w - 1.0 / s.v);
      return up ? norm_ccdf(s.w) - corr : norm_cdf(s.w) + corr;
    }
    const double ws = s.w + std::log(s.v / s.w) / s.w;
    return up ? norm_ccdf(ws) : norm_cdf(ws);
  };
  auto near_value = [&]() {
    const auto k = cumulants(red, 3);
    const double lim = 0.5 + k[2] / (6.0 * std::sqrt(2.0 * special::pi) * std::pow(k[1], 1.5));
    const double dens = std::exp(s.K - s.t0 * q) / std::sqrt(2.0 * special::pi * s.K2);
    const double F = lim + (q - k[0]) * dens;
    return up ? 1.0 - F : F;
  };

  MethodResult r;
  r.method = variant == SpaVariant::lugannani_rice ? "spa_lr" : "spa_bn";
  r.flags.push_back("approximate");
  r.diagnostics["t0"] = s.t0;
  r.diagnostics["w"] = s.w;
  r.diagnostics["v"] = s.v;
  if (at <= eps) {
    r.value = near_value();
    r.flags.push_back("mean_limit");
  } else if (at < 2.0 * eps) {
    const double lam = (at - eps) / eps;
    r.value = (1.0 - lam) * near_value() + lam * far_value();
    r.flags.push_back("mean_limit_blend");
  } else {
    r.value = far_value();
  }
  // the requested tail on the far side of the mean, in log form to survive underflow
  const double sw = up ? s.w : -s.w, sv = up ? s.v : -s.v;
  if (at >= 2.0 * eps && sw > 0.0) {
    if (variant == SpaVariant::lugannani_rice) {
      r.diagnostics["log_value"] = log_norm_pdf(sw) + std::log(mills_excess(sw) + 1.0 / sv);
    } else {
      const double ws = sw + std::log(sv / sw) / sw;
      if (ws > 0.0) r.diagnostics["log_value"] = log_norm_pdf(ws) + std::log(mills_excess(ws) + 1.0 / ws);
    }
  } else if (r.value > 0.0) {
    r.diagnostics["log_value"] = std::log(r.value);
  }
  return r;
}

}  // namespace quadform
