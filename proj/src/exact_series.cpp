#include "quadform/exact_series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "quadform/reduction.hpp"
#include "quadform/special.hpp"
#include "quadform/transforms.hpp"

namespace quadform {

namespace {

using special::chisq_cdf;
using special::chisq_ccdf;
using special::chisq_pdf;

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_central_even(const ReducedForm& red) {
  validate(red);
  if (red.sigma_gauss > 0.0)
    throw NotApplicable("partial fractions require sigma = 0 (Gaussian term present)");
  for (std::size_t l = 0; l < red.size(); ++l) {
    if (red.delta2[l] > 0.0)
      throw NotApplicable("partial fractions require a central form (delta2 = 0)");
    if (red.nu[l] % 2 != 0)
      throw NotApplicable("partial fractions require even degrees of freedom");
  }
}

void require_positive_definite(const ReducedForm& red) {
  validate(red);
  if (red.sigma_gauss > 0.0)
    throw NotApplicable("series expansions require sigma = 0 (Gaussian term present)");
  if (red.size() == 0) throw NotApplicable("series expansions need at least one weight");
  for (double w : red.omega)
    if (w <= 0.0) throw NotApplicable("series expansions require all weights > 0");
}

// P(omega * chi2_{2k} <= x), or the upper tail
double block_cdf(double w, int k, double x, Tail tail) {
  const double df = 2.0 * k;
  const bool up = tail == Tail::upper;
  if (w > 0) return up ? chisq_ccdf(x / w, df) : chisq_cdf(x / w, df);
  if (x >= 0) return up ? 0.0 : 1.0;
  return up ? chisq_cdf(x / w, df) : chisq_ccdf(x / w, df);
}

// density of omega * chi2_{2k}; right-continuous convention at 0
double block_pdf(double w, int k, double x) {
  if (w > 0 && x < 0) return 0.0;
  if (w < 0 && x >= 0) return 0.0;
  return chisq_pdf(x / w, 2.0 * k) / std::abs(w);
}

double lowest_weight(const ReducedForm& red) {
  return *std::min_element(red.omega.begin(), red.omega.end());
}
double highest_weight(const ReducedForm& red) {
  return *std::max_element(red.omega.begin(), red.omega.end());
}

}  // namespace

double PartialFractionExpansion::coefficient_sum() const {
  double s = 0.0;
  for (const auto& t : terms) s += t.coef;
  return s;
}

double PartialFractionExpansion::evaluate(double t) const {
  double s = 0.0;
  for (const auto& x : terms) s += x.coef * std::pow(1.0 - 2.0 * x.omega * t, -x.order);
  return s;
}

PartialFractionExpansion partial_fractions(const ReducedForm& red) {
  require_central_even(red);
  PartialFractionExpansion pf;
  pf.constant = red.constant;
  const std::size_t L = red.size();
  for (std::size_t l = 0; l < L; ++l) {
    const int m = red.nu[l] / 2;
    const double wl = red.omega[l];
    // Around s = 1 - 2 w_l t the remaining factors are (a_i + b_i s)^{-m_i}.
    std::vector<double> a, r, mi;
    double g0 = 1.0;
    for (std::size_t i = 0; i < L; ++i) {
      if (i == l) continue;
      const double ai = 1.0 - red.omega[i] / wl;
      const double bi = red.omega[i] / wl;
      a.push_back(ai);
      r.push_back(bi / ai);
      mi.push_back(red.nu[i] / 2);
      g0 *= std::pow(ai, -(red.nu[i] / 2));
    }
    // Taylor coefficients of the product via its logarithmic derivative.
    std::vector<double> e(m, 0.0), g(m, 0.0);
    for (int n = 0; n < m; ++n)
      for (std::size_t i = 0; i < a.size(); ++i) e[n] += -mi[i] * r[i] * std::pow(-r[i], n);
    g[0] = g0;
    for (int j = 0; j + 1 < m; ++j) {
      double s = 0.0;
      for (int n = 0; n <= j; ++n) s += e[n] * g[j - n];
      g[j + 1] = s / (j + 1);
    }
    for (int j = 0; j < m; ++j) pf.terms.push_back({wl, m - j, g[j]});
  }
  return pf;
}

std::vector<PartialFractionTerm> density_form_coefficients(const PartialFractionExpansion& pf) {
  std::vector<PartialFractionTerm> out = pf.terms;
  // Terms are stored per block with decreasing order, so a running sum from
  // the top order down gives alpha_{lk} = -theta_l A_{lk} + alpha_{l,k+1}.
  std::size_t i = 0;
  while (i < out.size()) {
    std::size_t j = i;
    double run = 0.0;
    while (j < out.size() && out[j].omega == out[i].omega) {
      run += -2.0 * out[j].omega * pf.terms[j].coef;
      out[j].coef = run;
      ++j;
    }
    i = j;
  }
  return out;
}

MethodResult cdf_central_even(const ReducedForm& red, double q, Tail tail) {
  const auto pf = partial_fractions(red);
  const double x = q - red.constant;
  double v = 0.0, abs_sum = 0.0;
  for (const auto& t : pf.terms) {
    v += t.coef * block_cdf(t.omega, t.order, x, tail);
    abs_sum += std::abs(t.coef);
  }
  MethodResult r;
  r.value = v;
  r.error_bound = 0.0;
  r.method = "central_even";
  r.flags.push_back("floating_point_only");
  r.diagnostics["terms"] = static_cast<double>(pf.terms.size());
  r.diagnostics["coefficient_abs_sum"] = abs_sum;
  r.diagnostics["fp_error_estimate"] = 4.0 * kEps * abs_sum * pf.terms.size();
  return r;
}

MethodResult pdf_central_even(const ReducedForm& red, double q) {
  const auto pf = partial_fractions(red);
  const double x = q - red.constant;
  double v = 0.0, abs_sum = 0.0;
  for (const auto& t : pf.terms) {
    v += t.coef * block_pdf(t.omega, t.order, x);
    abs_sum += std::abs(t.coef);
  }
  MethodResult r;
  r.value = v;
  r.error_bound = 0.0;
  r.method = "central_even";
  r.flags.push_back("floating_point_only");
  r.diagnostics["terms"] = static_cast<double>(pf.terms.size());
  r.diagnostics["coefficient_abs_sum"] = abs_sum;
  return r;
}

double cdf_central_even_density_form(const ReducedForm& red, double q) {
  const auto pf = partial_fractions(red);
  const auto alpha = density_form_coefficients(pf);
  const double x = q - red.constant;
  double v = x >= 0 ? 1.0 : 0.0;
  for (const auto& t : alpha) v += t.coef * block_pdf(t.omega, t.order, x);
  return v;
}

// ---------------------------------------------------------------------------
// Series expansions for positive definite forms

const char* to_string(SeriesKind k) {
  switch (k) {
    case SeriesKind::ruben:
      return "ruben";
    case SeriesKind::kotz:
      return "kotz";
    case SeriesKind::laguerre:
      return "laguerre";
  }
  return "?";
}

double SeriesCoefficients::coefficient(std::size_t k) const {
  return std::exp(log_c0 + k * std::log(scale)) * c[k];
}

double default_beta(const ReducedForm& red, SeriesKind kind) {
  const double lmin = lowest_weight(red), lmax = highest_weight(red);
  switch (kind) {
    case SeriesKind::ruben:
      return 2.0 * lmax * lmin / (lmax + lmin);
    case SeriesKind::laguerre:
      return 0.5 * (lmax + lmin);
    case SeriesKind::kotz:
      return 1.0;  // unused
  }
  return 1.0;
}

SeriesCoefficients series_coefficients(const ReducedForm& red, SeriesKind kind, double beta,
                                       int K) {
  require_positive_definite(red);
  if (K < 0) throw InvalidInput("number of series terms must be >= 0");
  if (beta <= 0.0) beta = default_beta(red, kind);
  const double lmin = lowest_weight(red), lmax = highest_weight(red);
  if (kind == SeriesKind::ruben && !(beta < 2.0 * lmin))
    throw InvalidInput("chi-square series needs 0 < beta < 2 * min weight");
  if (kind == SeriesKind::laguerre && !(beta > 0.5 * lmax))
    throw InvalidInput("Laguerre series needs beta > max weight / 2");

  SeriesCoefficients s;
  s.kind = kind;
  s.beta = beta;
  s.N = red.total_dof();
  const std::size_t L = red.size();
  double sum_d2 = 0.0;
  for (double d : red.delta2) sum_d2 += d;

  std::vector<double> gam(L);
  std::vector<double> gabs(L);
  switch (kind) {
    case SeriesKind::ruben:
      s.log_c0 = -0.5 * sum_d2;
      s.log_majorant_total = -0.5 * sum_d2;
      for (std::size_t l = 0; l < L; ++l) {
        gam[l] = 1.0 - beta / red.omega[l];
        gabs[l] = std::abs(gam[l]);
        s.log_c0 += 0.5 * red.nu[l] * std::log(beta / red.omega[l]);
      }
      s.log_majorant_total = s.log_c0;
      for (std::size_t l = 0; l < L; ++l)
        s.log_majorant_total += -0.5 * red.nu[l] * std::log1p(-gabs[l]) +
                                0.5 * beta * red.delta2[l] / red.omega[l] / (1.0 - gabs[l]);
      break;
    case SeriesKind::kotz:
      s.scale = 1.0 / (2.0 * lmin);
      s.log_c0 = -0.5 * sum_d2;
      for (std::size_t l = 0; l < L; ++l) {
        gam[l] = lmin / red.omega[l];
        s.log_c0 -= 0.5 * red.nu[l] * std::log(2.0 * red.omega[l]);
      }
      break;
    case SeriesKind::laguerre:
      s.log_c0 = 0.0;
      for (std::size_t l = 0; l < L; ++l) gam[l] = 1.0 - red.omega[l] / beta;
      break;
  }

  s.d.assign(K + 1, 0.0);
  std::vector<double> dm(K + 1, 0.0);
  std::vector<double> pw(L, 1.0), pwa(L, 1.0);  // gamma^{k-1}, |gamma|^{k-1}
  for (int k = 1; k <= K; ++k) {
    double dk = 0.0, dmk = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      const double w = red.omega[l], nu = red.nu[l], d2 = red.delta2[l];
      const double gk = pw[l] * gam[l];
      switch (kind) {
        case SeriesKind::ruben: {
          dk += nu * gk + k * beta * d2 / w * pw[l];
          const double gak = pwa[l] * gabs[l];
          dmk += nu * gak + k * beta * d2 / w * pwa[l];
          pwa[l] = gak;
          break;
        }
        case SeriesKind::kotz:
          // scaled by (2 lmin)^k so every quantity stays O(1)
          dk += 0.5 * (nu - k * d2) * gk;
          break;
        case SeriesKind::laguerre:
          dk += 0.5 * (-(k / beta) * w * d2 * pw[l] + nu * gk);
          break;
      }
      pw[l] = gk;
    }
    s.d[k] = dk;
    dm[k] = dmk;
  }

  const bool two_k = kind == SeriesKind::ruben;
  auto recurse = [&](const std::vector<double>& d) {
    std::vector<double> c(K + 1, 0.0);
    c[0] = 1.0;
    for (int k = 1; k <= K; ++k) {
      double acc = 0.0;
      for (int r = 0; r < k; ++r) acc += d[k - r] * c[r];
      c[k] = acc / (two_k ? 2.0 * k : static_cast<double>(k));
    }
    return c;
  };
  s.c = recurse(s.d);
  if (kind == SeriesKind::ruben) s.majorant = recurse(dm);
  return s;
}

SeriesCoefficients series_coefficients(const EffectiveForm& eff, SeriesKind kind, double beta,
                                       int K) {
  return series_coefficients(group_eigenvalues(eff, 0.0), kind, beta, K);
}

namespace {

struct SeriesRun {
  double value = 0.0;
  int terms = 0;
  bool rigorous_stop = false;
  bool heuristic_stop = false;
  double bound = kInf;
  double last_term = 0.0;
  double max_abs_term = 0.0;
};

// Drives the adaptive truncation loop. term(k, coefs) returns the k-th term;
// bound(k, coefs, sum_majorant) returns a rigorous remainder bound after
// k terms, or +inf when none exists.
template <typename TermFn, typename BoundFn>
SeriesRun run_series(const ReducedForm& red, const SeriesCoefficients& start,
                     const SeriesOptions& opt, TermFn term, BoundFn bound) {
  // Mixture terms can start tiny and grow (upper tails), so the heuristic stop
  // watches the mixture weights there instead of the terms.
  const bool watch_weights = start.kind == SeriesKind::ruben;
  const SeriesCoefficients* cur = &start;
  SeriesCoefficients grown;
  SeriesRun run;
  long double sum = 0.0L, maj = 0.0L;
  int small = 0;
  for (int k = 0; k <= opt.max_terms; ++k) {
    if (static_cast<std::size_t>(k) >= cur->size()) {
      const int K = std::min(opt.max_terms, std::max(64, 2 * static_cast<int>(cur->size())));
      grown = series_coefficients(red, cur->kind, cur->beta, K);
      cur = &grown;
    }
    const double t = term(k, *cur);
    sum += t;
    if (!cur->majorant.empty())
      maj += static_cast<long double>(std::exp(cur->log_c0)) * cur->majorant[k];
    run.terms = k + 1;
    run.last_term = t;
    run.max_abs_term = std::max(run.max_abs_term, std::abs(t));
    const double b = bound(k, *cur, static_cast<double>(maj));
    run.bound = b;
    if (b < opt.tol) {
      run.rigorous_stop = true;
      break;
    }
    const double watched = watch_weights ? std::abs(cur->coefficient(k)) : std::abs(t);
    small = watched < opt.tol / 100.0 ? small + 1 : 0;
    if (small >= 20) {
      run.heuristic_stop = true;
      break;
    }
  }
  run.value = static_cast<double>(sum);
  return run;
}

// Remaining majorant mass after the terms already summed.
double majorant_tail(const SeriesCoefficients& s, double maj) {
  const double total = std::exp(s.log_majorant_total);
  return std::max(total - maj, 0.0) + 1e-18 * total;
}

MethodResult finish(const SeriesRun& run, SeriesKind kind, const SeriesCoefficients& coefs) {
  MethodResult r;
  r.value = run.value;
  r.method = to_string(kind);
  r.diagnostics["terms"] = run.terms;
  r.diagnostics["beta"] = coefs.beta;
  r.diagnostics["last_term"] = run.last_term;
  r.diagnostics["max_abs_term"] = run.max_abs_term;
  if (std::isfinite(run.bound)) r.diagnostics["remainder_bound"] = run.bound;
  // a bound above 1 says nothing about a probability
  if (run.bound <= 1.0) {
    r.error_bound = run.bound;
  } else {
    r.flags.push_back("heuristic_error");
  }
  if (run.heuristic_stop) r.flags.push_back("heuristic_stop");
  if (kind == SeriesKind::kotz) {
    const double cancel = 4.0 * kEps * run.max_abs_term * run.terms;
    r.diagnostics["cancellation_estimate"] = cancel;
  }
  if (!run.rigorous_stop && !run.heuristic_stop) {
    r.converged = false;
    throw ConvergenceFailure(std::string(to_string(kind)) + " series did not converge within " +
                                 std::to_string(run.terms) + " terms",
                             r);
  }
  return r;
}

double chisq_mode_density(double m) {
  // sup_x of the chi-square density with m >= 2 degrees of freedom
  return chisq_pdf(m - 2.0, m);
}

}  // namespace

MethodResult cdf_series(const ReducedForm& red, const SeriesCoefficients& coefs, double q,
                        const SeriesOptions& opt, Tail tail) {
  require_positive_definite(red);
  const double x = q - red.constant;
  const bool up = tail == Tail::upper;
  const double N = coefs.N;
  const double beta = coefs.beta;

  if (x <= 0.0) {
    MethodResult r;
    r.value = up ? 1.0 : 0.0;
    r.error_bound = 0.0;
    r.method = to_string(coefs.kind);
    r.diagnostics["terms"] = 0;
    return r;
  }

  SeriesRun run;
  switch (coefs.kind) {
    case SeriesKind::ruben: {
      const double z = x / beta;
      run = run_series(
          red, coefs, opt,
          [&](int k, const SeriesCoefficients& s) {
            const double df = N + 2.0 * k;
            return s.coefficient(k) * (up ? chisq_ccdf(z, df) : chisq_cdf(z, df));
          },
          [&](int k, const SeriesCoefficients& s, double maj) {
            const double m = majorant_tail(s, maj);
            // F_{chi2_m} decreases in m, so the lower-tail remainder shrinks further
            return up ? m : m * chisq_cdf(z, N + 2.0 * k + 2.0);
          });
      break;
    }
    case SeriesKind::kotz: {
      const double k1 = cumulants(red, 1)[0];
      if (x > opt.kotz_max_mean_multiple * (k1 - red.constant))
        throw NotApplicable("power series restricted to q <= " +
                            std::to_string(opt.kotz_max_mean_multiple) + " times the mean");
      const double lx = std::log(x);
      run = run_series(
          red, coefs, opt,
          [&](int k, const SeriesCoefficients& s) {
            if (s.c[k] == 0.0) return 0.0;
            const double mag = std::exp(s.log_c0 + k * std::log(s.scale * x) +
                                        0.5 * N * lx - std::lgamma(0.5 * N + k + 1.0) +
                                        std::log(std::abs(s.c[k])));
            const double sign = ((k % 2) ? -1.0 : 1.0) * (s.c[k] < 0 ? -1.0 : 1.0);
            return sign * mag;
          },
          [](int, const SeriesCoefficients&, double) { return kInf; });
      if (up) run.value = 1.0 - run.value;
      break;
    }
    case SeriesKind::laguerre: {
      const double a = 0.5 * N;
      const double z = x / (2.0 * beta);
      const double lz = std::log(z);
      // L_{k-1}^{(a)}(z) by the three-term recurrence
      double Lprev = 0.0, Lcur = 1.0;
      int have = 0;  // Lcur holds L_have
      run = run_series(
          red, coefs, opt,
          [&](int k, const SeriesCoefficients& s) {
            if (k == 0) return up ? boost::math::gamma_q(a, z) : boost::math::gamma_p(a, z);
            const int j = k - 1;
            while (have < j) {
              const double next = ((2.0 * have + 1.0 + a - z) * Lcur - (have + a) * Lprev) /
                                  (have + 1.0);
              Lprev = Lcur;
              Lcur = next;
              ++have;
            }
            const double pref =
                std::exp(std::lgamma(static_cast<double>(k)) - std::lgamma(a + k) + a * lz - z);
            const double t = s.coefficient(k) * pref * Lcur;
            return up ? -t : t;
          },
          [](int, const SeriesCoefficients&, double) { return kInf; });
      break;
    }
  }
  auto r = finish(run, coefs.kind, coefs);
  return r;
}

MethodResult pdf_series(const ReducedForm& red, const SeriesCoefficients& coefs, double q,
                        const SeriesOptions& opt) {
  require_positive_definite(red);
  const double x = q - red.constant;
  const double N = coefs.N;
  const double beta = coefs.beta;
  if (x < 0.0 || (x == 0.0 && N > 2)) {
    MethodResult r;
    r.value = 0.0;
    r.error_bound = 0.0;
    r.method = to_string(coefs.kind);
    r.diagnostics["terms"] = 0;
    return r;
  }

  bool central_even = coefs.N % 2 == 0;
  for (double d : red.delta2)
    if (d > 0.0) central_even = false;

  SeriesRun run;
  switch (coefs.kind) {
    case SeriesKind::ruben: {
      const double z = x / beta;
      run = run_series(
          red, coefs, opt,
          [&](int k, const SeriesCoefficients& s) {
            return s.coefficient(k) * chisq_pdf(z, N + 2.0 * k) / beta;
          },
          [&](int k, const SeriesCoefficients& s, double maj) {
            double b = majorant_tail(s, maj) * chisq_mode_density(N + 2.0 * k + 2.0) / beta;
            if (central_even) b = std::min(b, ruben_truncation_bound(red, beta, k, q));
            return b;
          });
      break;
    }
    case SeriesKind::kotz: {
      const double k1 = cumulants(red, 1)[0];
      if (x > opt.kotz_max_mean_multiple * (k1 - red.constant))
        throw NotApplicable("power series restricted to q <= " +
                            std::to_string(opt.kotz_max_mean_multiple) + " times the mean");
      const double lx = std::log(x);
      run = run_series(
          red, coefs, opt,
          [&](int k, const SeriesCoefficients& s) {
            if (s.c[k] == 0.0) return 0.0;
            const double mag =
                std::exp(s.log_c0 + k * std::log(s.scale * x) + (0.5 * N - 1.0) * lx -
                         std::lgamma(0.5 * N + k) + std::log(std::abs(s.c[k])));
            const double sign = ((k % 2) ? -1.0 : 1.0) * (s.c[k] < 0 ? -1.0 : 1.0);
            return sign * mag;
          },
          [](int, const SeriesCoefficients&, double) { return kInf; });
      break;
    }
    case SeriesKind::laguerre: {
      const double a = 0.5 * N - 1.0;
      const double z = x / (2.0 * beta);
      double Lprev = 0.0, Lcur = 1.0;
      int have = 0;
      run = run_series(
          red, coefs, opt,
          [&](int k, const SeriesCoefficients& s) {
            while (have < k) {
              const double next = ((2.0 * have + 1.0 + a - z) * Lcur - (have + a) * Lprev) /
                                  (have + 1.0);
              Lprev = Lcur;
              Lcur = next;
              ++have;
            }
            const double pref = std::exp(std::lgamma(k + 1.0) - std::lgamma(a + 1.0 + k) +
                                         a * std::log(z) - z) /
                                (2.0 * beta);
            return s.coefficient(k) * pref * Lcur;
          },
          [](int, const SeriesCoefficients&, double) { return kInf; });
      break;
    }
  }
  return finish(run, coefs.kind, coefs);
}

MethodResult cdf_series(const ReducedForm& red, double q, SeriesKind kind,
                        const SeriesOptions& opt, Tail tail) {
  const auto coefs = series_coefficients(red, kind, opt.beta, 64);
  return cdf_series(red, coefs, q, opt, tail);
}

MethodResult pdf_series(const ReducedForm& red, double q, SeriesKind kind,
                        const SeriesOptions& opt) {
  const auto coefs = series_coefficients(red, kind, opt.beta, 64);
  return pdf_series(red, coefs, q, opt);
}

double ruben_truncation_bound(const ReducedForm& red, double beta, int K, double q) {
  require_positive_definite(red);
  const int N = red.total_dof();
  for (double d : red.delta2)
    if (d > 0.0) throw NotApplicable("truncation bound requires a central form");
  if (N % 2 != 0) throw NotApplicable("truncation bound requires an even number of variables");
  if (beta <= 0.0) beta = default_beta(red, SeriesKind::ruben);

  std::vector<double> xi;
  double log_c0 = 0.0;
  for (std::size_t l = 0; l < red.size(); ++l) {
    for (int k = 0; k < red.nu[l]; ++k) xi.push_back(std::abs(1.0 - beta / red.omega[l]));
    log_c0 += 0.5 * red.nu[l] * std::log(beta / red.omega[l]);
  }
  std::sort(xi.begin(), xi.end(), std::greater<>());
  const int M = N / 2;
  std::vector<double> odd(M);
  for (int i = 0; i < M; ++i) odd[i] = xi[2 * i];
  for (int i = 0; i < M; ++i)
    for (int l = i + 1; l < M; ++l)
      if (std::abs(odd[i] - odd[l]) <= 1e-12 * std::max(odd[i], 1e-300)) return kInf;

  const double x = q - red.constant;
  if (x <= 0.0) return 0.0;
  const double b = 2.0 * beta;
  const int m = K + M - 1;
  double sum = 0.0;
  for (int i = 0; i < M; ++i) {
    double delta = 1.0;
    for (int l = 0; l < M; ++l)
      if (l != i) delta /= odd[i] - odd[l];
    const double a = odd[i];
    double h = 0.0;
    if (a > 0.0) h = std::exp(-(1.0 - a) * x / b) / b * boost::math::gamma_p(m + 1.0, a * x / b);
    sum += delta * h;
  }
  if (sum < 0.0) return kInf;  // cancellation swamped the result
  return std::exp(log_c0) * sum;
}

}  // namespace quadform
