#include "quadform/methods.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>

#include <boost/math/tools/roots.hpp>

#include "quadform/approx.hpp"
#include "quadform/exact_series.hpp"
#include "quadform/inversion.hpp"
#include "quadform/reduction.hpp"
#include "quadform/transforms.hpp"

namespace quadform {

namespace {

struct NamedMethod {
  Method m;
  const char* name;
};

constexpr NamedMethod kNames[] = {
    {Method::automatic, "auto"},         {Method::central_even, "central_even"},
    {Method::ruben, "ruben"},            {Method::kotz, "kotz"},
    {Method::laguerre, "laguerre"},      {Method::imhof, "imhof"},
    {Method::davies, "davies"},          {Method::spa_lr, "spa_lr"},
    {Method::spa_bn, "spa_bn"},          {Method::satterthwaite, "satterthwaite"},
    {Method::pearson, "pearson"},        {Method::hbe, "hbe"},
    {Method::wood, "wood"},              {Method::liu, "liu"},
};

bool positive_definite(const ReducedForm& red) {
  if (red.sigma_gauss > 0.0 || red.size() == 0) return false;
  for (double w : red.omega)
    if (w <= 0.0) return false;
  return true;
}

bool negative_definite(const ReducedForm& red) {
  if (red.sigma_gauss > 0.0 || red.size() == 0) return false;
  for (double w : red.omega)
    if (w >= 0.0) return false;
  return true;
}

ReducedForm negated(ReducedForm red) {
  for (double& w : red.omega) w = -w;
  red.constant = -red.constant;
  return red;
}

double tail_estimate(const ReducedForm& red, double q) {
  return std::min(chernoff_upper(red, q), chernoff_lower(red, q));
}

SeriesOptions series_options(const EvalOptions& opt) {
  SeriesOptions s;
  s.tol = opt.tol;
  if (opt.max_terms > 0) s.max_terms = static_cast<int>(std::min<long>(opt.max_terms, 1L << 30));
  return s;
}

ImhofOptions imhof_options(const EvalOptions& opt) {
  ImhofOptions o;
  o.tol = opt.tol;
  if (opt.max_terms > 0) o.max_panels = opt.max_terms;
  return o;
}

DaviesOptions davies_options(const EvalOptions& opt) {
  DaviesOptions o;
  o.tol = opt.tol;
  o.tau = opt.tau;
  if (opt.max_terms > 0) o.max_terms = opt.max_terms;
  return o;
}

std::optional<SeriesKind> series_kind(Method m) {
  switch (m) {
    case Method::ruben: return SeriesKind::ruben;
    case Method::kotz: return SeriesKind::kotz;
    case Method::laguerre: return SeriesKind::laguerre;
    default: return std::nullopt;
  }
}

std::optional<MatchFamily> match_family(Method m) {
  switch (m) {
    case Method::satterthwaite: return MatchFamily::satterthwaite;
    case Method::pearson: return MatchFamily::pearson;
    case Method::hbe: return MatchFamily::hbe;
    case Method::wood: return MatchFamily::wood;
    case Method::liu: return MatchFamily::liu;
    default: return std::nullopt;
  }
}

// Tail probabilities are requested to a tolerance relative to their size when
// the method was picked automatically.
EvalOptions tighten_for_tail(const ReducedForm& red, double q, EvalOptions opt, Tail tail) {
  const double est = tail == Tail::upper ? chernoff_upper(red, q) : chernoff_lower(red, q);
  if (est < 1.0) opt.tol = std::max(std::min(opt.tol, 1e-3 * est), 1e-300);
  return opt;
}

MethodResult cdf_with(const ReducedForm& red, double q, Method m, const EvalOptions& opt, Tail tail,
                      const SeriesCoefficients* coefs) {
  if (auto k = series_kind(m)) {
    if (coefs) return cdf_series(red, *coefs, q, series_options(opt), tail);
    return cdf_series(red, q, *k, series_options(opt), tail);
  }
  if (auto f = match_family(m)) return cdf_matched(red, q, *f, tail);
  switch (m) {
    case Method::central_even: return cdf_central_even(red, q, tail);
    case Method::imhof: return cdf_imhof(red, q, imhof_options(opt), tail);
    case Method::davies: return cdf_davies(red, q, davies_options(opt), tail);
    case Method::spa_lr: return cdf_spa(red, q, SpaVariant::lugannani_rice, tail);
    case Method::spa_bn: return cdf_spa(red, q, SpaVariant::barndorff_nielsen, tail);
    default: break;
  }
  throw InvalidInput("unhandled method");
}

MethodResult pdf_with(const ReducedForm& red, double q, Method m, const EvalOptions& opt,
                      const SeriesCoefficients* coefs) {
  if (auto k = series_kind(m)) {
    if (coefs) return pdf_series(red, *coefs, q, series_options(opt));
    return pdf_series(red, q, *k, series_options(opt));
  }
  switch (m) {
    case Method::central_even: return pdf_central_even(red, q);
    case Method::imhof: return pdf_imhof(red, q, imhof_options(opt));
    case Method::spa_lr:
    case Method::spa_bn: return pdf_spa(red, q);
    default: break;
  }
  throw NotApplicable(std::string(to_string(m)) + " provides no density");
}

// Exact answer at or beyond the finite end of a definite form without a
// Gaussian part (the density is left to the methods at the end itself).
std::optional<MethodResult> beyond_support(const ReducedForm& red, double q, Quantity quantity, Tail tail) {
  if (red.sigma_gauss > 0.0 || red.size() == 0) return std::nullopt;
  bool pos = true, neg = true;
  for (double w : red.omega) (w > 0.0 ? neg : pos) = false;
  const double x = q - red.constant;
  double F;
  if (pos && x <= 0.0) F = 0.0;
  else if (neg && x >= 0.0) F = 1.0;
  else return std::nullopt;
  if (quantity == Quantity::pdf && x == 0.0) return std::nullopt;
  MethodResult r;
  r.method = "support";
  r.value = quantity == Quantity::pdf ? 0.0 : (tail == Tail::lower ? F : 1.0 - F);
  r.error_bound = 0.0;
  r.flags.push_back("auto_selected");
  r.flags.push_back("outside_support");
  return r;
}

MethodResult dispatch(const ReducedForm& red, double q, Quantity quantity, Method method,
                      const EvalOptions& opt, Tail tail, const SeriesCoefficients* coefs) {
  validate(red);
  EvalOptions o = opt;
  Method m = method;
  if (m == Method::automatic) {
    if (auto r = beyond_support(red, q, quantity, tail)) return *r;
    m = select_method(red, quantity, q, tail);
    if (negative_definite(red) && m != Method::central_even && m != Method::spa_lr) {
      // P(Q <= q) = P(-Q >= -q): the mirrored form admits the positive series
      const Tail mirror = tail == Tail::lower ? Tail::upper : Tail::lower;
      MethodResult r = dispatch(negated(red), -q, quantity, Method::automatic, opt, mirror, nullptr);
      r.flags.push_back("reflected");
      return r;
    }
    if (quantity == Quantity::cdf && m != Method::spa_lr) o = tighten_for_tail(red, q, o, tail);
  }
  MethodResult r = quantity == Quantity::cdf ? cdf_with(red, q, m, o, tail, coefs)
                                             : pdf_with(red, q, m, o, coefs);
  if (method == Method::automatic) r.flags.push_back("auto_selected");
  return r;
}

}  // namespace

const char* to_string(Method m) {
  for (const auto& n : kNames)
    if (n.m == m) return n.name;
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (const auto& n : kNames)
    if (name == n.name) return n.m;
  throw InvalidInput("unknown method '" + name + "'");
}

Method select_method(const ReducedForm& red, Quantity quantity, double q, Tail) {
  const FormClass cls = classify(red);
  if (cls.centrality == Centrality::central && cls.even_degrees && !cls.has_gaussian &&
      red.size() > 0)
    return Method::central_even;
  if (tail_estimate(red, q) < kSaddlepointTail) return Method::spa_lr;
  if (positive_definite(red)) return Method::ruben;
  if (quantity == Quantity::pdf) return red.sigma_gauss > 0.0 ? Method::spa_lr : Method::imhof;
  return Method::davies;
}

MethodResult evaluate_cdf(const ReducedForm& red, double q, Method method, const EvalOptions& opt,
                          Tail tail) {
  return dispatch(red, q, Quantity::cdf, method, opt, tail, nullptr);
}

MethodResult evaluate_pdf(const ReducedForm& red, double q, Method method, const EvalOptions& opt) {
  return dispatch(red, q, Quantity::pdf, method, opt, Tail::lower, nullptr);
}

MethodResult quantile(const ReducedForm& red, double p, Method method, const EvalOptions& opt,
                      Tail tail) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidInput("probability must lie in (0, 1)");
  validate(red);
  const auto k = cumulants(red, 2);
  const double mean = k[0];
  const double sd = std::sqrt(std::max(k[1], 0.0));
  const MgfDomain dom = mgf_domain(red);
  // support ends (finite only for definite forms without a Gaussian term)
  const bool has_lo = std::isinf(dom.t_left) && red.sigma_gauss == 0.0;
  const bool has_hi = std::isinf(dom.t_right) && red.sigma_gauss == 0.0;
  const double lo_end = red.constant, hi_end = red.constant;

  long evals = 0;
  MethodResult last;
  // g increases in q and is zero at the quantile
  auto g = [&](double q) {
    ++evals;
    last = evaluate_cdf(red, q, method, opt, tail);
    return tail == Tail::upper ? p - last.value : last.value - p;
  };

  double step = std::max(sd, 1e-300);
  double a = mean - step, b = mean + step;
  if (has_lo) a = std::max(a, lo_end);
  if (has_hi) b = std::min(b, hi_end);
  double ga = g(a), gb = g(b);
  for (int i = 0; ga > 0.0; ++i) {
    if (i > 200) throw ConvergenceFailure("quantile: lower bracket not found", last);
    b = a;
    gb = ga;
    step *= 2.0;
    a = has_lo ? std::max(mean - step, lo_end) : mean - step;
    ga = g(a);
    if (has_lo && a == lo_end && ga > 0.0) break;
  }
  for (int i = 0; gb < 0.0; ++i) {
    if (i > 200) throw ConvergenceFailure("quantile: upper bracket not found", last);
    a = b;
    ga = gb;
    step *= 2.0;
    b = has_hi ? std::min(mean + step, hi_end) : mean + step;
    gb = g(b);
    if (has_hi && b == hi_end && gb < 0.0) break;
  }

  double x;
  if (ga == 0.0) {
    x = a;
  } else if (gb == 0.0) {
    x = b;
  } else {
    std::uintmax_t iters = 200;
    auto stop = [](double l, double r) { return std::abs(r - l) <= 4e-15 * std::max(1.0, std::abs(l)); };
    auto [l, r] = boost::math::tools::toms748_solve(g, a, b, ga, gb, stop, iters);
    x = 0.5 * (l + r);
  }
  const double resid = g(x);
  MethodResult out;
  out.value = x;
  out.method = last.method;
  out.converged = last.converged;
  out.flags = last.flags;
  out.diagnostics["iterations"] = static_cast<double>(evals);
  out.diagnostics["residual"] = resid;
  out.diagnostics["probability"] = p;
  if (last.error_bound) {
    // |F(x) - p| errors translate into q errors through the density
    out.diagnostics["cdf_error_bound"] = *last.error_bound;
  }
  return out;
}

namespace {

std::vector<MethodResult> run_grid(const ReducedForm& red, const std::vector<double>& qs,
                                   Quantity quantity, Method method, const EvalOptions& opt,
                                   Tail tail, bool parallel) {
  validate(red);
  std::optional<SeriesCoefficients> coefs;
  if (auto k = series_kind(method)) coefs = series_coefficients(red, *k, 0.0, 256);
  if (method == Method::automatic && positive_definite(red))
    coefs = series_coefficients(red, SeriesKind::ruben, 0.0, 256);
  const SeriesCoefficients* cp = coefs ? &*coefs : nullptr;

  const long n = static_cast<long>(qs.size());
  std::vector<MethodResult> out(qs.size());
  std::vector<std::exception_ptr> errs(qs.size());
  auto one = [&](long i) {
    try {
      const Method m = method == Method::automatic ? select_method(red, quantity, qs[i], tail) : method;
      const SeriesCoefficients* c = series_kind(m) ? cp : nullptr;
      out[i] = dispatch(red, qs[i], quantity, method, opt, tail, c);
    } catch (...) {
      errs[i] = std::current_exception();
    }
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) one(i);
  } else {
    for (long i = 0; i < n; ++i) one(i);
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace

std::vector<MethodResult> evaluate_grid(const ReducedForm& red, const std::vector<double>& qs,
                                        Quantity quantity, Method method, const EvalOptions& opt,
                                        Tail tail) {
  return run_grid(red, qs, quantity, method, opt, tail, true);
}

std::vector<MethodResult> evaluate_grid_serial(const ReducedForm& red, const std::vector<double>& qs,
                                               Quantity quantity, Method method,
                                               const EvalOptions& opt, Tail tail) {
  return run_grid(red, qs, quantity, method, opt, tail, false);
}

}  // namespace quadform
