#include "quadform/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "quadform/reduction.hpp"
#include "quadform/special.hpp"
#include "quadform/transforms.hpp"

namespace quadform {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = special::pi;

void require_no_gaussian(const ReducedForm& red, const char* what) {
  validate(red);
  if (red.sigma_gauss > 0.0)
    throw NotApplicable(std::string(what) + " requires sigma = 0 (use davies for a Gaussian term)");
  if (red.size() == 0) throw NotApplicable(std::string(what) + " needs at least one weight");
}

double max_abs_weight(const ReducedForm& red) {
  double m = 0.0;
  for (double w : red.omega) m = std::max(m, std::abs(w));
  return m;
}

double std_dev(const ReducedForm& red, double extra_var) {
  return std::sqrt(cumulants(red, 2)[1] + extra_var);
}

// K(t) + extra_var t^2 / 2 - t x; +inf outside the MGF domain
double chernoff_exponent(const ReducedForm& red, double t, double x, double extra_var) {
  double s = 0.5 * (red.sigma_gauss * red.sigma_gauss + extra_var) * t * t +
             (red.constant - x) * t;
  for (std::size_t l = 0; l < red.size(); ++l) {
    const double a = 1.0 - 2.0 * red.omega[l] * t;
    if (!(a > 0.0)) return kInf;
    s += -0.5 * red.nu[l] * std::log(a) + t * red.delta2[l] * red.omega[l] / a;
  }
  return s;
}

// min over t in [0, edge) (direction +1) or (edge, 0] (direction -1)
double chernoff_bound(const ReducedForm& red, double x, double extra_var, int direction) {
  const auto dom = mgf_domain(red);
  const double edge = direction > 0 ? dom.t_right : -dom.t_left;
  auto g = [&](double s) { return chernoff_exponent(red, direction * s, x, extra_var); };
  double hi;
  if (std::isfinite(edge)) {
    hi = edge * (1.0 - 1e-15);
  } else {
    hi = 1.0 / std_dev(red, extra_var);
    while (g(2.0 * hi) < g(hi) && hi < 1e300) hi *= 2.0;
    hi *= 2.0;
  }
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.0, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 200 && b - a > 1e-15 * hi; ++it) {
    if (gc < gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - r * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + r * (b - a);
      gd = g(d);
    }
  }
  const double best = std::min({0.0, gc, gd, g(a), g(b)});
  return std::exp(best);
}

// --- Imhof helpers ---

struct ImhofEval {
  double theta;
  double log_rho;
};

ImhofEval imhof_eval(const ReducedForm& red, double u, double qs) {
  double th = -0.5 * u * qs, lr = 0.0;
  for (std::size_t l = 0; l < red.size(); ++l) {
    const double w = red.omega[l];
    const double x = w * w * u * u;
    th += 0.5 * (red.nu[l] * std::atan(w * u) + red.delta2[l] * w * u / (1.0 + x));
    lr += 0.25 * red.nu[l] * std::log1p(x) + 0.5 * red.delta2[l] * x / (1.0 + x);
  }
  return {th, lr};
}

double cdf_kernel(const ReducedForm& red, double u, double qs) {
  if (u == 0.0) {
    double m = 0.0;
    for (std::size_t l = 0; l < red.size(); ++l) m += red.omega[l] * (red.nu[l] + red.delta2[l]);
    return 0.5 * m - 0.5 * qs;
  }
  const auto e = imhof_eval(red, u, qs);
  return std::sin(e.theta) * std::exp(-e.log_rho) / u;
}

double pdf_kernel(const ReducedForm& red, double u, double qs) {
  const auto e = imhof_eval(red, u, qs);
  return std::cos(e.theta) * std::exp(-e.log_rho);
}

// Shared pieces of the tail bounds at U: exponential factor, |omega| product,
// and the integration-by-parts quantities (m, V) for the oscillation bound.
struct TailPieces {
  double log_exp_factor = 0.0;
  double log_weight_prod = 0.0;
  double half_dof = 0.0;
  double m = -1.0;
  double V = 0.0;
  bool osc_ok = false;
};

TailPieces tail_pieces(const ReducedForm& red, double U, double qs) {
  TailPieces t;
  t.osc_ok = true;
  double drift = 0.0;
  for (std::size_t l = 0; l < red.size(); ++l) {
    const double w = red.omega[l];
    const double x = w * w * U * U;
    t.log_exp_factor -= 0.5 * red.delta2[l] * x / (1.0 + x);
    t.log_weight_prod += 0.5 * red.nu[l] * std::log(std::abs(w));
    t.half_dof += 0.5 * red.nu[l];
    if (!(x > 3.0)) t.osc_ok = false;
    const double s1 = 0.5 * red.nu[l] * w / (1.0 + x);
    const double s2 = 0.5 * red.delta2[l] * w * (1.0 - x) / ((1.0 + x) * (1.0 + x));
    drift += s1 + s2;
    t.V += std::abs(s1) + std::abs(s2);
  }
  (void)drift;
  t.m = 0.5 * std::abs(qs) - t.V;
  if (!(t.m > 0.0)) t.osc_ok = false;
  return t;
}

// Tail of int_U^inf cos(theta)/rho du: leading integration-by-parts term and
// an estimate of what remains after adding it.
struct PdfTail {
  double correction = 0.0;
  double residual = kInf;
};

PdfTail pdf_tail(const ReducedForm& red, double U, double qs) {
  const auto t = tail_pieces(red, U, qs);
  PdfTail out;
  if (t.half_dof > 1.0)
    out.residual =
        std::exp(t.log_exp_factor + (1.0 - t.half_dof) * std::log(U) - t.log_weight_prod) /
        (t.half_dof - 1.0);
  if (t.osc_ok) {
    const auto e = imhof_eval(red, U, qs);
    const double a = std::exp(-e.log_rho);
    double dtheta = -0.5 * qs, dlog_rho = 0.0;
    for (std::size_t l = 0; l < red.size(); ++l) {
      const double w = red.omega[l];
      const double x = w * w * U * U;
      dtheta += 0.5 * red.nu[l] * w / (1.0 + x) +
                0.5 * red.delta2[l] * w * (1.0 - x) / ((1.0 + x) * (1.0 + x));
      dlog_rho += 0.5 * red.nu[l] * w * w * U / (1.0 + x) +
                  red.delta2[l] * w * w * U / ((1.0 + x) * (1.0 + x));
    }
    const double next = a / (t.m * t.m) * (dlog_rho + 2.0 * t.V / U);
    if (next < out.residual) {
      out.correction = -std::sin(e.theta) * a / dtheta;
      out.residual = next;
    }
  }
  out.correction /= 2.0 * kPi;
  out.residual /= 2.0 * kPi;
  return out;
}

// Smallest U (up to bisection accuracy) with bound(U) <= target, or +inf.
double solve_cutoff(const std::function<double(double)>& bound, double start, double target) {
  double U = start;
  if (bound(U) <= target) {
    while (U > 1e-12 * start && bound(0.5 * U) <= target) U *= 0.5;
    return U;
  }
  while (bound(U) > target) {
    U *= 2.0;
    if (U > 1e18) return kInf;
  }
  double lo = 0.5 * U, hi = U;
  for (int it = 0; it < 50 && hi / lo > 1.0 + 1e-6; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (bound(mid) <= target)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

// Trapezoid on [0, U] with K panels plus the K/2-panel companion.
struct Trapezoid {
  double fine = 0.0;
  double coarse = 0.0;
  long K = 0;
};

class TrapezoidRule {
 public:
  TrapezoidRule(std::function<double(double)> f, double U, long K)
      : f_(std::move(f)), U_(U), K_(K) {
    ends_ = 0.5 * (f_(0.0) + f_(U_));
    const double h = U_ / K_;
    for (long j = 1; j < K_; ++j) (j % 2 == 0 ? even_ : odd_) += f_(j * h);
  }

  Trapezoid current() const {
    const double h = U_ / K_;
    return {h * (ends_ + even_ + odd_), 2.0 * h * (ends_ + even_), K_};
  }

  void refine() {
    even_ += odd_;
    odd_ = 0.0;
    K_ *= 2;
    const double h = U_ / K_;
    for (long j = 1; j < K_; j += 2) odd_ += f_(j * h);
  }

 private:
  std::function<double(double)> f_;
  double U_;
  long K_;
  double ends_ = 0.0, even_ = 0.0, odd_ = 0.0;
};

long pow2_at_least(double x) {
  long k = 64;
  while (k < x && k < (1L << 40)) k *= 2;
  return k;
}

// Exact 0/1 for q beyond the finite end of a definite form without a Gaussian part.
std::optional<MethodResult> outside_definite_support(const ReducedForm& red, double q, Tail tail,
                                                     const char* method) {
  if (red.sigma_gauss > 0.0 || red.size() == 0) return std::nullopt;
  bool pos = true, neg = true;
  for (double w : red.omega) (w > 0.0 ? neg : pos) = false;
  const double x = q - red.constant;
  double F;
  if (pos && x <= 0.0) F = 0.0;
  else if (neg && x >= 0.0) F = 1.0;
  else return std::nullopt;
  MethodResult r;
  r.method = method;
  r.value = tail == Tail::lower ? F : 1.0 - F;
  r.error_bound = 0.0;
  r.diagnostics["outside_support"] = 1.0;
  return r;
}

double finish_tail(double T, Tail tail) { return tail == Tail::lower ? 0.5 - T / kPi : 0.5 + T / kPi; }

void flag_suspicious(MethodResult& r) {
  if (r.value < 0.0) r.flags.push_back("negative_probability");
  if (r.value > 1.0) r.flags.push_back("probability_above_one");
  if (r.error_bound && *r.error_bound > std::abs(r.value)) r.flags.push_back("bound_exceeds_value");
  else if (r.error_bound && *r.error_bound > 0.01 * std::abs(r.value))
    r.flags.push_back("low_relative_accuracy");
  if (!r.flags.empty()) r.converged = false;
}

// --- Davies helpers ---

struct LatticeSum {
  double sum = 0.0;
  double abs_sum = 0.0;
};

// sum_{k=0}^{K} w(u_k) A(u_k) sin(Theta(u_k) - u_k q') / (pi (k + 1/2)), u_k = (k + 1/2) delta
LatticeSum davies_sum(const ReducedForm& red, double qs, double delta, long K, double var,
                      double taper_tau = 0.0) {
  LatticeSum out;
  for (long k = K; k >= 0; --k) {
    const double u = (k + 0.5) * delta;
    double logA = -0.5 * var * u * u, th = 0.0;
    for (std::size_t l = 0; l < red.size(); ++l) {
      const double w = red.omega[l];
      const double x = 4.0 * w * w * u * u;
      logA -= 0.25 * red.nu[l] * std::log1p(x) + 2.0 * red.delta2[l] * w * w * u * u / (1.0 + x);
      th += 0.5 * red.nu[l] * std::atan(2.0 * w * u) + red.delta2[l] * w * u / (1.0 + x);
    }
    double term = std::exp(logA) * std::sin(th - u * qs) / (kPi * (k + 0.5));
    if (taper_tau > 0.0) term *= -std::expm1(-0.5 * taper_tau * taper_tau * u * u);
    out.sum += term;
    out.abs_sum += std::abs(term);
  }
  return out;
}

double log_amplitude(const ReducedForm& red, double U, double var) {
  double s = -0.5 * var * U * U;
  for (std::size_t l = 0; l < red.size(); ++l) {
    const double w = red.omega[l];
    const double x = 4.0 * w * w * U * U;
    s -= 0.25 * red.nu[l] * std::log1p(x) + 2.0 * red.delta2[l] * w * w * U * U / (1.0 + x);
  }
  return s;
}

double davies_cutoff(const ReducedForm& red, double qs, double delta, double target,
                     double tau) {
  const double start = 1.0 / std_dev(red, tau * tau);
  return solve_cutoff(
      [&](double U) {
        return std::min({davies_truncation_bound(red, U, tau),
                         davies_oscillation_bound(red, qs + red.constant, delta, U, tau),
                         davies_phase_limit_bound(red, qs + red.constant, U, tau)});
      },
      start, target);
}

// Cutoff for the tapered correction lattice: the taper weight 1 - exp(-tau^2 u^2/2)
// is increasing and bounded by 1, which adds at most one b(U) to the Abel bound.
double correction_cutoff(const ReducedForm& red, double qs, double delta, double target) {
  const double start = 1.0 / std_dev(red, 0.0);
  return solve_cutoff(
      [&](double U) {
        return std::min({davies_truncation_bound(red, U, 0.0),
                         1.5 * davies_oscillation_bound(red, qs + red.constant, delta, U, 0.0),
                         davies_phase_limit_bound(red, qs + red.constant, U, 0.0)});
      },
      start, target);
}

MethodResult davies_result(const ReducedForm& red, double q, double delta, long K, double tau,
                           Tail tail, long K_corr) {
  const double qs = q - red.constant;
  const double var0 = red.sigma_gauss * red.sigma_gauss;
  const auto s = davies_sum(red, qs, delta, K, var0 + tau * tau);
  double S = s.sum;
  MethodResult r;
  r.method = "davies";
  const double U = (K + 0.5) * delta;
  const double lat = davies_lattice_bound(red, q, delta, tau);
  const auto tb = davies_truncation_bounds(red, U, tau);
  const double osc = davies_oscillation_bound(red, q, delta, U, tau);
  const double plim = davies_phase_limit_bound(red, q, U, tau);
  const double trunc = std::min({tb.best(), osc, plim});
  double bound = lat + trunc;
  r.diagnostics["delta"] = delta;
  r.diagnostics["K"] = static_cast<double>(K);
  r.diagnostics["U"] = U;
  r.diagnostics["lattice_bound"] = lat;
  r.diagnostics["truncation_bound"] = trunc;
  r.diagnostics["oscillation_bound"] = osc;
  r.diagnostics["phase_limit_bound"] = plim;
  r.diagnostics["B1"] = tb.b1;
  r.diagnostics["B2"] = tb.b2;
  r.diagnostics["B3"] = tb.b3;
  r.diagnostics["abs_sum"] = s.abs_sum;
  if (tau > 0.0) {
    // F_Q = F_{Q + tau Z} + correction; the correction is the lattice sum of
    // the CF of Q weighted by 1 - exp(-tau^2 u^2 / 2) on the same spacing.
    const auto c = davies_sum(red, qs, delta, K_corr, var0, tau);
    S += c.sum;
    const double Uc = (K_corr + 0.5) * delta;
    const double ctrunc = std::min({davies_truncation_bound(red, Uc, 0.0),
                                    1.5 * davies_oscillation_bound(red, q, delta, Uc, 0.0),
                                    davies_phase_limit_bound(red, q, Uc, 0.0)});
    // aliasing of the correction is the difference of two alternating series
    const double clat = davies_lattice_bound(red, q, delta, 0.0) + lat;
    bound += ctrunc + clat;
    r.diagnostics["tau"] = tau;
    r.diagnostics["correction"] = -c.sum;
    r.diagnostics["correction_terms"] = static_cast<double>(K_corr + 1);
    r.diagnostics["correction_truncation_bound"] = ctrunc;
    r.diagnostics["correction_lattice_bound"] = clat;
  }
  r.error_bound = bound;
  r.value = tail == Tail::lower ? 0.5 - S : 0.5 + S;
  r.diagnostics["raw_value"] = r.value;
  return r;
}

}  // namespace

// --- Imhof ------------------------------------------------------------------

ImhofIntegrand imhof_integrand(const ReducedForm& red, double u, double q) {
  require_no_gaussian(red, "imhof");
  const auto e = imhof_eval(red, u, q - red.constant);
  return {e.theta, std::exp(e.log_rho)};
}

double imhof_kernel(const ReducedForm& red, double u, double q) {
  require_no_gaussian(red, "imhof");
  return cdf_kernel(red, u, q - red.constant);
}

double imhof_truncation_bound(const ReducedForm& red, double U) {
  require_no_gaussian(red, "imhof");
  const auto t = tail_pieces(red, U, 0.0);
  return std::exp(t.log_exp_factor - std::log(kPi * t.half_dof) - t.half_dof * std::log(U) -
                  t.log_weight_prod);
}

double imhof_oscillation_bound(const ReducedForm& red, double U, double q) {
  require_no_gaussian(red, "imhof");
  const double qs = q - red.constant;
  const auto t = tail_pieces(red, U, qs);
  if (!t.osc_ok) return kInf;
  const double a = std::exp(-imhof_eval(red, U, qs).log_rho) / U;
  return a * (2.0 / t.m + t.V / (t.m * t.m)) / kPi;
}

MethodResult cdf_imhof(const ReducedForm& red, double q, const ImhofOptions& opt, Tail tail) {
  require_no_gaussian(red, "imhof");
  if (!(opt.tol > 0.0)) throw InvalidInput("tol must be > 0");
  if (auto r = outside_definite_support(red, q, tail, "imhof")) return *r;
  const double qs = q - red.constant;
  auto trunc = [&](double U) {
    return std::min(imhof_truncation_bound(red, U), imhof_oscillation_bound(red, U, q));
  };
  const double U = solve_cutoff(trunc, 1.0 / max_abs_weight(red), 0.5 * opt.tol);
  const double L = davies_period(red, q, 0.25 * opt.tol);
  const double h_c = 4.0 * kPi / L;

  MethodResult r;
  r.method = "imhof";
  auto kernel = [&](double u) { return cdf_kernel(red, u, qs); };
  const double need = std::isfinite(U) ? U / h_c : kInf;
  if (need > static_cast<double>(opt.max_panels)) {
    // resource limit: best effort at the largest affordable cutoff
    const double Uc = std::isfinite(U) ? opt.max_panels * h_c : opt.max_panels * h_c;
    TrapezoidRule rule(kernel, Uc, opt.max_panels);
    const auto t = rule.current();
    r.value = finish_tail(t.fine, tail);
    const double tb = trunc(Uc);
    r.error_bound = tb + std::abs(t.fine - t.coarse) / kPi;
    r.converged = false;
    r.diagnostics["U"] = Uc;
    r.diagnostics["K"] = static_cast<double>(opt.max_panels);
    r.diagnostics["truncation_bound"] = tb;
    r.diagnostics["required_U"] = U;
    throw ConvergenceFailure("imhof: error bound not attainable within max_panels", r);
  }

  TrapezoidRule rule(kernel, U, pow2_at_least(need));
  auto t = rule.current();
  double quad = std::abs(t.fine - t.coarse) / kPi;
  while (quad >= 0.5 * opt.tol && t.K < opt.max_panels) {
    rule.refine();
    t = rule.current();
    quad = std::abs(t.fine - t.coarse) / kPi;
  }
  const double tb = trunc(U);
  r.value = finish_tail(t.fine, tail);
  r.error_bound = tb + quad;
  r.diagnostics["U"] = U;
  r.diagnostics["K"] = static_cast<double>(t.K);
  r.diagnostics["truncation_bound"] = tb;
  r.diagnostics["quadrature_estimate"] = quad;
  r.diagnostics["raw_value"] = r.value;
  if (quad >= 0.5 * opt.tol) {
    r.converged = false;
    throw ConvergenceFailure("imhof: quadrature did not converge within max_panels", r);
  }
  return r;
}

MethodResult cdf_imhof(const ReducedForm& red, double q, const ImhofParams& p, Tail tail) {
  require_no_gaussian(red, "imhof");
  if (!(p.U > 0.0) || p.K < 2) throw InvalidInput("imhof parameters need U > 0 and K >= 2");
  const double qs = q - red.constant;
  const long K = p.K % 2 == 0 ? p.K : p.K + 1;
  TrapezoidRule rule([&](double u) { return cdf_kernel(red, u, qs); }, p.U, K);
  const auto t = rule.current();
  const double tb = std::min(imhof_truncation_bound(red, p.U), imhof_oscillation_bound(red, p.U, q));
  MethodResult r;
  r.method = "imhof";
  r.value = finish_tail(t.fine, tail);
  r.error_bound = tb + std::abs(t.fine - t.coarse) / kPi;
  r.diagnostics["U"] = p.U;
  r.diagnostics["K"] = static_cast<double>(K);
  r.diagnostics["truncation_bound"] = tb;
  r.diagnostics["quadrature_estimate"] = std::abs(t.fine - t.coarse) / kPi;
  r.diagnostics["raw_value"] = r.value;
  flag_suspicious(r);
  return r;
}

MethodResult pdf_imhof(const ReducedForm& red, double q, const ImhofOptions& opt) {
  require_no_gaussian(red, "imhof");
  if (!(opt.tol > 0.0)) throw InvalidInput("tol must be > 0");
  const double qs = q - red.constant;
  const double U = solve_cutoff([&](double u) { return pdf_tail(red, u, qs).residual; },
                                1.0 / max_abs_weight(red), 0.5 * opt.tol);
  const double L = davies_period(red, q, 0.25 * opt.tol);
  const double h_c = 4.0 * kPi / L;
  const double need = std::isfinite(U) ? U / h_c : kInf;
  MethodResult r;
  r.method = "imhof";
  r.flags.push_back("heuristic_error");
  auto kernel = [&](double u) { return pdf_kernel(red, u, qs); };
  const bool capped = need > static_cast<double>(opt.max_panels);
  const double Uc = capped ? opt.max_panels * h_c : U;
  TrapezoidRule rule(kernel, Uc, capped ? opt.max_panels : pow2_at_least(need));
  auto t = rule.current();
  double quad = std::abs(t.fine - t.coarse) / (2.0 * kPi);
  while (!capped && quad >= 0.5 * opt.tol && t.K < opt.max_panels) {
    rule.refine();
    t = rule.current();
    quad = std::abs(t.fine - t.coarse) / (2.0 * kPi);
  }
  const auto tail = pdf_tail(red, Uc, qs);
  r.value = t.fine / (2.0 * kPi) + tail.correction;
  r.diagnostics["U"] = Uc;
  r.diagnostics["K"] = static_cast<double>(t.K);
  r.diagnostics["tail_correction"] = tail.correction;
  r.diagnostics["truncation_estimate"] = tail.residual;
  r.diagnostics["quadrature_estimate"] = quad;
  r.diagnostics["error_estimate"] = tail.residual + quad;
  if (capped || quad >= 0.5 * opt.tol) {
    r.converged = false;
    throw ConvergenceFailure("imhof pdf: tolerance not attainable within max_panels", r);
  }
  return r;
}

MethodResult pdf_imhof(const ReducedForm& red, double q, const ImhofParams& p) {
  require_no_gaussian(red, "imhof");
  if (!(p.U > 0.0) || p.K < 2) throw InvalidInput("imhof parameters need U > 0 and K >= 2");
  const double qs = q - red.constant;
  const long K = p.K % 2 == 0 ? p.K : p.K + 1;
  TrapezoidRule rule([&](double u) { return pdf_kernel(red, u, qs); }, p.U, K);
  const auto t = rule.current();
  MethodResult r;
  r.method = "imhof";
  r.value = t.fine / (2.0 * kPi);
  r.flags.push_back("heuristic_error");
  const auto tail = pdf_tail(red, p.U, qs);
  r.value += tail.correction;
  const double tb = tail.residual;
  const double quad = std::abs(t.fine - t.coarse) / (2.0 * kPi);
  r.diagnostics["U"] = p.U;
  r.diagnostics["K"] = static_cast<double>(K);
  r.diagnostics["error_estimate"] = tb + quad;
  if (r.value < 0.0) {
    r.flags.push_back("negative_density");
    r.converged = false;
  }
  return r;
}

// --- Davies -----------------------------------------------------------------

double chernoff_upper(const ReducedForm& red, double x, double extra_var) {
  validate(red);
  return chernoff_bound(red, x, extra_var, +1);
}

double chernoff_lower(const ReducedForm& red, double x, double extra_var) {
  validate(red);
  return chernoff_bound(red, x, extra_var, -1);
}

double DaviesTruncation::best() const { return std::min({b1, b2, b3}); }

DaviesTruncation davies_truncation_bounds(const ReducedForm& red, double U, double tau) {
  const double var = red.sigma_gauss * red.sigma_gauss + tau * tau;
  const double logA = log_amplitude(red, U, var);
  DaviesTruncation t{kInf, kInf, kInf};
  double s = 0.0, relax = 0.0, c = var * U * U;
  for (std::size_t l = 0; l < red.size(); ++l) {
    const double w = red.omega[l];
    const double x = 4.0 * w * w * U * U;
    if (x > 1.0) {
      s += red.nu[l];
      relax += 0.25 * red.nu[l] * std::log1p(1.0 / x);
    }
    c += 0.5 * red.nu[l] * x / (1.0 + x);
  }
  if (s > 0.0) t.b1 = std::exp(logA + relax + std::log(2.0 / s)) / kPi;
  if (var > 0.0) t.b2 = std::exp(logA) / (kPi * var * U * U);
  if (c > 0.0) t.b3 = std::exp(logA) / (kPi * c);
  return t;
}

double davies_truncation_bound(const ReducedForm& red, double U, double tau) {
  return davies_truncation_bounds(red, U, tau).best();
}

double davies_oscillation_bound(const ReducedForm& red, double q, double delta, double U,
                                double tau) {
  const double var = red.sigma_gauss * red.sigma_gauss + tau * tau;
  const double sn = std::abs(std::sin(0.5 * delta * (q - red.constant)));
  if (!(sn > 0.0)) return kInf;
  // total variation of the phase Theta on [U, inf)
  double V = 0.0;
  for (std::size_t l = 0; l < red.size(); ++l) {
    const double w = std::abs(red.omega[l]);
    const double x = 4.0 * w * w * U * U;
    if (!(x > 1.0)) return kInf;
    V += 0.5 * red.nu[l] * (0.5 * kPi - std::atan(2.0 * w * U)) + red.delta2[l] * w * U / (1.0 + x);
  }
  const double b = delta * std::exp(log_amplitude(red, U, var)) / (kPi * U);
  return b * (2.0 + V) / sn;
}

double davies_phase_limit_bound(const ReducedForm& red, double q, double U, double tau) {
  if (q != red.constant || red.size() == 0 || !(U > 0.0)) return kInf;
  const double var = red.sigma_gauss * red.sigma_gauss + tau * tau;
  // |sin Theta(u)| <= |sin Theta_inf| + C/u, Theta_inf = (pi/4) sum nu sign(omega);
  // A(u) <= A(U) c (U/u)^{N/2}
  int signed_dof = 0, N = 0;
  double C = 0.0, logc = 0.0;
  for (std::size_t l = 0; l < red.size(); ++l) {
    const double w = std::abs(red.omega[l]);
    signed_dof += red.omega[l] > 0.0 ? red.nu[l] : -red.nu[l];
    N += red.nu[l];
    C += (red.nu[l] + red.delta2[l]) / (4.0 * w);
    logc += 0.25 * red.nu[l] * std::log1p(1.0 / (4.0 * w * w * U * U));
  }
  const int m = ((signed_dof % 4) + 4) % 4;
  const double s_inf = m == 0 ? 0.0 : (m == 2 ? 1.0 : std::sqrt(0.5));
  const double half = 0.5 * N;
  return std::exp(log_amplitude(red, U, var) + logc) / kPi *
         (s_inf / half + C / (U * (1.0 + half)));
}

double davies_lattice_bound(const ReducedForm& red, double q, double delta, double tau) {
  const double L = 2.0 * kPi / delta;
  const double v = tau * tau;
  return std::max(chernoff_bound(red, q - L, v, -1), chernoff_bound(red, q + L, v, +1));
}

double davies_period(const ReducedForm& red, double q, double target, double tau) {
  validate(red);
  const double v = tau * tau;
  auto f = [&](double L) {
    return std::max(chernoff_bound(red, q - L, v, -1), chernoff_bound(red, q + L, v, +1));
  };
  double L = std_dev(red, v);
  if (f(L) <= target) {
    while (f(0.5 * L) <= target && L > 1e-300) L *= 0.5;
    return L;
  }
  while (f(L) > target) {
    L *= 2.0;
    if (L > 1e300) throw ConvergenceFailure("davies: no finite lattice period meets the target", {});
  }
  double lo = 0.5 * L, hi = L;
  for (int it = 0; it < 40 && hi / lo > 1.0 + 1e-4; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) <= target)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

namespace {

double stretch_period(double L, double qs) {
  // Lengthen the period (the aliasing bound only improves) so that q'/L is not
  // near an integer, where the oscillation bound degenerates.
  const double r = std::abs(qs) / L;
  if (r >= 0.5) {
    const double frac = r - std::floor(r);
    if (frac < 0.15 || frac > 0.85) return std::abs(qs) / (std::floor(r - 0.5) + 0.5);
  }
  return L;
}

long lattice_index(double U, double delta) {
  return std::isfinite(U) ? std::max(1L, static_cast<long>(std::ceil(U / delta - 0.5))) : -1;
}

}  // namespace

MethodResult cdf_davies(const ReducedForm& red, double q, const DaviesOptions& opt, Tail tail) {
  validate(red);
  if (!(opt.tol > 0.0)) throw InvalidInput("tol must be > 0");
  if (opt.tau < 0.0) throw InvalidInput("tau must be >= 0");
  if (auto r = outside_definite_support(red, q, tail, "davies")) return *r;
  const double qs = q - red.constant;
  const bool taper = opt.tau > 0.0;
  // error budget: lattice 1/2, truncation 1/2 (split with the correction when tapering)
  double L = taper ? std::max(davies_period(red, q, opt.tol / 6.0, 0.0),
                              davies_period(red, q, opt.tol / 6.0, opt.tau))
                   : davies_period(red, q, 0.5 * opt.tol, 0.0);
  L = stretch_period(L, qs);
  const double delta = 2.0 * kPi / L;
  const double trunc_target = taper ? 0.25 * opt.tol : 0.5 * opt.tol;
  const long K = lattice_index(davies_cutoff(red, qs, delta, trunc_target, opt.tau), delta);
  const long Kc = taper ? lattice_index(correction_cutoff(red, qs, delta, 0.25 * opt.tol), delta) : 0;
  if (K < 0 || K > opt.max_terms || Kc < 0 || Kc > opt.max_terms) {
    auto r = davies_result(red, q, delta, K < 0 || K > opt.max_terms ? opt.max_terms : K,
                           opt.tau, tail, Kc < 0 || Kc > opt.max_terms ? opt.max_terms : Kc);
    r.converged = false;
    throw ConvergenceFailure("davies: truncation bound not attainable within max_terms", r);
  }
  return davies_result(red, q, delta, K, opt.tau, tail, Kc);
}

MethodResult cdf_davies(const ReducedForm& red, double q, const DaviesParams& p, Tail tail) {
  validate(red);
  if (!(p.delta > 0.0) || p.K < 1 || p.tau < 0.0)
    throw InvalidInput("davies parameters need delta > 0, K >= 1, tau >= 0");
  // with tapering, the correction runs to the same index as the main sum
  auto r = davies_result(red, q, p.delta, p.K, p.tau, tail, p.K);
  flag_suspicious(r);
  return r;
}

}  // namespace quadform
