#include "quadform/ratio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "quadform/approx.hpp"
#include "quadform/reduction.hpp"
#include "quadform/special.hpp"
#include "quadform/transforms.hpp"

namespace quadform {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRankTol = 1e-12;

Mat sym(const Mat& M) { return 0.5 * (M + M.transpose()); }

struct Spectrum {
  Vec values;
  Mat vectors;
};

Spectrum eig(const Mat& M) {
  Eigen::SelfAdjointEigenSolver<Mat> es(sym(M));
  return {es.eigenvalues(), es.eigenvectors()};
}

double max_abs(const Mat& M) { return M.size() ? M.cwiseAbs().maxCoeff() : 0.0; }

// lambda_min of A - rB, used by the support search
double min_eig(const Mat& A, const Mat& B, double r) {
  return eig(A - r * B).values.minCoeff();
}

void require_exists(const RatioSpec& spec, int p) {
  if (p < 1) throw InvalidInput("moment order p must be >= 1");
  const auto ex = moment_exists(spec, p);
  if (!ex.exists)
    throw NotApplicable("moment of order " + std::to_string(p) + " does not exist (" +
                        ex.condition + ")");
}

}  // namespace

void validate(const RatioSpec& s) {
  const Eigen::Index n = s.A.rows();
  if (n == 0) throw InvalidInput("ratio needs at least one variable");
  if (s.A.cols() != n || s.B.rows() != n || s.B.cols() != n || s.sigma_mat.rows() != n ||
      s.sigma_mat.cols() != n)
    throw InvalidInput("A, B and sigma must be square of equal size");
  if (s.mu.size() != n) throw InvalidInput("mu has wrong length");
  if (!s.A.allFinite() || !s.B.allFinite() || !s.mu.allFinite() || !s.sigma_mat.allFinite())
    throw InvalidInput("non-finite entries in ratio specification");
  const double sa = std::max(max_abs(s.A), 1e-300), sb = max_abs(s.B);
  if ((s.A - s.A.transpose()).cwiseAbs().maxCoeff() > 1e-10 * sa)
    throw InvalidInput("A must be symmetric");
  if (sb == 0.0) throw InvalidInput("B must not be zero");
  if ((s.B - s.B.transpose()).cwiseAbs().maxCoeff() > 1e-10 * sb)
    throw InvalidInput("B must be symmetric");
  if (eig(s.B).values.minCoeff() < -1e-10 * sb) throw InvalidInput("B must be positive semidefinite");
}

WhitenedRatio whiten(const RatioSpec& spec) {
  validate(spec);
  const auto fac = factor_covariance(spec.sigma_mat);
  if (fac.rank == 0) throw InvalidInput("covariance is zero");
  // B_f = V D^{1/2}; its columns are orthogonal
  const Vec colsq = fac.B.colwise().squaredNorm().transpose();
  const Vec m = (fac.B.transpose() * spec.mu).cwiseQuotient(colsq);
  if ((fac.B * m - spec.mu).norm() > 1e-10 * (1.0 + spec.mu.norm()))
    throw InvalidInput("mu must lie in the range of sigma for ratio computations");
  WhitenedRatio w;
  w.A = sym(fac.B.transpose() * spec.A * fac.B);
  w.B = sym(fac.B.transpose() * spec.B * fac.B);
  w.m = m;
  if (max_abs(w.B) == 0.0) throw InvalidInput("x'Bx is almost surely zero");
  return w;
}

RawForm ratio_to_indefinite(const RatioSpec& spec, double r) {
  RawForm f;
  f.A = spec.A - r * spec.B;
  f.b = Vec::Zero(spec.A.rows());
  f.c = 0.0;
  f.mu = spec.mu;
  f.sigma_mat = spec.sigma_mat;
  return f;
}

MethodResult cdf_ratio(const RatioSpec& spec, double r, Method method, const EvalOptions& opt) {
  validate(spec);
  if (!std::isfinite(r)) throw InvalidInput("r must be finite");
  ReducedForm red;
  try {
    red = reduce(ratio_to_indefinite(spec, r));
  } catch (const DegenerateConstant& d) {
    MethodResult res;
    res.value = d.value <= 0.0 ? 1.0 : 0.0;
    res.error_bound = 0.0;
    res.method = "degenerate";
    res.diagnostics["r"] = r;
    return res;
  }
  MethodResult res = evaluate_cdf(red, 0.0, method, opt, Tail::lower);
  res.diagnostics["r"] = r;
  return res;
}

RatioSupport ratio_support(const RatioSpec& spec) {
  const WhitenedRatio w = whiten(spec);
  const Spectrum sb = eig(w.B);
  const double bmax = sb.values.maxCoeff();
  const bool pd = sb.values.minCoeff() > kRankTol * bmax;
  if (pd) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(w.A, w.B);
    return {ges.eigenvalues().minCoeff(), ges.eigenvalues().maxCoeff()};
  }
  // a value R actually attains: the quotient along the top eigenvector of B
  const Vec v = sb.vectors.col(sb.values.size() - 1);
  const double r0 = v.dot(w.A * v) / v.dot(w.B * v);
  const double sa = std::max(max_abs(w.A), 1e-300);
  const double tol = 1e-10 * sa;
  const double far = 1e8 * (sa / bmax + std::abs(r0) + 1.0);
  const double gap = 1e-15 * (sa / bmax + std::abs(r0));
  RatioSupport s{-kInf, kInf};
  // lo: largest r with A - rB >= 0
  if (min_eig(w.A, w.B, -far) >= -tol) {
    double a = -far, b = r0;
    for (int i = 0; i < 200 && b - a > 1e-14 * (std::abs(a) + std::abs(b)) + gap; ++i) {
      const double c = 0.5 * (a + b);
      (min_eig(w.A, w.B, c) >= -tol ? a : b) = c;
    }
    s.lo = a;
  }
  // hi: smallest r with A - rB <= 0
  if (-min_eig(-w.A, -w.B, far) <= tol) {
    double a = r0, b = far;
    for (int i = 0; i < 200 && b - a > 1e-14 * (std::abs(a) + std::abs(b)) + gap; ++i) {
      const double c = 0.5 * (a + b);
      (-min_eig(-w.A, -w.B, c) <= tol ? b : a) = c;
    }
    s.hi = b;
  }
  return s;
}

namespace {

struct SpaPoint {
  double value = 0.0;
  double t0 = 0.0;
  bool inside = false;
};

SpaPoint ratio_spa_raw(const WhitenedRatio& w, double r) {
  SpaPoint out;
  if (!std::isfinite(r)) return out;
  const Spectrum s = eig(w.A - r * w.B);
  if (!s.values.allFinite()) return out;
  const Vec delta = s.vectors.transpose() * w.m;
  const double scale = s.values.cwiseAbs().maxCoeff();
  EffectiveForm eff;
  for (Eigen::Index i = 0; i < s.values.size(); ++i) {
    if (std::abs(s.values[i]) <= kRankTol * scale) continue;
    eff.lambda.push_back(s.values[i]);
    eff.h2.push_back(delta[i] * delta[i]);
  }
  if (eff.size() == 0) return out;
  const ReducedForm red = group_eigenvalues(eff);
  SaddlepointSolution sp;
  try {
    sp = saddlepoint_solve(red, 0.0);
  } catch (const DomainError&) {
    return out;
  }
  const Mat H = s.vectors.transpose() * w.B * s.vectors;
  Vec D(s.values.size());
  for (Eigen::Index i = 0; i < D.size(); ++i) {
    const double lam = std::abs(s.values[i]) <= kRankTol * scale ? 0.0 : s.values[i];
    D[i] = 1.0 / (1.0 - 2.0 * sp.t0 * lam);
  }
  const Vec Dd = D.cwiseProduct(delta);
  const double J = (D.cwiseProduct(H.diagonal())).sum() + Dd.dot(H * Dd);
  out.value = J * std::exp(sp.K) / std::sqrt(2.0 * special::pi * sp.K2);
  out.t0 = sp.t0;
  out.inside = true;
  return out;
}

template <typename F>
double integrate_over(F f, double lo, double hi, double tol) {
  using namespace boost::math::quadrature;
  if (std::isfinite(lo) && std::isfinite(hi)) {
    tanh_sinh<double> q;
    return q.integrate(f, lo, hi, tol);
  }
  if (std::isfinite(lo)) {
    exp_sinh<double> q;
    return q.integrate([&](double x) { return f(lo + x); }, 0.0, kInf, tol);
  }
  if (std::isfinite(hi)) {
    exp_sinh<double> q;
    return q.integrate([&](double x) { return f(hi - x); }, 0.0, kInf, tol);
  }
  sinh_sinh<double> q;
  return q.integrate(f, tol);
}

}  // namespace

double ratio_spa_normalizer(const RatioSpec& spec, double tol) {
  const WhitenedRatio w = whiten(spec);
  const RatioSupport s = ratio_support(spec);
  if (!(s.hi > s.lo)) throw NotApplicable("ratio is degenerate (constant)");
  auto f = [&](double r) {
    if (!(r > s.lo && r < s.hi)) return 0.0;
    const double v = ratio_spa_raw(w, r).value;
    return std::isfinite(v) ? v : 0.0;
  };
  return integrate_over(f, s.lo, s.hi, tol);
}

MethodResult pdf_ratio_spa(const RatioSpec& spec, double r, const RatioSpaOptions& opt) {
  const WhitenedRatio w = whiten(spec);
  const SpaPoint sp = ratio_spa_raw(w, r);
  MethodResult res;
  res.method = "ratio_spa";
  res.flags.push_back("approximate");
  res.diagnostics["raw_value"] = sp.value;
  res.diagnostics["r"] = r;
  if (!sp.inside) {
    res.value = 0.0;
    res.flags.push_back("outside_support");
    return res;
  }
  res.diagnostics["t0"] = sp.t0;
  res.value = sp.value;
  if (opt.normalize) {
    const double z = opt.normalizer > 0.0 ? opt.normalizer : ratio_spa_normalizer(spec);
    res.diagnostics["normalizer"] = z;
    res.value = sp.value / z;
  }
  return res;
}

MomentExistence moment_exists(const RatioSpec& spec, int p) {
  if (p < 1) throw InvalidInput("moment order p must be >= 1");
  const WhitenedRatio w = whiten(spec);
  const Spectrum sb = eig(w.B);
  const double bmax = sb.values.maxCoeff();
  const Eigen::Index n = sb.values.size();
  std::vector<Eigen::Index> range, null;
  for (Eigen::Index i = 0; i < n; ++i)
    (sb.values[i] > kRankTol * bmax ? range : null).push_back(i);
  MomentExistence ex;
  ex.r_B = static_cast<int>(range.size());
  if (null.empty()) {
    ex.exists = true;
    ex.condition = "B positive definite";
    return ex;
  }
  Mat P1(n, range.size()), P2(n, null.size());
  for (std::size_t i = 0; i < range.size(); ++i) P1.col(i) = sb.vectors.col(range[i]);
  for (std::size_t i = 0; i < null.size(); ++i) P2.col(i) = sb.vectors.col(null[i]);
  const double tol = 1e-10 * std::max(max_abs(w.A), 1e-300);
  if (max_abs(P2.transpose() * w.A * P2) > tol) {
    ex.exists = 2 * p < ex.r_B;
    ex.condition = "P2'AP2 != 0: requires 2p < rank(B)";
  } else if (max_abs(P1.transpose() * w.A * P2) > tol) {
    ex.exists = p < ex.r_B;
    ex.condition = "P2'AP2 = 0, P1'AP2 != 0: requires p < rank(B)";
  } else {
    ex.exists = true;
    ex.condition = "P2'AP2 = 0, P1'AP2 = 0";
  }
  return ex;
}

std::vector<double> series_h_coefficients(const Mat& A1, const Mat& A2, const Vec& m, int p, int J) {
  const Eigen::Index n = m.size();
  const Mat I = Mat::Identity(n, n);
  // level k holds (i, j = k - i) for i = 0..min(k, p)
  std::vector<Mat> Gp{Mat::Zero(n, n)};
  std::vector<Vec> gp{Vec::Zero(n)};
  std::vector<double> hp{1.0};
  std::vector<double> out(J + 1, 0.0);
  if (p == 0) out[0] = 1.0;
  for (int k = 1; k <= p + J; ++k) {
    const int imax = std::min(k, p);
    std::vector<Mat> G(imax + 1);
    std::vector<Vec> g(imax + 1);
    std::vector<double> h(imax + 1);
    const int prev_max = static_cast<int>(hp.size()) - 1;
    for (int i = 0; i <= imax; ++i) {
      const int j = k - i;
      // (i-1, j) and (i, j-1) live on level k-1 at positions i-1 and i
      const bool has_a = i >= 1 && i - 1 <= prev_max;
      const bool has_b = j >= 1 && i <= prev_max;
      Mat Gn = Mat::Zero(n, n);
      Vec gn = Vec::Zero(n);
      if (has_a) {
        Gn += A1 * (hp[i - 1] * I + Gp[i - 1]);
        gn += A1 * gp[i - 1];
      }
      if (has_b) {
        Gn += A2 * (hp[i] * I + Gp[i]);
        gn += A2 * gp[i];
        gn += (Gn - Gp[i]) * m - hp[i] * m;
      } else {
        gn += Gn * m;
      }
      G[i] = std::move(Gn);
      g[i] = std::move(gn);
      h[i] = (G[i].trace() + m.dot(g[i])) / (2.0 * k);
    }
    if (imax == p && k - p <= J) out[k - p] = h[p];
    Gp = std::move(G);
    gp = std::move(g);
    hp = std::move(h);
  }
  return out;
}

MethodResult ratio_moment_series(const RatioSpec& spec, int p, const RatioSeriesOptions& opt) {
  require_exists(spec, p);
  if (opt.j_max < 1) throw InvalidInput("j_max must be >= 1");
  const WhitenedRatio w = whiten(spec);
  const Eigen::Index n = w.m.size();
  const double bmax = eig(w.B).values.maxCoeff();
  const double beta = opt.beta > 0.0 ? opt.beta : 1.0 / bmax;
  if (!(beta > 0.0 && beta < 2.0 / bmax)) throw InvalidInput("beta must lie in (0, 2 / b_max)");
  const Mat A2 = Mat::Identity(n, n) - beta * w.B;
  const double half = 0.5 * static_cast<double>(n);

  // coefficient of h_{p,j}: (p)_j Gamma(N/2) / Gamma(N/2 + p + j)
  auto coef = [&](int j) {
    return std::exp(std::lgamma(p + j) - std::lgamma(p) + std::lgamma(half) -
                    std::lgamma(half + p + j));
  };
  double lead = std::log(beta) * p + std::lgamma(p + 1.0);

  // Generate h in chunks so the stopping rule can end early.
  std::vector<double> h;
  long double sum = 0.0L;
  std::vector<double> terms;
  int J = std::min(opt.j_max, 64);
  bool stopped = false;
  double remainder = kInf;
  int used = 0;
  while (true) {
    h = series_h_coefficients(w.A, A2, w.m, p, J);
    for (int j = used; j <= J; ++j) {
      const double t = std::exp(lead) * coef(j) * h[j];
      terms.push_back(t);
      sum += t;
      used = j + 1;
      if (j >= 10) {
        double rho = 0.0;
        for (int i = j - 9; i <= j; ++i) {
          const double prev = std::abs(terms[i - 1]);
          rho = std::max(rho, prev > 0.0 ? std::abs(terms[i]) / prev : (terms[i] == 0.0 ? 0.0 : kInf));
        }
        remainder = rho < 1.0 ? std::abs(t) * rho / (1.0 - rho) : kInf;
        double scale = std::abs(static_cast<double>(sum));
        for (double x : terms) scale = std::max(scale, 1e-3 * std::abs(x));
        if (remainder <= opt.tol * scale) {
          stopped = true;
          break;
        }
      }
    }
    if (stopped || J >= opt.j_max) break;
    J = std::min(opt.j_max, 4 * J);
  }

  MethodResult res;
  res.value = static_cast<double>(sum);
  res.method = "bao_kan_series";
  res.diagnostics["terms"] = used;
  res.diagnostics["beta"] = beta;
  res.diagnostics["remainder_estimate"] = remainder;
  res.flags.push_back("heuristic_error");
  if (!stopped) {
    res.converged = false;
    res.flags.push_back("j_max_reached");
  }
  return res;
}

std::vector<double> top_order_coefficients(const Vec& lambda, const Vec& h, int p) {
  const Eigen::Index n = lambda.size();
  std::vector<double> d(p + 1, 0.0);
  d[0] = 1.0;
  Vec u = Vec::Zero(n), v = Vec::Zero(n);
  const Vec h2 = h.cwiseProduct(h);
  for (int k = 1; k <= p; ++k) {
    u = lambda.cwiseProduct(u.array().matrix() + Vec::Constant(n, d[k - 1]));
    v = lambda.cwiseProduct(v) + h2.cwiseProduct(u);
    d[k] = (u + v).sum() / (2.0 * k);
  }
  return d;
}

MethodResult ratio_moment_integral(const RatioSpec& spec, int p, const RatioIntegralOptions& opt) {
  require_exists(spec, p);
  if (!(opt.quadrature_tol > 0.0)) throw InvalidInput("quadrature_tol must be > 0");
  const WhitenedRatio w = whiten(spec);
  const Spectrum sb = eig(w.B);
  const Vec mb = sb.vectors.transpose() * w.m;
  const double log_const = p * std::log(2.0) + std::lgamma(p + 1.0) - std::lgamma(p);

  // log_jac is added in log space so the t -> inf end does not underflow
  auto integrand_t = [&](double t, double log_jac) {
    const Vec s = (Vec::Ones(sb.values.size()) + 2.0 * t * sb.values.cwiseMax(0.0));
    double logphi = -0.5 * s.array().log().sum();
    for (Eigen::Index i = 0; i < s.size(); ++i)
      logphi -= 0.5 * mb[i] * mb[i] * (1.0 - 1.0 / s[i]);
    const Mat L = sb.vectors * s.cwiseSqrt().cwiseInverse().asDiagonal() * sb.vectors.transpose();
    const Spectrum c = eig(L * w.A * L);
    const Vec hh = c.vectors.transpose() * (L * w.m);
    const double dp = top_order_coefficients(c.values, hh, p)[p];
    return std::exp(log_const + (p - 1) * std::log(t) + logphi + log_jac) * dp;
  };
  // uc is the signed distance to the nearer end; it keeps 1 - u exact near u = 1
  auto integrand_u = [&](double u, double uc) {
    const double om = u > 0.5 ? uc : 1.0 - u;
    if (!(u > 0.0) || !(om > 0.0)) return 0.0;
    const double t = u / om;
    const double v = integrand_t(t, -2.0 * std::log(om));
    return std::isfinite(v) ? v : 0.0;
  };

  boost::math::quadrature::tanh_sinh<double> q;
  double err = 0.0, l1 = 0.0;
  std::size_t levels = 0;
  const double value = q.integrate(integrand_u, 0.0, 1.0, opt.quadrature_tol, &err, &l1, &levels);

  MethodResult res;
  res.value = value;
  res.method = "magnus_integral";
  res.diagnostics["quadrature_error"] = err;
  res.diagnostics["l1_norm"] = l1;
  res.diagnostics["levels"] = static_cast<double>(levels);
  res.flags.push_back("heuristic_error");
  if (!(err <= std::max(opt.quadrature_tol * l1, 1e-15 * l1) * 10.0) || !std::isfinite(value)) {
    res.converged = false;
    throw ConvergenceFailure("ratio moment quadrature did not reach the requested tolerance", res);
  }
  return res;
}

}  // namespace quadform
