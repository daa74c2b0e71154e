// Acceptance criteria 1-10; one PASS/FAIL line each, nonzero exit on failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "helpers.hpp"
#include "quadform/approx.hpp"
#include "quadform/exact_series.hpp"
#include "quadform/inversion.hpp"
#include "quadform/methods.hpp"
#include "quadform/oracle.hpp"
#include "quadform/ratio.hpp"
#include "quadform/reduction.hpp"
#include "quadform/special.hpp"
#include "quadform/transforms.hpp"

using namespace quadform;

namespace {

struct Check {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
  void expect(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Criterion 1
Check worked_examples() {
  Check c;
  auto near = [&](double a, double b, const char* what) {
    c.expect(std::abs(a - b) <= 1e-10, fmt("%g vs %g", a, b) + " (" + what + ")");
  };
  RawForm f1;
  f1.A = 0.5 * Mat{{-1, -1, 1, -1}, {-1, -1, -1, 1}, {1, -1, 1, 1}, {-1, 1, 1, 1}};
  f1.b = Vec::Zero(4);
  f1.mu = Vec{{0, 1, 0, 1}};
  f1.sigma_mat = 0.25 * Mat{{5, 5, 3, 3}, {5, 5, 3, 3}, {3, 3, 9, 1}, {3, 3, 1, 9}};
  auto e = reduce_real(f1);
  c.expect(e.size() == 2, "example 1 rank");
  if (e.size() == 2) {
    if (e.lambda[0] < e.lambda[1]) {
      std::swap(e.lambda[0], e.lambda[1]);
      std::swap(e.h2[0], e.h2[1]);
    }
    near(e.lambda[0], 2.0, "lambda1");
    near(e.lambda[1], -2.0, "lambda2");
    near(e.h2[0], 0.125, "h2_1");
    near(e.h2[1], 0.125, "h2_2");
  }
  near(e.sigma_gauss, 2.0, "sigma");
  near(e.constant, 1.0, "c''");

  RawForm f2;
  f2.A = Mat{{7, 24, 0}, {24, -7, 0}, {0, 0, 25}};
  f2.b = Vec{{40, 50, 30}};
  f2.mu = Vec::Zero(3);
  f2.sigma_mat = Mat::Identity(3, 3);
  const auto r2 = reduce(f2);
  c.expect(r2.size() == 2 && r2.nu == std::vector<int>{2, 1}, "example 2 grouping");
  if (r2.size() == 2) {
    near(r2.omega[0], 25.0, "omega1");
    near(r2.omega[1], -25.0, "omega2");
    near(r2.delta2[0], 1186.0 / 625.0, "delta2_1");
    near(r2.delta2[1], 64.0 / 625.0, "delta2_2");
  }
  near(r2.constant, -1122.0 / 25.0, "c''");

  const cplx i(0, 1);
  RawComplexForm f3;
  f3.A = CMat{{1.0, -i}, {i, 1.0}};
  f3.b = CVec{{1.0, 1.0}};
  f3.mu = CVec{{1.0, 1.0 + i}};
  f3.sigma_mat = CMat{{10.0, -6.0 * i}, {6.0 * i, 10.0}};
  const auto r3 = reduce_complex(f3);
  c.expect(r3.size() == 1 && r3.nu[0] == 2, "complex example structure");
  if (r3.size() == 1) {
    near(r3.omega[0], 16.0, "omega");
    near(r3.delta2[0], 53.0 / 128.0, "delta2");
  }
  near(r3.sigma_gauss, std::sqrt(2.0), "sigma");
  near(r3.constant, 3.0 / 8.0, "c''");
  if (c.ok) c.detail = "three examples within 1e-10";
  return c;
}

// Criterion 2
Check saddlepoint_numbers() {
  Check c;
  const ReducedForm r{{0.6, 0.3, 0.1}, {2, 2, 1}, {0.0, 0.0, 0.0}, 0.0, 0.0};
  const auto s = saddlepoint_solve(r, 1.0);
  const double f = pdf_spa(r, 1.0).value;
  c.expect(std::abs(s.t0 + 1.0084) <= 1e-3, fmt("t0 = %.6f", s.t0));
  c.expect(std::abs(f - 0.42) <= 0.01, fmt("pdf = %.6f", f));
  if (c.ok) c.detail = fmt("t0 = %.5f, pdf = %.4f", s.t0, f);
  return c;
}

std::vector<double> spread_points(const ReducedForm& r) {
  const auto k = cumulants(r, 2);
  const double sd = std::sqrt(k[1]);
  return {k[0] - 1.5 * sd, k[0] - 0.5 * sd, k[0], k[0] + sd, k[0] + 2.5 * sd};
}

// Criterion 3
Check cross_method() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 g(1001);
  int pd_central = 0, points = 0;
  double worst = 0.0;
  for (int n = 0; n < 100; ++n) {
    const bool positive = n % 4 == 0;
    const bool central = n % 3 == 0;
    const ReducedForm r = testutil::random_form(g, 8, positive, central);
    for (double q : spread_points(r)) {
      ++points;
      const auto im = cdf_imhof(r, q);
      const auto dv = cdf_davies(r, q);
      const double gap = std::abs(im.value - dv.value);
      const double allow = *im.error_bound + *dv.error_bound + 1e-10;
      worst = std::max(worst, gap / allow);
      c.expect(gap <= allow, fmt("form %g: imhof-davies %.3e > %.3e", n, gap, allow));
      if (positive && central) {
        const double ru = cdf_series(r, q, SeriesKind::ruben).value;
        c.expect(std::abs(ru - im.value) <= 1e-8 && std::abs(ru - dv.value) <= 1e-8,
                 fmt("form %g: ruben differs by %.3e", n, std::max(std::abs(ru - im.value), std::abs(ru - dv.value))));
      }
    }
    if (positive && central) ++pd_central;
  }
  const double secs = seconds_since(t0);
  c.expect(secs < 120.0, fmt("runtime %.1fs", secs));
  if (c.ok)
    c.detail = fmt("%g points, worst gap/allowance %.2f, %.1fs", points, worst, secs) +
               ", " + std::to_string(pd_central) + " PD central forms checked against ruben";
  return c;
}

// Criterion 4
Check bound_validity() {
  Check c;
  std::mt19937_64 g(2002);
  int checks = 0;
  double worst = 0.0;
  auto record = [&](double resid, double bound, const std::string& what) {
    ++checks;
    // the references carry their own rounding; 1e-13 absorbs it
    c.expect(resid <= bound + 1e-13, what + fmt(": residual %.3e > bound %.3e", resid, bound));
    if (bound > 0) worst = std::max(worst, resid / bound);
  };
  for (int n = 0; n < 50; ++n) {
    const ReducedForm r = testutil::random_form(g, 8, n % 3 == 0, n % 2 == 0);
    const double q = quantile(r, 0.1 + 0.2 * (n % 5)).value;
    const std::string id = "form " + std::to_string(n);

    // loose tolerances leave residuals well above rounding
    const auto im = cdf_imhof(r, q, ImhofOptions{1e-4});
    const ImhofParams p{im.diagnostics.at("U"), static_cast<long>(im.diagnostics.at("K"))};
    const auto coarse = cdf_imhof(r, q, p);
    const auto fine = cdf_imhof(r, q, ImhofParams{4.0 * p.U, 16 * p.K});
    record(std::abs(coarse.value - fine.value), *coarse.error_bound, id + " imhof");

    const auto dv = cdf_davies(r, q, DaviesOptions{1e-4});
    const double delta = dv.diagnostics.at("delta");
    const long K = static_cast<long>(dv.diagnostics.at("K"));
    const double U = (K + 0.5) * delta;
    const auto base = cdf_davies(r, q, DaviesParams{delta, K});
    const long K4 = static_cast<long>(std::ceil(4.0 * U / delta - 0.5));
    const auto longer = cdf_davies(r, q, DaviesParams{delta, K4});
    record(std::abs(base.value - longer.value), davies_truncation_bound(r, U), id + " davies truncation");
    const long K16 = static_cast<long>(std::ceil(4.0 * U / (0.25 * delta) - 0.5));
    const auto finer = cdf_davies(r, q, DaviesParams{0.25 * delta, K16});
    const double lat = davies_lattice_bound(r, q, delta) + davies_lattice_bound(r, q, 0.25 * delta) +
                       davies_truncation_bound(r, 4.0 * U) * 2.0;
    record(std::abs(longer.value - finer.value), lat, id + " davies lattice");
  }
  if (c.ok) c.detail = fmt("%g comparisons, zero violations, worst residual/bound %.3f", checks, worst);
  return c;
}

// Forms used by the Monte Carlo battery.
std::vector<ReducedForm> battery() {
  std::vector<ReducedForm> out;
  out.push_back({{25.0, -25.0}, {2, 1}, {1186.0 / 625.0, 64.0 / 625.0}, 0.0, -1122.0 / 25.0});
  out.push_back({{16.0}, {2}, {53.0 / 128.0}, std::sqrt(2.0), 3.0 / 8.0});
  out.push_back({{2.0, -2.0}, {1, 1}, {0.125, 0.125}, 2.0, 1.0});
  out.push_back({{1.0, 0.1296}, {1, 1}, {1.0, 7.0}, 0.0, 0.0});
  out.push_back({{0.6, 0.3, 0.1}, {2, 2, 1}, {0.0, 0.0, 0.0}, 0.0, 0.0});
  std::mt19937_64 g(3003);
  for (int n = 0; out.size() < 30; ++n) {
    ReducedForm r = testutil::random_form(g, 8, n % 3 == 0, n % 4 == 0);
    if (n % 5 == 4) r.sigma_gauss = 0.5;
    out.push_back(r);
  }
  return out;
}

// Criterion 5
Check monte_carlo() {
  Check c;
  const auto forms = battery();
  // 70x below the Monte Carlo standard error; nu = 1 forms near a support end
  // cannot reach the 1e-8 default within the inversion term caps
  EvalOptions opt;
  opt.tol = 1e-6;
  int comparisons = 0;
  double worst = 0.0;
  for (std::size_t n = 0; n < forms.size(); ++n) {
    const ReducedForm& r = forms[n];
    std::vector<double> qs;
    for (double p : {0.05, 0.25, 0.5, 0.75, 0.95}) qs.push_back(quantile(r, p).value);
    const auto mc = mc_cdf(r, qs, McOptions{10000000, 4000 + n, true});
    const FormClass fc = classify(r);
    std::vector<Method> methods{Method::davies};
    if (!fc.has_gaussian) methods.push_back(Method::imhof);
    if (!fc.has_gaussian && fc.definiteness == Definiteness::positive) {
      methods.push_back(Method::ruben);
      methods.push_back(Method::laguerre);
    }
    if (!fc.has_gaussian && fc.centrality == Centrality::central && fc.even_degrees)
      methods.push_back(Method::central_even);
    for (Method m : methods) {
      for (std::size_t i = 0; i < qs.size(); ++i) {
        ++comparisons;
        const double v = evaluate_cdf(r, qs[i], m, opt).value;
        const double z = std::abs(v - mc[i].estimate) / mc[i].std_error;
        worst = std::max(worst, z);
        c.expect(z <= 4.0, "form " + std::to_string(n) + " " + to_string(m) + fmt(": z = %.2f", z));
      }
    }
  }
  if (c.ok) c.detail = fmt("%g comparisons against 1e7 draws at tol 1e-6, max |z| = %.2f", comparisons, worst);
  return c;
}

// Criterion 6
Check moment_matching() {
  Check c;
  std::mt19937_64 g(6006);
  const std::pair<MatchFamily, int> fams[] = {{MatchFamily::satterthwaite, 2},
                                              {MatchFamily::pearson, 3},
                                              {MatchFamily::hbe, 3},
                                              {MatchFamily::wood, 3},
                                              {MatchFamily::liu, 3}};
  int matched = 0;
  for (int n = 0; n < 40; ++n) {
    const ReducedForm r = testutil::random_form(g, 8, true, n % 2 == 0);
    const auto k = cumulants(r, 4);
    for (auto [f, J] : fams) {
      MatchedSurrogate s;
      try {
        s = match(k, f);
      } catch (const NotApplicable&) {
        continue;
      }
      ++matched;
      const auto ks = surrogate_cumulants(s, J);
      for (int j = 0; j < J; ++j)
        c.expect(std::abs(ks[j] - k[j]) <= 1e-10 * std::abs(k[j]),
                 std::string(to_string(f)) + fmt(": cumulant %g off by %.3e", j + 1, ks[j] - k[j]));
    }
  }

  const ReducedForm chi2{{1.0, 1.0}, {1, 1}, {0.0, 0.0}, 0.0, 0.0};
  double exact_err = 0.0;
  for (double q : {0.2, 1.0, 2.0, 5.0, 11.0}) {
    const double F = 1.0 - std::exp(-q / 2);
    for (MatchFamily f : {MatchFamily::hbe, MatchFamily::liu})
      exact_err = std::max(exact_err, std::abs(cdf_matched(chi2, q, f).value - F));
  }
  c.expect(exact_err < 1e-12, fmt("HBE/Liu chi2_2 error %.3e", exact_err));

  int wood_wins = 0, hbe_wins = 0, wood_na = 0, forms = 0;
  while (forms < 50) {
    ReducedForm r = testutil::random_form(g, 8, true, forms % 2 == 0);
    if (r.size() < 2) continue;
    ++forms;
    const double q95 = quantile(r, 0.95).value;
    auto err = [&](MatchFamily f) {
      try {
        return std::abs(cdf_matched(r, q95, f).value - 0.95);
      } catch (const NotApplicable&) {
        return 1.0;
      }
    };
    const double sat = err(MatchFamily::satterthwaite);
    wood_na += err(MatchFamily::wood) == 1.0;
    wood_wins += err(MatchFamily::wood) < sat;
    hbe_wins += err(MatchFamily::hbe) < sat;
  }
  c.expect(wood_wins >= 40 && hbe_wins >= 40,
           fmt("wood beats satterthwaite on %g/50, hbe on %g/50 (%g wood not applicable)", wood_wins,
               hbe_wins, wood_na));
  if (c.ok)
    c.detail = std::to_string(matched) + " surrogates match" +
               fmt(", chi2_2 error %.1e, wood %g/50, hbe %g/50 beat satterthwaite", exact_err, wood_wins, hbe_wins);
  return c;
}

// Criterion 7
Check known_failure() {
  Check c;
  const ReducedForm r{{1.0, 0.1296}, {1, 1}, {1.0, 7.0}, 0.0, 0.0};
  const double qs[] = {30.0, 35.0, 40.0};
  double refs[3];
  for (int i = 0; i < 3; ++i) refs[i] = cdf_davies(r, qs[i], DaviesOptions{1e-13}, Tail::upper).value;
  double prev = 1.0;
  std::string methods;
  for (int i = 0; i < 3; ++i) {
    const double q = qs[i], ref = refs[i];
    const auto a = evaluate_cdf(r, q, Method::automatic, {}, Tail::upper);
    methods += (methods.empty() ? "" : ",") + a.method;
    c.expect(a.value > 0.0, fmt("q = %g: nonpositive CCDF %.3e", q, a.value));
    c.expect(a.value < prev, fmt("q = %g: not decreasing", q));
    c.expect(std::abs(a.value - ref) <= 0.05 * ref, fmt("q = %g: %.6e vs reference %.6e", q, a.value, ref));
    prev = a.value;
  }
  // naive fixed-parameter inversion: every large deviation must be flagged
  int deviations = 0, flagged = 0;
  for (double U : {5.0, 10.0, 20.0, 50.0})
    for (long K : {20L, 50L, 100L, 1000L})
      for (int i = 0; i < 3; ++i) {
        const double q = qs[i], ref = refs[i];
        const auto im = cdf_imhof(r, q, ImhofParams{U, K}, Tail::upper);
        if (std::abs(im.value - ref) > 0.05 * ref) {
          ++deviations;
          const bool reported = !im.converged && !im.flags.empty();
          flagged += reported;
          c.expect(reported, fmt("silent deviation at U=%g K=%g q=%g", U, K, q));
        }
      }
  c.expect(deviations > 0, "no naive deviation observed");
  if (c.ok)
    c.detail = "auto methods " + methods + fmt("; %g/%g naive deviations flagged", flagged, deviations);
  return c;
}

RatioSpec ratio_spec(const Mat& A, const Mat& B) {
  const Eigen::Index n = A.rows();
  return RatioSpec{A, B, Vec::Zero(n), Mat::Identity(n, n)};
}

// Criterion 8
Check ratio() {
  Check c;
  const RatioSpec cauchy = ratio_spec(Mat{{0.0, 0.5}, {0.5, 0.0}}, Mat{{0.0, 0.0}, {0.0, 1.0}});
  const double c0 = cdf_ratio(cauchy, 0.0).value;
  c.expect(std::abs(c0 - 0.5) <= 1e-8, fmt("cauchy F(0) = %.12f", c0));

  Mat A = Mat::Zero(8, 8), B = Mat::Zero(8, 8);
  for (int i = 0; i < 3; ++i) A(i, i) = 1.0 / 3.0;
  for (int i = 3; i < 8; ++i) B(i, i) = 1.0 / 5.0;
  const RatioSpec f35 = ratio_spec(A, B);
  double cdf_err = 0.0, pdf_err = 0.0;
  for (double r : {0.05, 0.1, 0.3, 0.5, 0.8, 1.0, 1.5, 2.5, 4.0, 8.0})
    cdf_err = std::max(cdf_err, std::abs(cdf_ratio(f35, r).value - special::f_cdf(r, 3, 5)));
  const double norm = ratio_spa_normalizer(f35);
  for (double r : {0.2, 0.5, 1.0, 2.0, 4.0}) {
    const double exact = special::f_pdf(r, 3, 5);
    pdf_err = std::max(pdf_err, std::abs(pdf_ratio_spa(f35, r, {true, norm}).value - exact) / exact);
  }
  c.expect(cdf_err <= 1e-6, fmt("F(3,5) CDF error %.3e", cdf_err));
  c.expect(pdf_err <= 0.03, fmt("F(3,5) SPA density relative error %.3e", pdf_err));

  struct Corner {
    RatioSpec s;
    int p;
    bool exists;
  };
  const Mat cross{{0, 0.5, 0}, {0.5, 0, 0}, {0, 0, 0}};
  const Mat b23{{0, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const std::vector<Corner> corners{
      {ratio_spec(Mat{{1.0, 0.0}, {0.0, 0.0}}, Mat::Identity(2, 2)), 4, true},
      {cauchy, 1, false},
      {ratio_spec(cross, b23), 1, true},
      {ratio_spec(cross, b23), 2, false},
      {f35, 2, true},
      {f35, 3, false},
      {ratio_spec(Mat{{0, 0, 0}, {0, 1, 0}, {0, 0, 1}}, Mat{{0, 0, 0}, {0, 1, 0}, {0, 0, 2}}), 6, true}};
  for (std::size_t i = 0; i < corners.size(); ++i)
    c.expect(moment_exists(corners[i].s, corners[i].p).exists == corners[i].exists,
             "existence corner case " + std::to_string(i));

  std::mt19937_64 g(8008);
  std::normal_distribution<double> z;
  double agree = 0.0, worst_z = 0.0;
  for (int n = 0; n < 20; ++n) {
    const int d = 2 + n % 4;
    Mat M(d, d), L(d, d), S(d, d);
    Vec mu(d);
    for (int i = 0; i < d; ++i) {
      mu[i] = 0.7 * z(g);
      for (int j = 0; j < d; ++j) {
        M(i, j) = z(g);
        L(i, j) = z(g);
        S(i, j) = 0.3 * z(g);
      }
    }
    const RatioSpec s{0.5 * (M + M.transpose()), L * L.transpose() + 0.2 * Mat::Identity(d, d), mu,
                      Mat::Identity(d, d) + S * S.transpose()};
    for (int p = 1; p <= 3; ++p) {
      const auto series = ratio_moment_series(s, p, RatioSeriesOptions{0.0, 20000, 1e-12});
      c.expect(series.converged, fmt("instance %g p=%g: series did not converge", n, p));
      const double a = series.value;
      const double b = ratio_moment_integral(s, p).value;
      const double rel = std::abs(a - b) / std::max(std::abs(b), 1e-300);
      agree = std::max(agree, rel);
      c.expect(rel <= 1e-6, fmt("instance %g p=%g: series/integral differ by %.3e", n, p, rel));
      const auto mc = mc_ratio_moment(s, p, McOptions{1000000, 8100u + 10u * n + p, true});
      const double zz = std::abs(mc.estimate - b) / mc.std_error;
      worst_z = std::max(worst_z, zz);
      c.expect(zz <= 4.0, fmt("instance %g p=%g: Monte Carlo z = %.2f", n, p, zz));
    }
  }
  if (c.ok)
    c.detail = fmt("cauchy 0.5, F cdf err %.1e, spa err %.1e", cdf_err, pdf_err) +
               fmt(", 7 existence cases, series/integral rel %.1e, MC max |z| %.2f", agree, worst_z);
  return c;
}

// Criterion 9
Check quantile_round_trip() {
  Check c;
  std::mt19937_64 g(9009);
  double worst = 0.0;
  for (int n = 0; n < 20; ++n) {
    ReducedForm r = testutil::random_form(g, 8, n % 3 == 0, n % 2 == 0);
    if (n % 5 == 1) r.sigma_gauss = 0.4;
    for (double p : {0.001, 0.01, 0.5, 0.99, 0.999}) {
      const double q = quantile(r, p).value;
      const double err = std::abs(evaluate_cdf(r, q).value - p);
      worst = std::max(worst, err);
      c.expect(err <= 1e-8, fmt("form %g p=%g: |F(q) - p| = %.3e", n, p, err));
    }
  }
  if (c.ok) c.detail = fmt("100 round trips, worst %.2e", worst);
  return c;
}

// Criterion 10
Check tail_rate() {
  Check c;
  std::mt19937_64 g(10010);
  double worst = 0.0;
  for (int n = 0; n < 10; ++n) {
    const ReducedForm r = testutil::random_form(g, 8, true, true);
    const double k1 = cumulants(r, 1)[0];
    const double tR = mgf_domain(r).t_right;
    auto log_ccdf = [&](double q) {
      return cdf_spa(r, q, SpaVariant::lugannani_rice, Tail::upper).diagnostics.at("log_value");
    };
    const double slope = (log_ccdf(100.0 * k1) - log_ccdf(50.0 * k1)) / (50.0 * k1);
    const double rel = std::abs(slope + tR) / tR;
    worst = std::max(worst, rel);
    c.expect(rel <= 0.05, fmt("form %g: slope %.5f vs -t_R = %.5f", n, slope, -tR));
  }
  if (c.ok) c.detail = fmt("10 forms, worst relative slope error %.4f", worst);
  return c;
}

}  // namespace

// Usage: acceptance [--expect-fail N]...
// Exit status is 0 only when the failing criteria are exactly the expected ones.
int main(int argc, char** argv) {
  std::set<int> expected;
  for (int i = 1; i + 1 < argc; i += 2)
    if (std::string(argv[i]) == "--expect-fail") expected.insert(std::atoi(argv[i + 1]));
  const std::pair<const char*, std::function<Check()>> criteria[] = {
      {"1 example reductions", worked_examples},
      {"2 saddlepoint numbers", saddlepoint_numbers},
      {"3 cross-method agreement", cross_method},
      {"4 bound validity", bound_validity},
      {"5 Monte Carlo consistency", monte_carlo},
      {"6 moment matching", moment_matching},
      {"7 known-failure regression", known_failure},
      {"8 ratio correctness", ratio},
      {"9 quantile round trip", quantile_round_trip},
      {"10 tail rate", tail_rate}};
  std::set<int> failed;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c.fail(std::string("exception: ") + e.what());
    }
    const int id = std::atoi(name);
    std::printf("%s criterion %s: %s%s [%.1fs]\n", c.ok ? "PASS" : "FAIL", name, c.detail.c_str(),
                !c.ok && expected.count(id) ? " (expected failure)" : "", seconds_since(t0));
    std::fflush(stdout);
    if (!c.ok) failed.insert(id);
  }
  std::printf("%zu/10 criteria passed\n", 10 - failed.size());
  for (int id : expected)
    if (!failed.count(id)) std::printf("criterion %d was expected to fail but passed\n", id);
  return failed == expected ? 0 : 1;
}
