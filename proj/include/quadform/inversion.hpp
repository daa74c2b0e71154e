#pragma once

#include "quadform/types.hpp"

namespace quadform {

// --- Imhof ------------------------------------------------------------------

struct ImhofParams {
  double U = 0.0;  // truncation point
  long K = 0;      // trapezoid panels on [0, U]
};

struct ImhofOptions {
  double tol = 1e-8;
  long max_panels = 1L << 23;
};

struct ImhofIntegrand {
  double theta;
  double rho;
};

ImhofIntegrand imhof_integrand(const ReducedForm& red, double u, double q);
// sin(theta)/(u rho), with the u -> 0 limit at u = 0
double imhof_kernel(const ReducedForm& red, double u, double q);

// Bound on |(1/pi) int_U^inf sin(theta)/(u rho) du| from |rho| growth alone.
double imhof_truncation_bound(const ReducedForm& red, double U);
// Integration-by-parts bound using the oscillation of sin(theta); +inf when
// its preconditions (theta' bounded away from zero beyond U) fail.
double imhof_oscillation_bound(const ReducedForm& red, double U, double q);

MethodResult cdf_imhof(const ReducedForm& red, double q, const ImhofOptions& opt = {},
                       Tail tail = Tail::lower);
// Fixed parameters: never throws for accuracy reasons; suspicious results are
// flagged ("negative_probability", "bound_exceeds_value").
MethodResult cdf_imhof(const ReducedForm& red, double q, const ImhofParams& params,
                       Tail tail = Tail::lower);
MethodResult pdf_imhof(const ReducedForm& red, double q, const ImhofOptions& opt = {});
MethodResult pdf_imhof(const ReducedForm& red, double q, const ImhofParams& params);

// --- Davies -----------------------------------------------------------------

struct DaviesParams {
  double delta = 0.0;  // lattice spacing
  long K = 0;          // last lattice index; U = (K + 1/2) delta
  double tau = 0.0;    // Gaussian convergence factor (0 disables)
};

struct DaviesOptions {
  double tol = 1e-8;
  long max_terms = 1L << 24;
  double tau = 0.0;
};

// Chernoff bounds on P(Q >= x) and P(Q <= x) for Q plus an independent
// N(0, extra_var) term; minimized over t by golden-section search.
double chernoff_upper(const ReducedForm& red, double x, double extra_var = 0.0);
double chernoff_lower(const ReducedForm& red, double x, double extra_var = 0.0);

struct DaviesTruncation {
  double b1, b2, b3;
  double best() const;
};

// Bounds on the omitted lattice terms beyond U (each +inf when inapplicable).
DaviesTruncation davies_truncation_bounds(const ReducedForm& red, double U, double tau = 0.0);
double davies_truncation_bound(const ReducedForm& red, double U, double tau = 0.0);
// Abel-summation bound on the omitted terms using the oscillation of the
// phase; +inf when sin(delta q'/2) vanishes or the phase is not yet monotone.
double davies_oscillation_bound(const ReducedForm& red, double q, double delta, double U,
                                double tau = 0.0);
// Bound on the omitted terms at q' = 0, where the phase tends to a known limit
// and no oscillation is available; +inf otherwise.
double davies_phase_limit_bound(const ReducedForm& red, double q, double U, double tau = 0.0);
// Aliasing error of the midpoint lattice with spacing delta at q.
double davies_lattice_bound(const ReducedForm& red, double q, double delta, double tau = 0.0);
// Smallest period L = 2 pi / delta whose aliasing bound is <= target.
double davies_period(const ReducedForm& red, double q, double target, double tau = 0.0);

MethodResult cdf_davies(const ReducedForm& red, double q, const DaviesOptions& opt = {},
                        Tail tail = Tail::lower);
MethodResult cdf_davies(const ReducedForm& red, double q, const DaviesParams& params,
                        Tail tail = Tail::lower);

}  // namespace quadform
