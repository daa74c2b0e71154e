#pragma once

#include "quadform/types.hpp"

namespace quadform {

struct PartialFractionTerm {
  double omega;
  int order;  // k in (1 - 2 omega t)^{-k}
  double coef;
};

struct PartialFractionExpansion {
  std::vector<PartialFractionTerm> terms;
  double constant = 0.0;  // location shift c''

  double coefficient_sum() const;
  // sum A_{lk} (1 - 2 omega_l t)^{-k}; reconstructs the MGF of the shifted form
  double evaluate(double t) const;
};

PartialFractionExpansion partial_fractions(const ReducedForm& red);

// Coefficients of the density-only form F(q) = u(q) + sum alpha_{lk} f_{lk}(q),
// with alpha_{lk} = -theta_l A_{lk} + alpha_{l,k+1} and theta_l = 2 omega_l the
// gamma scale of each block.
std::vector<PartialFractionTerm> density_form_coefficients(const PartialFractionExpansion& pf);

MethodResult cdf_central_even(const ReducedForm& red, double q, Tail tail = Tail::lower);
MethodResult pdf_central_even(const ReducedForm& red, double q);
// Same CDF via the density-only coefficients; used as an internal cross-check.
double cdf_central_even_density_form(const ReducedForm& red, double q);

enum class SeriesKind { ruben, kotz, laguerre };

const char* to_string(SeriesKind k);

struct SeriesCoefficients {
  SeriesKind kind = SeriesKind::ruben;
  double beta = 0.0;
  int N = 0;              // total degrees of freedom
  double log_c0 = 0.0;    // c_k = exp(log_c0) * c[k] * scale^k
  double scale = 1.0;     // only used by the power series
  std::vector<double> c;  // normalized: c[0] == 1
  std::vector<double> d;  // d[0] unused
  // chi-square-density series only: coefficients of the majorant obtained by
  // replacing every (1 - beta/lambda) with its absolute value, and the log of
  // its total mass. sum_{k>K} |c_k| <= total - sum_{k<=K} majorant_k.
  std::vector<double> majorant;
  double log_majorant_total = 0.0;

  std::size_t size() const { return c.size(); }
  double coefficient(std::size_t k) const;  // un-normalized c_k
};

double default_beta(const ReducedForm& red, SeriesKind kind);

// K is the highest index computed. beta <= 0 selects the default.
SeriesCoefficients series_coefficients(const ReducedForm& red, SeriesKind kind, double beta, int K);
SeriesCoefficients series_coefficients(const EffectiveForm& eff, SeriesKind kind, double beta, int K);

struct SeriesOptions {
  double tol = 1e-8;
  int max_terms = 5000;
  double beta = 0.0;  // <= 0: default for the kind
  // power series refuses q above this multiple of the mean
  double kotz_max_mean_multiple = 10.0;
};

MethodResult cdf_series(const ReducedForm& red, double q, SeriesKind kind,
                        const SeriesOptions& opt = {}, Tail tail = Tail::lower);
MethodResult pdf_series(const ReducedForm& red, double q, SeriesKind kind,
                        const SeriesOptions& opt = {});

// Evaluate with precomputed coefficients (extended internally if needed).
MethodResult cdf_series(const ReducedForm& red, const SeriesCoefficients& coefs, double q,
                        const SeriesOptions& opt = {}, Tail tail = Tail::lower);
MethodResult pdf_series(const ReducedForm& red, const SeriesCoefficients& coefs, double q,
                        const SeriesOptions& opt = {});

// Density truncation bound for the chi-square-density series of a central
// form with an even number of variables. Returns +inf when the distinct-value
// requirement on the sorted |1 - beta/lambda| fails.
double ruben_truncation_bound(const ReducedForm& red, double beta, int K, double q);

}  // namespace quadform
