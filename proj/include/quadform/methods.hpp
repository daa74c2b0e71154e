#pragma once

#include "quadform/types.hpp"

namespace quadform {

enum class Method {
  automatic,
  central_even,
  ruben,
  kotz,
  laguerre,
  imhof,
  davies,
  spa_lr,
  spa_bn,
  satterthwaite,
  pearson,
  hbe,
  wood,
  liu
};

const char* to_string(Method m);
// Accepts the CLI spellings ("auto", "central_even", ...); throws InvalidInput.
Method parse_method(const std::string& name);

enum class Quantity { cdf, pdf };

struct EvalOptions {
  double tol = 1e-8;
  long max_terms = 0;  // 0: method default
  double tau = 0.0;    // Davies convergence factor
};

// Tail probabilities below this (by Chernoff pre-check) route to the saddlepoint.
inline constexpr double kSaddlepointTail = 1e-8;

Method select_method(const ReducedForm& red, Quantity quantity, double q, Tail tail_hint = Tail::lower);

MethodResult evaluate_cdf(const ReducedForm& red, double q, Method method = Method::automatic,
                          const EvalOptions& opt = {}, Tail tail = Tail::lower);
MethodResult evaluate_pdf(const ReducedForm& red, double q, Method method = Method::automatic,
                          const EvalOptions& opt = {});

// Smallest q with F(q) = p (or upper tail = p), by bracketing and TOMS 748 on
// the chosen CDF method. diagnostics["iterations"], ["residual"].
MethodResult quantile(const ReducedForm& red, double p, Method method = Method::automatic,
                      const EvalOptions& opt = {}, Tail tail = Tail::lower);

// Many points on one reduction; series coefficients are computed once.
// The parallel version splits points across OpenMP threads.
std::vector<MethodResult> evaluate_grid(const ReducedForm& red, const std::vector<double>& qs,
                                        Quantity quantity, Method method = Method::automatic,
                                        const EvalOptions& opt = {}, Tail tail = Tail::lower);
std::vector<MethodResult> evaluate_grid_serial(const ReducedForm& red, const std::vector<double>& qs,
                                               Quantity quantity, Method method = Method::automatic,
                                               const EvalOptions& opt = {}, Tail tail = Tail::lower);

}  // namespace quadform
