#pragma once

#include "quadform/types.hpp"

namespace quadform {

struct MgfDomain {
  double t_left;   // may be -inf
  double t_right;  // may be +inf
};

MgfDomain mgf_domain(const ReducedForm& red);

double mgf(const ReducedForm& red, double t);
double log_mgf(const ReducedForm& red, double t);
cplx cf(const ReducedForm& red, double beta);

// m = 0 gives K(t); m >= 1 the m-th derivative.
double cgf_derivative(const ReducedForm& red, double t, int m);

// kappa_1..kappa_J (index 0 holds kappa_1)
std::vector<double> cumulants(const ReducedForm& red, int J = 8);

// raw moments mu_1..mu_J from kappa_1..kappa_J (index 0 holds mu_1)
std::vector<double> raw_moments(const std::vector<double>& kappas);

}  // namespace quadform
