#pragma once

#include "quadform/types.hpp"

namespace quadform {

struct ReductionOptions {
  double zero_tol = 1e-12;   // relative threshold for zero eigenvalues
  double group_tol = 1e-9;   // relative gap for clustering eigenvalues
  double sigma_tol = 1e-12;  // Gaussian term dropped below sigma_tol*(1+|d|)
};

struct CovarianceFactor {
  Mat B;  // N x r, B B' = sigma_mat
  int rank = 0;
};

struct ComplexCovarianceFactor {
  CMat B;
  int rank = 0;
};

CovarianceFactor factor_covariance(const Mat& sigma_mat, double tol = 1e-12);
ComplexCovarianceFactor factor_covariance(const CMat& sigma_mat, double tol = 1e-12);

EffectiveForm reduce_real(const RawForm& form, const ReductionOptions& opt = {});
ReducedForm group_eigenvalues(const EffectiveForm& eff, double group_tol = 1e-9);
ReducedForm reduce_complex(const RawComplexForm& form, const ReductionOptions& opt = {});
FormClass classify(const ReducedForm& red);

// Convenience: reduce_real followed by grouping.
ReducedForm reduce(const RawForm& form, const ReductionOptions& opt = {});

// Expand a reduced form back to one entry per degree of freedom.
EffectiveForm expand(const ReducedForm& red);

// Eigenvalues of sigma*A computed directly (nonsymmetric solver), sorted
// descending. Used to cross-check the factored computation.
std::vector<double> eigenvalues_sigma_a(const Mat& sigma_mat, const Mat& A);

void validate(const RawForm& form);
void validate(const ReducedForm& red);

}  // namespace quadform
