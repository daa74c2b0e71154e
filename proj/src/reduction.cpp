#include "quadform/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace quadform {

namespace {

constexpr double kSymTol = 1e-9;
constexpr double kPsdTol = 1e-8;

template <typename M>
void check_square(const M& m, Eigen::Index n, const char* name) {
  if (m.rows() != n || m.cols() != n)
    throw InvalidInput(std::string(name) + " must be " + std::to_string(n) + "x" +
                       std::to_string(n));
}

template <typename M>
void check_selfadjoint(const M& m, const char* name) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kSymTol * scale)
    throw InvalidInput(std::string(name) + " is not symmetric/Hermitian (asymmetry " +
                       std::to_string(asym) + ")");
}

template <typename M, typename Out>
Out factor_impl(const M& sigma_mat, double tol) {
  if (sigma_mat.rows() != sigma_mat.cols()) throw InvalidInput("covariance must be square");
  check_selfadjoint(sigma_mat, "covariance");
  const Eigen::Index n = sigma_mat.rows();
  Out out;
  if (n == 0) {
    out.B.resize(0, 0);
    return out;
  }
  M sym = 0.5 * (sigma_mat + sigma_mat.adjoint());
  Eigen::SelfAdjointEigenSolver<M> es(sym);
  const Vec& ev = es.eigenvalues();  // ascending
  const double emax = std::max(ev.cwiseAbs().maxCoeff(), 0.0);
  if (ev(0) < -kPsdTol * emax)
    throw InvalidInput("covariance is not positive semidefinite (eigenvalue " +
                       std::to_string(ev(0)) + ")");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = n - 1; i >= 0; --i)
    if (ev(i) > tol * emax && ev(i) > 0.0) keep.push_back(i);
  out.rank = static_cast<int>(keep.size());
  out.B.resize(n, out.rank);
  for (int j = 0; j < out.rank; ++j)
    out.B.col(j) = es.eigenvectors().col(keep[j]) * std::sqrt(ev(keep[j]));
  return out;
}

struct Entry {
  double lambda;
  double h2;
};

}  // namespace

CovarianceFactor factor_covariance(const Mat& sigma_mat, double tol) {
  return factor_impl<Mat, CovarianceFactor>(sigma_mat, tol);
}

ComplexCovarianceFactor factor_covariance(const CMat& sigma_mat, double tol) {
  return factor_impl<CMat, ComplexCovarianceFactor>(sigma_mat, tol);
}

void validate(const RawForm& f) {
  const Eigen::Index n = f.A.rows();
  check_square(f.A, n, "A");
  check_square(f.sigma_mat, n, "sigma");
  if (f.b.size() != n) throw InvalidInput("b has wrong length");
  if (f.mu.size() != n) throw InvalidInput("mu has wrong length");
  check_selfadjoint(f.A, "A");
  if (!f.A.allFinite() || !f.b.allFinite() || !f.mu.allFinite() || !f.sigma_mat.allFinite() ||
      !std::isfinite(f.c))
    throw InvalidInput("non-finite entries in form");
}

void validate(const ReducedForm& r) {
  const std::size_t L = r.omega.size();
  if (r.nu.size() != L || r.delta2.size() != L)
    throw InvalidInput("omega, nu and delta2 must have equal length");
  for (std::size_t i = 0; i < L; ++i) {
    if (!std::isfinite(r.omega[i]) || r.omega[i] == 0.0)
      throw InvalidInput("omega entries must be finite and nonzero");
    if (r.nu[i] < 1) throw InvalidInput("nu entries must be >= 1");
    if (!(r.delta2[i] >= 0.0) || !std::isfinite(r.delta2[i]))
      throw InvalidInput("delta2 entries must be finite and >= 0");
  }
  if (!(r.sigma_gauss >= 0.0) || !std::isfinite(r.sigma_gauss))
    throw InvalidInput("sigma must be finite and >= 0");
  if (!std::isfinite(r.constant)) throw InvalidInput("constant must be finite");
  if (L == 0 && r.sigma_gauss == 0.0) throw DegenerateConstant(r.constant);
}

EffectiveForm reduce_real(const RawForm& form, const ReductionOptions& opt) {
  validate(form);
  const Mat A = 0.5 * (form.A + form.A.transpose());
  const auto fac = factor_covariance(form.sigma_mat, opt.zero_tol);
  const double cprime = form.b.dot(form.mu) + form.mu.dot(A * form.mu) + form.c;
  if (fac.rank == 0) throw DegenerateConstant(cprime);

  const Mat M = fac.B.transpose() * A * fac.B;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (M + M.transpose()));
  const Vec& lam = es.eigenvalues();
  const Vec d = es.eigenvectors().transpose() * (fac.B.transpose() * (2.0 * A * form.mu + form.b));

  const double lmax = lam.cwiseAbs().maxCoeff();
  std::vector<Entry> entries;
  double s2 = 0.0, shift = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lmax == 0.0 || std::abs(lam(i)) <= opt.zero_tol * lmax) {
      s2 += d(i) * d(i);
    } else {
      const double h = d(i) / (2.0 * lam(i));
      entries.push_back({lam(i), h * h});
      shift += lam(i) * h * h;
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.lambda > b.lambda; });

  EffectiveForm eff;
  for (const auto& e : entries) {
    eff.lambda.push_back(e.lambda);
    eff.h2.push_back(e.h2);
  }
  eff.sigma_gauss = std::sqrt(s2);
  if (eff.sigma_gauss < opt.sigma_tol * (1.0 + d.norm())) eff.sigma_gauss = 0.0;
  eff.constant = cprime - shift;
  if (eff.lambda.empty() && eff.sigma_gauss == 0.0) throw DegenerateConstant(eff.constant);
  return eff;
}

ReducedForm group_eigenvalues(const EffectiveForm& eff, double group_tol) {
  std::vector<std::size_t> idx(eff.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return eff.lambda[a] > eff.lambda[b]; });

  ReducedForm red;
  red.sigma_gauss = eff.sigma_gauss;
  red.constant = eff.constant;
  double sum = 0.0, prev = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const double l = eff.lambda[idx[k]];
    const bool join = k > 0 && (l > 0) == (prev > 0) &&
                      std::abs(l - prev) <= group_tol * std::max(std::abs(l), std::abs(prev));
    if (join) {
      red.nu.back() += 1;
      red.delta2.back() += eff.h2[idx[k]];
      sum += l;
      red.omega.back() = sum / red.nu.back();
    } else {
      red.omega.push_back(l);
      red.nu.push_back(1);
      red.delta2.push_back(eff.h2[idx[k]]);
      sum = l;
    }
    prev = l;
  }
  return red;
}

ReducedForm reduce(const RawForm& form, const ReductionOptions& opt) {
  return group_eigenvalues(reduce_real(form, opt), opt.group_tol);
}

ReducedForm reduce_complex(const RawComplexForm& form, const ReductionOptions& opt) {
  const Eigen::Index n = form.A.rows();
  check_square(form.A, n, "A");
  check_square(form.sigma_mat, n, "sigma");
  if (form.b.size() != n) throw InvalidInput("b has wrong length");
  if (form.mu.size() != n) throw InvalidInput("mu has wrong length");
  check_selfadjoint(form.A, "A");

  const CMat A = 0.5 * (form.A + form.A.adjoint());
  const auto fac = factor_covariance(form.sigma_mat, opt.zero_tol);
  const double cprime =
      form.b.dot(form.mu).real() + form.mu.dot(A * form.mu).real() + form.c;
  if (fac.rank == 0) throw DegenerateConstant(cprime);

  const CMat M = fac.B.adjoint() * A * fac.B;
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (M + M.adjoint()));
  const Vec& lam = es.eigenvalues();
  const CVec d =
      es.eigenvectors().adjoint() * (fac.B.adjoint() * (2.0 * A * form.mu + form.b));

  const double lmax = lam.cwiseAbs().maxCoeff();
  EffectiveForm eff;
  double s2 = 0.0, shift = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    const double a2 = std::norm(d(i));
    if (lmax == 0.0 || std::abs(lam(i)) <= opt.zero_tol * lmax) {
      s2 += 0.5 * a2;
    } else {
      // lambda |z + d/(2 lambda)|^2 = (lambda/2) chi2_2(|d|^2 / (2 lambda^2))
      const double h2 = a2 / (2.0 * lam(i) * lam(i));
      for (int rep = 0; rep < 2; ++rep) {
        eff.lambda.push_back(0.5 * lam(i));
        eff.h2.push_back(0.5 * h2);
      }
      shift += a2 / (4.0 * lam(i));
    }
  }
  eff.sigma_gauss = std::sqrt(s2);
  if (eff.sigma_gauss < opt.sigma_tol * (1.0 + d.norm())) eff.sigma_gauss = 0.0;
  eff.constant = cprime - shift;
  if (eff.lambda.empty() && eff.sigma_gauss == 0.0) throw DegenerateConstant(eff.constant);
  // tied pairs always share a cluster, so nu stays even
  return group_eigenvalues(eff, opt.group_tol);
}

FormClass classify(const ReducedForm& red) {
  FormClass fc;
  bool any_pos = false, any_neg = false, central = true, even = true;
  for (std::size_t i = 0; i < red.size(); ++i) {
    if (red.omega[i] > 0) any_pos = true;
    if (red.omega[i] < 0) any_neg = true;
    if (red.delta2[i] > 0) central = false;
    if (red.nu[i] % 2 != 0) even = false;
  }
  fc.centrality = central ? Centrality::central : Centrality::noncentral;
  if (any_pos && !any_neg)
    fc.definiteness = Definiteness::positive;
  else if (any_neg && !any_pos)
    fc.definiteness = Definiteness::negative;
  else
    fc.definiteness = Definiteness::indefinite;
  fc.has_gaussian = red.sigma_gauss > 0.0;
  fc.even_degrees = even;
  return fc;
}

EffectiveForm expand(const ReducedForm& red) {
  EffectiveForm eff;
  for (std::size_t l = 0; l < red.size(); ++l)
    for (int k = 0; k < red.nu[l]; ++k) {
      eff.lambda.push_back(red.omega[l]);
      eff.h2.push_back(red.delta2[l] / red.nu[l]);
    }
  eff.sigma_gauss = red.sigma_gauss;
  eff.constant = red.constant;
  return eff;
}

std::vector<double> eigenvalues_sigma_a(const Mat& sigma_mat, const Mat& A) {
  Eigen::EigenSolver<Mat> es(sigma_mat * A, false);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i).real());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace quadform
