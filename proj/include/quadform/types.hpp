#pragma once

#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace quadform {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// x ~ N(mu, sigma_mat), Q = x'Ax + b'x + c
struct RawForm {
  Mat A;
  Vec b;
  double c = 0.0;
  Vec mu;
  Mat sigma_mat;
};

// x ~ CN(mu, sigma_mat), Q = x^H A x + Re(b^H x) + c
struct RawComplexForm {
  CMat A;
  CVec b;
  double c = 0.0;
  CVec mu;
  CMat sigma_mat;
};

// Q = sum_n lambda_n (z_n + h_n)^2 + sigma_gauss * z_0 + const
struct EffectiveForm {
  std::vector<double> lambda;
  std::vector<double> h2;
  double sigma_gauss = 0.0;
  double constant = 0.0;

  std::size_t size() const { return lambda.size(); }
};

// Q = sum_l omega_l chi2_{nu_l}(delta2_l) + sigma_gauss * z_0 + const
struct ReducedForm {
  std::vector<double> omega;
  std::vector<int> nu;
  std::vector<double> delta2;
  double sigma_gauss = 0.0;
  double constant = 0.0;

  std::size_t size() const { return omega.size(); }
  int total_dof() const {
    int s = 0;
    for (int n : nu) s += n;
    return s;
  }
};

enum class Centrality { central, noncentral };
enum class Definiteness { positive, negative, indefinite };

struct FormClass {
  Centrality centrality = Centrality::central;
  Definiteness definiteness = Definiteness::indefinite;
  bool has_gaussian = false;
  bool even_degrees = false;
};

enum class Tail { lower, upper };

struct MethodResult {
  double value = 0.0;
  // empty when only a heuristic or no estimate exists
  std::optional<double> error_bound;
  std::string method;
  bool converged = true;
  std::map<std::string, double> diagnostics;
  std::vector<std::string> flags;

  bool has_flag(const std::string& f) const {
    for (const auto& x : flags)
      if (x == f) return true;
    return false;
  }
};

// Error taxonomy. The CLI maps these to exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidInput : Error {
  using Error::Error;
};

struct NotApplicable : Error {
  using Error::Error;
};

struct ConvergenceFailure : Error {
  MethodResult partial;
  ConvergenceFailure(const std::string& what, MethodResult p)
      : Error(what), partial(std::move(p)) {}
};

struct DomainError : Error {
  double t_left, t_right;
  DomainError(const std::string& what, double tl, double tr)
      : Error(what), t_left(tl), t_right(tr) {}
};

// Raised when a form collapses to a constant (no random part at all).
struct DegenerateConstant : Error {
  double value;
  explicit DegenerateConstant(double v)
      : Error("quadratic form is a degenerate constant"), value(v) {}
};

}  // namespace quadform
