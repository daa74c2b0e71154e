#pragma once

#include <cstdint>
#include <functional>

#include "quadform/ratio.hpp"
#include "quadform/types.hpp"

namespace quadform {

// Draws are split into chunks of kMcChunk samples; chunk c uses an
// mt19937_64 seeded with splitmix64(seed + c), so results do not depend on
// the thread count.
inline constexpr long kMcChunk = 1L << 16;
inline constexpr const char* kMcGenerator = "mt19937_64/splitmix64-chunked";

std::uint64_t splitmix64(std::uint64_t x);

struct McResult {
  double estimate = 0.0;
  double std_error = 0.0;
  long n = 0;
  std::uint64_t seed = 0;
  std::string generator = kMcGenerator;
};

struct McOptions {
  long n = 1000000;
  std::uint64_t seed = 1;
  bool parallel = true;
};

// Fractions of draws <= q, one result per q.
std::vector<McResult> mc_cdf(const RawForm& form, const std::vector<double>& qs, const McOptions& opt);
std::vector<McResult> mc_cdf(const RawComplexForm& form, const std::vector<double>& qs,
                             const McOptions& opt);
std::vector<McResult> mc_cdf(const ReducedForm& red, const std::vector<double>& qs,
                             const McOptions& opt);

McResult mc_cdf(const RawForm& form, double q, const McOptions& opt);
McResult mc_cdf(const RawComplexForm& form, double q, const McOptions& opt);
McResult mc_cdf(const ReducedForm& red, double q, const McOptions& opt);

// Sample mean of R^p with jackknife standard error; NotApplicable when the
// moment does not exist.
McResult mc_ratio_moment(const RatioSpec& spec, int p, const McOptions& opt);

// Reference CDF from discretized component densities convolved by FFT.
// Each component density is taken as constant on its cells (exact cell
// masses); the sum is then evaluated exactly, i.e. lattice masses convolved
// with an Irwin-Hall kernel of the same order.
class GridCdf {
 public:
  GridCdf(double c0, double step, int order, std::vector<double> masses);
  double operator()(double q) const;
  double step() const { return step_; }

 private:
  double c0_;  // location of the first lattice mass
  double step_;
  int order_;
  std::vector<double> mass_;
  std::vector<double> cum_;
};

// L <= 3 weights, sigma = 0. span is the width covered for each component
// (<= 0: chosen so every component leaves < 1e-12 outside). InvalidInput when
// a component puts more than 1e-10 outside its span. Error is O(step^2).
GridCdf grid_cdf(const ReducedForm& red, double step, double span = 0.0);

}  // namespace quadform
