#include "quadform/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>

#include <unsupported/Eigen/FFT>
#include <boost/random/normal_distribution.hpp>

#include "quadform/reduction.hpp"
#include "quadform/special.hpp"

namespace quadform {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

struct Normal {
  std::mt19937_64 eng;
  boost::random::normal_distribution<double> dist;
  explicit Normal(std::uint64_t s) : eng(s) {}
  double operator()() { return dist(eng); }
};

// Running mean and sum of squared deviations.
struct Moments {
  long n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  void merge(const Moments& o) {
    if (o.n == 0) return;
    const long t = n + o.n;
    const double d = o.mean - mean;
    mean += d * o.n / t;
    m2 += o.m2 + d * d * static_cast<double>(n) * o.n / t;
    n = t;
  }
};

// Runs body(chunk_index, chunk_size, Normal&) over all chunks; body writes
// its own per-chunk slot, so the merge order is fixed.
template <typename Body>
void for_chunks(const McOptions& opt, Body body) {
  if (opt.n < 1) throw InvalidInput("sample count n must be >= 1");
  const long chunks = (opt.n + kMcChunk - 1) / kMcChunk;
  std::vector<std::exception_ptr> errs(chunks);
  auto run = [&](long c) {
    try {
      Normal g(splitmix64(opt.seed + static_cast<std::uint64_t>(c)));
      body(c, std::min(kMcChunk, opt.n - c * kMcChunk), g);
    } catch (...) {
      errs[c] = std::current_exception();
    }
  };
  if (opt.parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long c = 0; c < chunks; ++c) run(c);
  } else {
    for (long c = 0; c < chunks; ++c) run(c);
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

template <typename Draw>
std::vector<McResult> empirical_cdf(const std::vector<double>& qs, const McOptions& opt, Draw draw) {
  const long chunks = (opt.n + kMcChunk - 1) / kMcChunk;
  std::vector<std::vector<long>> counts(chunks, std::vector<long>(qs.size(), 0));
  for_chunks(opt, [&](long c, long m, Normal& g) {
    auto& cnt = counts[c];
    for (long i = 0; i < m; ++i) {
      const double x = draw(g);
      for (std::size_t k = 0; k < qs.size(); ++k)
        if (x <= qs[k]) ++cnt[k];
    }
  });
  std::vector<McResult> out(qs.size());
  for (std::size_t k = 0; k < qs.size(); ++k) {
    long total = 0;
    for (const auto& cnt : counts) total += cnt[k];
    const double p = static_cast<double>(total) / opt.n;
    out[k].estimate = p;
    out[k].std_error = std::sqrt(p * (1.0 - p) / opt.n);
    out[k].n = opt.n;
    out[k].seed = opt.seed;
  }
  return out;
}

}  // namespace

std::vector<McResult> mc_cdf(const RawForm& form, const std::vector<double>& qs, const McOptions& opt) {
  validate(form);
  const auto fac = factor_covariance(form.sigma_mat);
  const Mat A = 0.5 * (form.A + form.A.transpose());
  const Eigen::Index r = fac.rank;
  return empirical_cdf(qs, opt, [&](Normal& g) {
    Vec z(r);
    for (Eigen::Index i = 0; i < r; ++i) z[i] = g();
    const Vec x = form.mu + fac.B * z;
    return x.dot(A * x) + form.b.dot(x) + form.c;
  });
}

std::vector<McResult> mc_cdf(const RawComplexForm& form, const std::vector<double>& qs,
                             const McOptions& opt) {
  const Eigen::Index n = form.A.rows();
  if (form.A.cols() != n || form.sigma_mat.rows() != n || form.sigma_mat.cols() != n ||
      form.b.size() != n || form.mu.size() != n)
    throw InvalidInput("complex form has inconsistent dimensions");
  const auto fac = factor_covariance(form.sigma_mat);
  const CMat A = 0.5 * (form.A + form.A.adjoint());
  const Eigen::Index r = fac.rank;
  const double s = std::sqrt(0.5);
  return empirical_cdf(qs, opt, [&](Normal& g) {
    CVec z(r);
    for (Eigen::Index i = 0; i < r; ++i) {
      const double re = g();
      z[i] = cplx(s * re, s * g());
    }
    const CVec x = form.mu + fac.B * z;
    // dot conjugates its left argument
    return x.dot(A * x).real() + form.b.dot(x).real() + form.c;
  });
}

std::vector<McResult> mc_cdf(const ReducedForm& red, const std::vector<double>& qs,
                             const McOptions& opt) {
  validate(red);
  return empirical_cdf(qs, opt, [&](Normal& g) {
    double x = red.constant;
    for (std::size_t l = 0; l < red.size(); ++l) {
      // all noncentrality on the first of nu unit normals
      const double z0 = g() + std::sqrt(red.delta2[l]);
      double s = z0 * z0;
      for (int k = 1; k < red.nu[l]; ++k) {
        const double z = g();
        s += z * z;
      }
      x += red.omega[l] * s;
    }
    if (red.sigma_gauss > 0.0) x += red.sigma_gauss * g();
    return x;
  });
}

McResult mc_cdf(const RawForm& form, double q, const McOptions& opt) {
  return mc_cdf(form, std::vector<double>{q}, opt)[0];
}
McResult mc_cdf(const RawComplexForm& form, double q, const McOptions& opt) {
  return mc_cdf(form, std::vector<double>{q}, opt)[0];
}
McResult mc_cdf(const ReducedForm& red, double q, const McOptions& opt) {
  return mc_cdf(red, std::vector<double>{q}, opt)[0];
}

McResult mc_ratio_moment(const RatioSpec& spec, int p, const McOptions& opt) {
  const auto ex = moment_exists(spec, p);
  if (!ex.exists)
    throw NotApplicable("moment of order " + std::to_string(p) + " does not exist (" +
                        ex.condition + ")");
  const WhitenedRatio w = whiten(spec);
  const Eigen::Index r = w.m.size();
  const long chunks = (opt.n + kMcChunk - 1) / kMcChunk;
  std::vector<Moments> parts(chunks);
  for_chunks(opt, [&](long c, long m, Normal& g) {
    Vec x(r);
    for (long i = 0; i < m; ++i) {
      for (Eigen::Index k = 0; k < r; ++k) x[k] = w.m[k] + g();
      const double num = x.dot(w.A * x);
      const double den = x.dot(w.B * x);
      parts[c].add(std::pow(num / den, p));
    }
  });
  Moments all;
  for (const auto& part : parts) all.merge(part);
  McResult res;
  res.estimate = all.mean;
  res.n = opt.n;
  res.seed = opt.seed;
  // the delete-one jackknife of a mean reduces to s / sqrt(n)
  res.std_error = opt.n > 1 ? std::sqrt(all.m2 / (opt.n - 1.0) / opt.n) : 0.0;
  return res;
}

GridCdf::GridCdf(double c0, double step, int order, std::vector<double> masses)
    : c0_(c0), step_(step), order_(order), mass_(std::move(masses)), cum_(mass_.size()) {
  double s = 0.0;
  for (std::size_t j = 0; j < mass_.size(); ++j) {
    mass_[j] = std::max(mass_[j], 0.0);
    s += mass_[j];
    cum_[j] = s;
  }
}

namespace {

// CDF of a sum of n uniforms on (0, 1)
double irwin_hall_cdf(double x, int n) {
  if (x <= 0.0) return 0.0;
  if (x >= n) return 1.0;
  double s = 0.0, binom = 1.0, fact = 1.0;
  for (int k = 1; k <= n; ++k) fact *= k;
  for (int k = 0; k <= static_cast<int>(std::floor(x)); ++k) {
    s += ((k % 2) ? -1.0 : 1.0) * binom * std::pow(x - k, n);
    binom = binom * (n - k) / (k + 1);
  }
  return s / fact;
}

}  // namespace

double GridCdf::operator()(double q) const {
  // mass j is spread over [c_j - order h/2, c_j + order h/2]
  const double s = (q - c0_) / step_ + 0.5 * order_;
  const long n = static_cast<long>(mass_.size());
  const long full = static_cast<long>(std::floor(s)) - order_;  // j <= full lie left of q
  double F = full >= 0 ? cum_[std::min(full, n - 1)] : 0.0;
  for (long j = std::max(full + 1, 0L); j < n && j <= full + order_; ++j)
    F += mass_[j] * irwin_hall_cdf(s - j, order_);
  return std::min(F, 1.0);
}

GridCdf grid_cdf(const ReducedForm& red, double step, double span) {
  validate(red);
  if (red.sigma_gauss > 0.0) throw InvalidInput("grid oracle requires sigma = 0");
  if (red.size() == 0 || red.size() > 3) throw InvalidInput("grid oracle supports 1 to 3 weights");
  if (!(step > 0.0)) throw InvalidInput("grid step must be > 0");

  auto outside = [&](std::size_t l, double W) {
    return special::ncx2_ccdf(W / std::abs(red.omega[l]), red.nu[l], red.delta2[l]);
  };
  std::vector<double> widths(red.size());
  for (std::size_t l = 0; l < red.size(); ++l) {
    double W = span;
    if (!(W > 0.0)) {
      W = std::abs(red.omega[l]) * (red.nu[l] + red.delta2[l] + 1.0);
      while (outside(l, W) > 1e-12) W *= 1.25;
    }
    if (outside(l, W) > 1e-10)
      throw InvalidInput("grid span leaves more than 1e-10 probability outside");
    widths[l] = W;
  }

  // component masses on cells of width step; value k sits at the cell centre
  double x0 = red.constant;
  std::vector<std::vector<double>> comps;
  std::size_t total = 1;
  for (std::size_t l = 0; l < red.size(); ++l) {
    const double w = red.omega[l];
    const auto n = static_cast<std::size_t>(std::ceil(widths[l] / step));
    std::vector<double> mass(n);
    double prev = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double edge = (k + 1) * step / std::abs(w);
      const double F = special::ncx2_cdf(edge, red.nu[l], red.delta2[l]);
      mass[k] = F - prev;
      prev = F;
    }
    if (w < 0.0) {
      std::reverse(mass.begin(), mass.end());
      x0 -= n * step;
    }
    total += n - 1;
    comps.push_back(std::move(mass));
  }

  std::vector<double> conv = comps[0];
  if (comps.size() > 1) {
    std::size_t nfft = 1;
    while (nfft < total) nfft <<= 1;
    Eigen::FFT<double> fft;
    std::vector<cplx> acc;
    for (std::size_t l = 0; l < comps.size(); ++l) {
      std::vector<double> padded(nfft, 0.0);
      std::copy(comps[l].begin(), comps[l].end(), padded.begin());
      std::vector<cplx> spec;
      fft.fwd(spec, padded);
      if (l == 0)
        acc = spec;
      else
        for (std::size_t k = 0; k < nfft; ++k) acc[k] *= spec[k];
    }
    std::vector<double> back;
    fft.inv(back, acc);
    back.resize(total);
    conv = std::move(back);
  }

  // summing L cell centres puts mass j at x0 + (j + L/2) step
  const double L = static_cast<double>(comps.size());
  return GridCdf(x0 + 0.5 * L * step, step, static_cast<int>(comps.size()), std::move(conv));
}

}  // namespace quadform
