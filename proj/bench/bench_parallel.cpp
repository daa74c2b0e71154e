// Parallel vs serial timings for grid evaluation and Monte Carlo.
#include <chrono>
#include <cstdio>
#include <vector>

#include <omp.h>

#include "quadform/methods.hpp"
#include "quadform/oracle.hpp"

using namespace quadform;

namespace {

template <typename F>
double seconds(F f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", omp_get_max_threads());

  const ReducedForm indef{{2.0, 1.0, -0.7, 0.4}, {1, 2, 1, 3}, {0.5, 0.0, 1.0, 0.2}, 0.0, 0.0};
  std::vector<double> qs;
  for (int i = 0; i < 400; ++i) qs.push_back(-10.0 + 30.0 * i / 399.0);

  std::vector<MethodResult> a, b;
  const double ts = seconds([&] { a = evaluate_grid_serial(indef, qs, Quantity::cdf, Method::davies); });
  const double tp = seconds([&] { b = evaluate_grid(indef, qs, Quantity::cdf, Method::davies); });
  double diff = 0.0;
  for (std::size_t i = 0; i < qs.size(); ++i) diff = std::max(diff, std::abs(a[i].value - b[i].value));
  std::printf("grid davies (%zu points): serial %.3fs parallel %.3fs speedup %.2f max|diff| %.1e\n",
              qs.size(), ts, tp, ts / tp, diff);

  const ReducedForm pd{{1.0, 0.5, 0.25}, {2, 1, 3}, {1.0, 0.0, 2.0}, 0.0, 0.0};
  std::vector<double> qp;
  for (int i = 0; i < 400; ++i) qp.push_back(0.05 + 25.0 * i / 399.0);
  const double rs = seconds([&] { a = evaluate_grid_serial(pd, qp, Quantity::cdf, Method::ruben); });
  const double rp = seconds([&] { b = evaluate_grid(pd, qp, Quantity::cdf, Method::ruben); });
  std::printf("grid ruben (%zu points): serial %.3fs parallel %.3fs speedup %.2f\n", qp.size(), rs, rp,
              rs / rp);

  McOptions ser{4000000, 7, false}, par{4000000, 7, true};
  McResult ms, mp;
  const double ms_t = seconds([&] { ms = mc_cdf(indef, 3.0, ser); });
  const double mp_t = seconds([&] { mp = mc_cdf(indef, 3.0, par); });
  std::printf("monte carlo (n=%ld): serial %.3fs parallel %.3fs speedup %.2f identical %s\n", ser.n,
              ms_t, mp_t, ms_t / mp_t, ms.estimate == mp.estimate ? "yes" : "no");
  return 0;
}
