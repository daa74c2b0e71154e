#pragma once

#include <cmath>
#include <random>

#include "quadform/types.hpp"

namespace testutil {

// Random reduced form with total dof <= max_dof and no Gaussian term.
inline quadform::ReducedForm random_form(std::mt19937_64& g, int max_dof, bool positive,
                                         bool central) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  quadform::ReducedForm r;
  int dof = 0;
  const int L = 1 + static_cast<int>(u(g) * 4);
  for (int l = 0; l < L && dof < max_dof; ++l) {
    const int nu = 1 + static_cast<int>(u(g) * std::min(3, max_dof - dof));
    double w = 0.1 + 2.0 * u(g);
    if (!positive && u(g) < 0.4) w = -w;
    r.omega.push_back(w);
    r.nu.push_back(nu);
    r.delta2.push_back(central ? 0.0 : (u(g) < 0.5 ? 0.0 : 3.0 * u(g)));
    dof += nu;
  }
  return r;
}

inline bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace testutil
