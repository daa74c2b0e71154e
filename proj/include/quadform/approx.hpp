#pragma once

#include "quadform/types.hpp"

namespace quadform {

// --- moment matching --------------------------------------------------------

enum class MatchFamily { satterthwaite, pearson, hbe, wood, liu };

const char* to_string(MatchFamily f);

struct MatchedSurrogate {
  MatchFamily family = MatchFamily::satterthwaite;
  // satterthwaite: a, b      pearson: a, b, c      hbe: b, kappa1, kappa2
  // wood: alpha1, alpha2, beta      liu: a, delta, l, kappa1, kappa2
  std::vector<double> params;
  std::string branch;  // liu: "s1^2 > s2" or "s1^2 <= s2"
};

// kappas[0] = kappa_1; needs 2 (satterthwaite), 3 (pearson, hbe, wood) or 4 (liu)
MatchedSurrogate match(const std::vector<double>& kappas, MatchFamily family);

// First J cumulants of the surrogate from its own closed form.
std::vector<double> surrogate_cumulants(const MatchedSurrogate& s, int J);

double surrogate_cdf(const MatchedSurrogate& s, double q, Tail tail = Tail::lower);

MethodResult cdf_matched(const ReducedForm& red, double q, MatchFamily family,
                         Tail tail = Tail::lower);

// --- saddlepoint ------------------------------------------------------------

struct SaddlepointSolution {
  double t0 = 0.0;
  double w = 0.0;
  double v = 0.0;
  double K = 0.0;   // K(t0)
  double K2 = 0.0;  // K''(t0)
};

SaddlepointSolution saddlepoint_solve(const ReducedForm& red, double q);

MethodResult pdf_spa(const ReducedForm& red, double q);

enum class SpaVariant { lugannani_rice, barndorff_nielsen };

MethodResult cdf_spa(const ReducedForm& red, double q, SpaVariant variant = SpaVariant::lugannani_rice,
                     Tail tail = Tail::lower);

// |t0| below which the mean-point limit is used (linear blend up to twice it)
double spa_switch(const ReducedForm& red);

}  // namespace quadform
