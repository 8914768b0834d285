#pragma once

// Test-only reference quadrature: adaptive Gauss7/Kronrod15 with absolute
// tolerance budgeting, and a high-accuracy evaluator of the inverse operator
// int_I G(x,y) f(y) dy that handles the log singularity by subtraction, so
// expansion orders down to O(delta^3) can be measured against it.  This path
// stays independent of the Nystrom assembly it is used to certify.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "sinhp/green_kernel.hpp"

namespace refquad {

namespace detail {

// Kronrod-15 abscissae (positive half) and weights, Gauss-7 weights
inline constexpr double xgk[8] = {
    0.99145537112081263920685469752633, 0.94910791234275852452618968404785,
    0.86486442335976907278971278864093, 0.74153118559939443986386477328079,
    0.58608723546769113029414483825873, 0.40584515137739716690660641207696,
    0.20778495500789846760068940377324, 0.0};
inline constexpr double wgk[8] = {
    0.02293532201052922496373200805897, 0.06309209262997855329070066318921,
    0.10479001032225018383987632254152, 0.14065325971552591874518959051024,
    0.16900472663926790282658342659855, 0.19035057806478540991325640242101,
    0.20443294007529889241416199923465, 0.20948214108472782801299917489171};
inline constexpr double wg[4] = {
    0.12948496616886969327061143267908, 0.27970539148927666790146777142378,
    0.38183005050511894495036977548898, 0.41795918367346938775510204081633};

struct GK {
  double integral;
  double error;
};

template <class F>
GK gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double ik = 0.0, ig = 0.0;
  for (int i = 0; i < 8; ++i) {
    if (i == 7) {
      const double v = f(c);
      ik += wgk[7] * v;
      ig += wg[3] * v;
      break;
    }
    const double v1 = f(c - h * xgk[i]);
    const double v2 = f(c + h * xgk[i]);
    ik += wgk[i] * (v1 + v2);
    if (i % 2 == 1) ig += wg[i / 2] * (v1 + v2);
  }
  ik *= h;
  ig *= h;
  return {ik, std::abs(ik - ig)};
}

template <class F>
double adaptive(const F& f, double a, double b, double tol, int depth) {
  const GK est = gk15(f, a, b);
  if (est.error <= tol || depth >= 52 || (b - a) < 1e-15) return est.integral;
  const double c = 0.5 * (a + b);
  return adaptive(f, a, c, 0.5 * tol, depth + 1) + adaptive(f, c, b, 0.5 * tol, depth + 1);
}

}  // namespace detail

template <class F>
double integrate(const F& f, double a, double b, double tol = 1e-12,
                 std::vector<double> breakpoints = {}) {
  breakpoints.push_back(a);
  breakpoints.push_back(b);
  std::sort(breakpoints.begin(), breakpoints.end());
  double acc = 0.0;
  int segments = 0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
    if (breakpoints[i + 1] > breakpoints[i] && breakpoints[i] >= a && breakpoints[i + 1] <= b)
      ++segments;
  const double budget = tol / std::max(1, segments);
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double lo = breakpoints[i], hi = breakpoints[i + 1];
    if (!(hi > lo) || lo < a || hi > b) continue;
    acc += detail::adaptive(f, lo, hi, budget, 0);
  }
  return acc;
}

// int_{-1}^{1} log|x-y| dy in closed form
inline double log_moment(double x) {
  auto term = [](double t) { return t == 0.0 ? 0.0 : t * std::log(t); };
  return term(1.0 + x) + term(1.0 - x) - 2.0;
}

// Reference evaluation of (K f)(x) = int_I G(x,y) f(y) dy.  The log part is
// integrated as f(x) * closed-form moment plus the continuous remainder
// (f(y)-f(x)) log|x-y|; the smooth part H(x,y) f(y) goes straight to the
// adaptive rule.  `features` marks places needing pre-splits (peak centers).
inline double apply_green(const std::function<double(double)>& f, double x, double tol = 1e-12,
                          std::vector<double> features = {}) {
  std::vector<double> bp = {x};
  for (double c : features) {
    for (double s : {c - 1e-1, c - 1e-3, c, c + 1e-3, c + 1e-1})
      if (s > -1.0 && s < 1.0) bp.push_back(s);
  }
  const double fx = f(x);
  auto log_rest = [&](double y) {
    return y == x ? 0.0 : (f(y) - fx) * std::log(std::abs(x - y));
  };
  const double log_part = fx * log_moment(x) + integrate(log_rest, -1.0, 1.0, tol, bp);
  auto smooth = [&](double y) { return sinhp::robin(x, y) * f(y); };
  const double smooth_part = integrate(smooth, -1.0, 1.0, tol, bp);
  return smooth_part - log_part / sinhp::pi;
}

}  // namespace refquad
