#pragma once

#include <stdexcept>
#include <vector>

#include "sinhp/solver.hpp"

namespace sinhp {

// Post-solve diagnostics: certified nodal counts via the three-zone split,
// peak locations/heights/masses, sup-distance to the Green limit profile,
// and the monotonicity constant of the limit profile.

struct ZeroBracket {
  double lo, hi;
};

struct NodalReport {
  std::vector<double> zero_locations;  // strictly ordered
  std::vector<ZeroBracket> brackets;   // per-zero bracketing interval
  int nodal_count = 0;                 // zero count + 1
  bool certified = false;              // three-zone certification succeeded
  double eps_used = 0.0;
};

struct AmbiguousZero : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingPeak : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PeakReport {
  std::vector<PeakInfo> peaks;
  std::vector<double> zone_edges;  // k+1 edges tiling I, from the nodal split
};

// Three-zone nodal count: no zeros in the outer zone (|u| >= (pi/sqrt2) c_out
// sqrt(d) with c_out the measured outer monotonicity constant, i.e. half the
// sqrt(2d) bound of the limit profile), none in the peak windows (a_i u >= 1),
// exactly one bisected sign change per between-peak zone.  The window
// half-width eps starts at half the minimal gap and is halved while any zone
// fails; if no eps certifies, falls back to raw sign-change counting with
// certified = false.
NodalReport count_nodal_regions(const GridFunction& u, const Configuration& cfg, double lambda,
                                double eps = -1.0);

// Per peak: extremum of a_i u in the peak's nodal zone, height against the
// 2 log(2/lambda) - F_i prediction, and the signed mass of lambda(e^u - e^-u)
// over the zone (zones tile I, so masses add up to the total).
PeakReport peak_diagnostics(const GridFunction& u, const Configuration& cfg, double lambda,
                            const NodalReport& nodal);

struct ProfileDeviation {
  double sup;                 // away from peak windows, |u - 2 pi sum a_i G|
  double weighted_outer_sup;  // outer intervals, |u - limit| / sqrt(1-|x|)
};

ProfileDeviation profile_convergence(const GridFunction& u, const Configuration& cfg,
                                     double lambda, double eps);

// min over j and sampled x in (xi_j, xi_{j+1}) of (-1)^j u0'(x) sqrt(1-x^2),
// where u0 = sum (-1)^{i-1} G_{xi_i}; positive for alternating signs.
double limit_profile_monotonicity(const Configuration& cfg, int samples_per_interval = 4000);

// 2 pi sum_i a_i G(xi_i, x), the limit profile of the solutions
double limit_profile(const Configuration& cfg, double x);

}  // namespace sinhp
