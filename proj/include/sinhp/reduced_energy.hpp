#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sinhp/bubbles.hpp"

namespace sinhp {

// The configuration functional
//   F(xi) = sum_i H(xi_i, xi_i) + sum_{i != j} a_i a_j G(xi_i, xi_j),
// its analytic gradient, interior maximization over ordered configurations,
// and critical-point classification.

double reduced_value(const Configuration& cfg);
Eigen::VectorXd reduced_grad(const Configuration& cfg);

enum class CriticalKind { max, saddle, min, degenerate };

const char* to_string(CriticalKind kind);

struct EnergyReport {
  Configuration config;
  double value = 0.0;
  double grad_norm = 0.0;
  Eigen::VectorXd hessian_eigs;
  CriticalKind classification = CriticalKind::degenerate;
  int seeds_converged = 0;
  int seeds_diverged = 0;
  int seeds_inconclusive = 0;
};

struct NoCriticalPoint : std::runtime_error {
  NoCriticalPoint(std::string msg, int diverged, int tried)
      : std::runtime_error(std::move(msg)), n_diverged(diverged), n_tried(tried) {}
  int n_diverged;
  int n_tried;
};

// Multistart quasi-Newton ascent in unconstrained gap coordinates (ordering
// and interiority hold by construction; the functional's own boundary
// barrier keeps iterates interior).  Returns the best critical point found,
// classified through the finite-difference Hessian of the analytic gradient.
// Throws NoCriticalPoint when every seed's ascent diverges in value without
// the gradient vanishing.
EnergyReport maximize(int k, const std::vector<int>& signs, int seeds = 16, double tol = 1e-11,
                      std::uint64_t rng_seed = 1234);

inline EnergyReport maximize_alternating(int k, int seeds = 16, double tol = 1e-11,
                                         std::uint64_t rng_seed = 1234) {
  std::vector<int> signs(k);
  for (int i = 0; i < k; ++i) signs[i] = (i % 2 == 0) ? 1 : -1;
  return maximize(k, signs, seeds, tol, rng_seed);
}

struct BlowdownRow {
  std::string kind;  // "collision" or "endpoint"
  double distance;   // distance to the boundary of the configuration set
  double value;
};

// Evaluates F on configurations approaching the boundary: neighbor collision
// (for k >= 2) and endpoint collision, one row per probed margin.  Values
// must decrease without bound as the distance shrinks.
std::vector<BlowdownRow> boundary_blowdown_probe(int k, const std::vector<int>& signs,
                                                 const std::vector<double>& margins);

struct ConjectureSummary {
  int k = 0;
  std::vector<int> signs;
  int n_starts = 0;
  int n_converged = 0;
  int n_diverged = 0;
  int n_inconclusive = 0;
  std::vector<EnergyReport> clusters;  // distinct critical points found
};

// Clusters the critical points found across seeded multistarts (radius 1e-4
// in the max norm).  Evidence gathering only; the output is labeled
// non-authoritative by the callers that emit it.
ConjectureSummary conjecture_probe(int k, const std::vector<int>& signs, int n_starts,
                                   std::uint64_t rng_seed);

}  // namespace sinhp
