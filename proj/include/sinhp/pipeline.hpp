#pragma once

#include "sinhp/reduced_energy.hpp"
#include "sinhp/solver.hpp"
#include "sinhp/verify.hpp"

namespace sinhp {

// Snap a configuration that is mirror-symmetric up to optimizer tolerance
// onto its exact mirror image, so the mesh builder can produce a bitwise
// symmetric node set.
Configuration symmetrize_if_near(Configuration cfg, double tol = 1e-8);

// Fill the diagnostic fields of a solve report: nodal count, peak data,
// energies of the solution and of the ansatz, remainder norms, and (when
// requested) the smallest singular values of the linearization.
void enrich_report(SolveReport& rep, const KernelOperator& op, bool with_sigma);

struct SweepOptions {
  double lambda_start = 0.2;
  double lambda_end = 0.0125;
  double factor = 0.5;
  int base_n = 256;
  double tol = 1e-10;
  bool with_sigma = true;
};

// Continuation plus per-step enrichment.
ContinuationResult run_sweep(const Configuration& cfg, const SweepOptions& opts);

// Single solve at one lambda, enriched.
SolveReport run_solve(const Configuration& cfg, double lambda, int base_n, double tol,
                      bool with_sigma = true);

}  // namespace sinhp
