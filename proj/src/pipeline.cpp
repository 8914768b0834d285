#include "sinhp/pipeline.hpp"

#include <cmath>

namespace sinhp {

Configuration symmetrize_if_near(Configuration cfg, double tol) {
  const int k = cfg.k();
  double asym = 0.0;
  for (int i = 0; i < k; ++i) asym = std::max(asym, std::abs(cfg.xis[i] + cfg.xis[k - 1 - i]));
  if (asym < tol && asym > 0.0) {
    for (int i = 0; 2 * i < k; ++i) {
      const double m = 0.5 * (cfg.xis[i] - cfg.xis[k - 1 - i]);
      cfg.xis[i] = m;
      cfg.xis[k - 1 - i] = -m;
    }
    if (k % 2 == 1) cfg.xis[k / 2] = 0.0;
  }
  return cfg;
}

void enrich_report(SolveReport& rep, const KernelOperator& op, bool with_sigma) {
  const Configuration& cfg = rep.config;
  const double lambda = rep.lambda;
  const AnsatzSpec spec{cfg, lambda, rep.deltas};
  const Mesh& mesh = op.mesh;

  Eigen::VectorXd w(mesh.size()), density(mesh.size());
  for (int j = 0; j < mesh.size(); ++j) {
    w[j] = ansatz_value(spec, mesh.nodes[j]);
    density[j] = ansatz_density(spec, mesh.nodes[j]);
  }
  const EnergyBreakdown ansatz_eb = energy_from_density(op, density, lambda);
  rep.ansatz_norm_sq = ansatz_eb.norm_sq;
  rep.ansatz_energy = ansatz_eb.value;

  const Eigen::VectorXd solution_density = nonlinearity(rep.solution.values, lambda);
  rep.norm_sq = op.pairing(solution_density, rep.solution.values);
  rep.energy = energy(op, rep.solution, lambda);

  const NodalReport nodal = count_nodal_regions(rep.solution, cfg, lambda);
  rep.nodal_count = nodal.nodal_count;
  rep.nodal_certified = nodal.certified;
  rep.zeros = nodal.zero_locations;
  if (static_cast<int>(nodal.zero_locations.size()) == cfg.k() - 1) {
    const PeakReport peaks = peak_diagnostics(rep.solution, cfg, lambda, nodal);
    rep.peaks = peaks.peaks;
  }

  // remainder against the ansatz anchored at the measured peak locations
  // (the lambda-dependent centers of the construction); falls back to the
  // configured centers when peak extraction failed
  Eigen::VectorXd anchored = w;
  if (static_cast<int>(rep.peaks.size()) == cfg.k()) {
    Configuration moved = cfg;
    bool ordered = true;
    for (int i = 0; i < cfg.k(); ++i) {
      moved.xis[i] = rep.peaks[i].location;
      if (i > 0 && !(moved.xis[i] > moved.xis[i - 1])) ordered = false;
    }
    if (ordered) {
      const AnsatzSpec moved_spec = make_ansatz(moved, lambda);
      for (int j = 0; j < mesh.size(); ++j) anchored[j] = ansatz_value(moved_spec, mesh.nodes[j]);
    }
  }
  const Eigen::VectorXd remainder = rep.solution.values - anchored;
  rep.remainder_sup = remainder.cwiseAbs().maxCoeff();
  rep.remainder_l2 = std::sqrt(remainder.cwiseAbs2().dot(mesh.weights));

  if (with_sigma) {
    const SingularPair sig = linearized_smallest_singulars(op, rep.solution, lambda, cfg);
    rep.sigma_full = sig.sigma_full;
    rep.sigma_perp = sig.sigma_perp;
  }
}

ContinuationResult run_sweep(const Configuration& cfg, const SweepOptions& opts) {
  NewtonOptions nopts;
  nopts.tol = opts.tol;
  ContinuationResult result =
      continuation(cfg, opts.lambda_start, opts.lambda_end, opts.factor, opts.base_n, nopts);
  for (SolveReport& rep : result.reports) {
    const KernelOperator op = assemble_inverse(rep.solution.mesh);
    enrich_report(rep, op, opts.with_sigma);
  }
  return result;
}

SolveReport run_solve(const Configuration& cfg, double lambda, int base_n, double tol,
                      bool with_sigma) {
  const Mesh mesh = build_mesh(cfg, lambda, base_n);
  const KernelOperator op = assemble_inverse(mesh);
  const AnsatzSpec spec = make_ansatz(cfg, lambda);
  Eigen::VectorXd u0(mesh.size());
  for (int j = 0; j < mesh.size(); ++j) u0[j] = ansatz_value(spec, mesh.nodes[j]);
  NewtonOptions nopts;
  nopts.tol = tol;
  SolveReport rep = newton_solve(op, u0, lambda, nopts);
  rep.config = cfg;
  rep.deltas = spec.deltas;
  enrich_report(rep, op, with_sigma);
  return rep;
}

}  // namespace sinhp
