#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "sinhp/kernel_operator.hpp"

namespace sinhp {

// f_lambda(t) = lambda (e^t - e^-t) = 2 lambda sinh t, and its derivative
// 2 lambda cosh t.  Entries with |t| > 700 trip the overflow guard.
Eigen::VectorXd nonlinearity(const Eigen::VectorXd& u, double lambda);
Eigen::VectorXd nonlinearity_prime(const Eigen::VectorXd& u, double lambda);

// u - K f_lambda(u): zero at a discrete solution
Eigen::VectorXd residual(const KernelOperator& op, const GridFunction& u, double lambda);
Eigen::VectorXd residual(const KernelOperator& op, const Eigen::VectorXd& u, double lambda);

// Discrete L^p(I) norm of E = f_lambda(omega) - sum_i a_i e^{U_i}; the second
// term is the exact forward image of the ansatz, so no discrete fractional
// derivative is involved.  Requires p > 1.
double ansatz_error_norm(const Mesh& mesh, const AnsatzSpec& spec, double p);

struct NonConvergence : std::runtime_error {
  NonConvergence(std::string msg, std::vector<double> hist)
      : std::runtime_error(std::move(msg)), residual_history(std::move(hist)) {}
  std::vector<double> residual_history;
};

struct SingularJacobian : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NewtonOptions {
  double tol = 1e-10;   // sup-norm residual target
  int max_iter = 50;
  double min_step = std::pow(0.5, 20);  // line-search floor
};

struct PeakInfo {
  double xi = 0.0;        // configured center
  double location = 0.0;  // measured extremum of a_i u in the peak zone
  double height = 0.0;    // a_i u at the extremum
  double mass = 0.0;      // int over the zone of lambda (e^u - e^-u), signed
  int sign = 1;
};

struct SolveReport {
  double lambda = 0.0;
  GridFunction solution;
  int newton_iters = 0;
  double residual_sup = 0.0;
  Configuration config;
  std::vector<double> deltas;

  // diagnostics, filled by the pipeline
  int nodal_count = -1;
  bool nodal_certified = false;
  std::vector<double> zeros;
  std::vector<PeakInfo> peaks;
  double energy = std::numeric_limits<double>::quiet_NaN();
  double norm_sq = std::numeric_limits<double>::quiet_NaN();
  double ansatz_norm_sq = std::numeric_limits<double>::quiet_NaN();
  double ansatz_energy = std::numeric_limits<double>::quiet_NaN();
  double remainder_sup = std::numeric_limits<double>::quiet_NaN();
  double remainder_l2 = std::numeric_limits<double>::quiet_NaN();
  double sigma_full = std::numeric_limits<double>::quiet_NaN();
  double sigma_perp = std::numeric_limits<double>::quiet_NaN();
};

// Damped Newton on F(u) = u - K f_lambda(u) with Jacobian
// I - K diag(f_lambda'(u)); backtracking line search on the weighted-L2
// residual with a Levenberg-Marquardt fallback, convergence measured in the
// sup norm.
SolveReport newton_solve(const KernelOperator& op, const Eigen::VectorXd& u0, double lambda,
                         const NewtonOptions& opts = {});

// Numerical realization of the finite-dimensional reduction: an inner
// bordered Newton finds (u, c) with u - K f_lambda(u) = sum c_i PZ_{1,i} and
// u - omega orthogonal to the translation modes (uniformly well conditioned
// even when plain Newton is not), and an outer root-find moves the anchor
// centers until every multiplier c_i vanishes, i.e. u solves the full
// equation.  Used by continuation when plain Newton stalls at small lambda.
SolveReport reduced_newton_solve(const KernelOperator& op, const Eigen::VectorXd& u0,
                                 double lambda, const NewtonOptions& opts,
                                 const Configuration& anchor);

struct ContinuationResult {
  std::vector<SolveReport> reports;
  bool completed = false;        // reached lambda_end
  std::string failure;           // nonempty when stopped early
};

// Geometric lambda schedule from lambda_start down to lambda_end; each step
// re-meshes and seeds Newton with the fresh ansatz blended 50/50 with the
// previous solution interpolated onto the new mesh.  Stops early (reporting
// what converged) on NonConvergence.
ContinuationResult continuation(const Configuration& cfg, double lambda_start, double lambda_end,
                                double factor, int base_n, const NewtonOptions& opts = {});

struct EnergyBreakdown {
  double norm_sq;  // ||u||^2 as the duality pairing int f (Kf)
  double value;    // J_lambda = norm_sq/2 - int g_lambda(u)
};

// Energy of u = K(density): the norm is the duality pairing against the
// density, never a forward fractional derivative.  For solutions the density
// is f_lambda(u); for the ansatz it is sum_i a_i e^{U_i}.
EnergyBreakdown energy_from_density(const KernelOperator& op, const Eigen::VectorXd& density,
                                    double lambda);

// J_lambda(u) for a solution-like u (density f_lambda(u)); rejects non-finite
double energy(const KernelOperator& op, const GridFunction& u, double lambda);

struct SingularPair {
  double sigma_full;  // smallest singular value of I - K diag(f') in the energy metric
  double sigma_perp;  // same, restricted to the complement of span{PZ_{1,j}}
};

// Smallest singular values of the discrete linearization at u, measured in
// the discrete energy norm ||phi||^2 = phi^T B phi with B the symmetrized
// W K^{-1}; the deflated value restricts the domain to the B-orthogonal
// complement of the discrete projections K(e^{U_j} Z_{1,j}).
SingularPair linearized_smallest_singulars(const KernelOperator& op, const GridFunction& u,
                                           double lambda, const Configuration& cfg);

}  // namespace sinhp
