#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sinhp/bubbles.hpp"

namespace sinhp {

// Graded node/weight set on (-1,1).  Endpoint clustering with exponent
// `grading` resolves the sqrt(1-|x|) boundary behavior; around each peak
// center a uniform refinement patch of spacing delta_i/8 covers a window of
// half-width 20 delta_i.  Weights are the trapezoid rule on the nodes, with
// the two boundary segments [-1,x_0] and [x_{N-1},1] folded into the extreme
// weights.
struct Mesh {
  Eigen::VectorXd nodes;    // strictly increasing, all in (-1,1)
  Eigen::VectorXd weights;  // positive, sum == 2
  std::vector<double> patch_centers;
  std::vector<double> patch_deltas;
  double grading = 3.0;

  int size() const { return static_cast<int>(nodes.size()); }
};

inline constexpr double kPatchHalfWidthFactor = 20.0;  // window half-width / delta
inline constexpr double kPatchSpacingFactor = 8.0;     // delta / spacing
inline constexpr double kDefaultGrading = 3.0;

// Pure endpoint-graded mesh (the k = 0 degenerate configuration).
Mesh build_mesh(int base_n, double grading = kDefaultGrading);

// Graded mesh with one refinement patch per peak of the configuration; the
// patch scales come from delta_choice(cfg, lambda).  Mirror-symmetric
// configurations produce bitwise mirror-symmetric node sets.
Mesh build_mesh(const Configuration& cfg, double lambda, int base_n,
                double grading = kDefaultGrading);

// Mesh over an externally supplied node set (e.g. a profile read back from
// disk); weights are the same trapezoid rule with boundary folding.
Mesh mesh_from_nodes(std::vector<double> nodes);

// Real samples on a Mesh with the convention "== 0 outside I": the
// piecewise-linear interpolant ramps to 0 at x = -1 and x = +1.
struct GridFunction {
  Mesh mesh;
  Eigen::VectorXd values;

  double operator()(double x) const;
  double sup_norm() const { return values.cwiseAbs().maxCoeff(); }
};

// Piecewise-linear interpolation of node values with the X_0 boundary ramp;
// 0 outside [-1,1].
double mesh_interpolate(const Mesh& mesh, const Eigen::VectorXd& values, double x);

// Integral of the piecewise-linear interpolant (with the boundary ramp) over
// [a,b] intersected with [-1,1].
double mesh_interval_integral(const Mesh& mesh, const Eigen::VectorXd& values, double a, double b);

// Discrete L^p(I) norm, (sum_j w_j |v_j|^p)^(1/p).
double mesh_lp_norm(const Mesh& mesh, const Eigen::VectorXd& values, double p);

}  // namespace sinhp
