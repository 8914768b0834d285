#include "sinhp/kernel_operator.hpp"

#include <cmath>
#include <stdexcept>

#include "sinhp/green_kernel.hpp"

namespace sinhp {

namespace {

// primitives of log|t| and t log|t|; both vanish at t = 0
inline double moment0(double t) { return t == 0.0 ? 0.0 : t * std::log(std::abs(t)) - t; }
inline double moment1(double t) {
  return t == 0.0 ? 0.0 : 0.5 * t * t * std::log(std::abs(t)) - 0.25 * t * t;
}

}  // namespace

KernelOperator assemble_inverse(const Mesh& mesh) {
  const int n = mesh.size();
  KernelOperator op;
  op.mesh = mesh;
  op.matrix.setZero(n, n);
  const Eigen::VectorXd& x = mesh.nodes;

  for (int i = 0; i < n; ++i) {
    const double xi = x[i];
    auto row = op.matrix.row(i);

    // -(1/pi) log|x_i - y| against the interpolant, segment by segment.
    // Interior segment [x_j, x_{j+1}] carries the linear interpolant between
    // f_j and f_{j+1}; the boundary segments carry the constant extension.
    for (int j = -1; j < n; ++j) {
      const double c = (j < 0) ? -1.0 : x[j];
      const double d = (j + 1 < n) ? x[j + 1] : 1.0;
      const double i0 = moment0(d - xi) - moment0(c - xi);
      const double i1 = moment1(d - xi) - moment1(c - xi);
      const double len = d - c;
      if (j < 0) {
        row[0] += -(1.0 / pi) * i0;
      } else if (j + 1 == n) {
        row[n - 1] += -(1.0 / pi) * i0;
      } else {
        row[j] += -(1.0 / pi) * ((d - xi) * i0 - i1) / len;
        row[j + 1] += -(1.0 / pi) * (i1 - (c - xi) * i0) / len;
      }
    }

    for (int j = 0; j < n; ++j) row[j] += mesh.weights[j] * robin(xi, x[j]);
  }

  if (!op.matrix.allFinite())
    throw std::runtime_error("assemble_inverse: non-finite matrix entry (mesh bug)");
  return op;
}

double symmetry_defect(const KernelOperator& op) {
  const Eigen::MatrixXd wk = op.mesh.weights.asDiagonal() * op.matrix;
  return (wk - wk.transpose()).norm() / wk.norm();
}

}  // namespace sinhp
