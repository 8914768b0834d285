#pragma once

#include <Eigen/Dense>

#include "sinhp/mesh.hpp"

namespace sinhp {

// Dense Nystrom realization of f |-> int_I G(., y) f(y) dy, the inverse of
// the half Laplacian with exterior Dirichlet condition.  The kernel is split
// as G = -(1/pi) log|x-y| + H(x,y): the log part is integrated exactly
// against the piecewise-linear interpolant of f (closed-form hat-function
// moments), the smooth part by the mesh weights.  On the two boundary
// segments the interpolant is extended as a constant.
struct KernelOperator {
  Mesh mesh;
  Eigen::MatrixXd matrix;  // N x N, maps node values of f to node values of Kf

  Eigen::VectorXd apply(const Eigen::VectorXd& f) const { return matrix * f; }

  // discrete energy pairing <Kf, Kg> = sum_j w_j f_j (Kg)_j
  double pairing(const Eigen::VectorXd& f, const Eigen::VectorXd& kg) const {
    return f.dot(mesh.weights.cwiseProduct(kg));
  }
};

KernelOperator assemble_inverse(const Mesh& mesh);

// max_ij |w_i K_ij - w_j K_ji| / max_ij |w_i K_ij|; Green reciprocity makes
// the weighted matrix symmetric up to quadrature error
double symmetry_defect(const KernelOperator& op);

}  // namespace sinhp
