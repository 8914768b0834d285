#include "sinhp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sinhp {

namespace {

constexpr double kNodeCountLimit = 1e6;
constexpr double kEdgeClip = 1e-4;  // patches never reach closer to +-1 than this

// graded map [0,1] -> [0,1], clustering at both ends with exponent q
double graded01(double s, double q) {
  const double u = std::pow(s, q);
  const double v = std::pow(1.0 - s, q);
  return u / (u + v);
}

// Base nodes, bitwise symmetric about 0: positive nodes are computed from the
// upper half of the parameter range and mirrored by exact negation.
std::vector<double> base_nodes(int base_n, double q) {
  std::vector<double> out;
  out.reserve(base_n);
  std::vector<double> pos;
  for (int j = 1; j < base_n; ++j) {
    if (2 * j > base_n) pos.push_back(-1.0 + 2.0 * graded01(double(j) / base_n, q));
  }
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) out.push_back(-*it);
  if (base_n % 2 == 0) out.push_back(0.0);
  for (double x : pos) out.push_back(x);
  return out;
}

// Uniform spacing delta/8 across the window |u| <= 20 delta, then a
// geometric transition out to the target base spacing.  An abrupt jump at
// the window edge would concentrate the trapezoid error exactly where the
// bubble tail is still steep.
std::vector<double> patch_offsets(double delta, double base_spacing) {
  const double h = delta / kPatchSpacingFactor;
  const int m = static_cast<int>(std::lround(kPatchHalfWidthFactor * kPatchSpacingFactor));
  std::vector<double> pos;
  pos.reserve(m + 32);
  for (int i = 1; i <= m; ++i) pos.push_back(i * h);
  double step = h;
  double edge = pos.back();
  while (step < base_spacing && edge < 1.0) {
    step *= 1.35;
    edge += step;
    pos.push_back(edge);
  }
  std::vector<double> off;
  off.reserve(2 * pos.size() + 1);
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) off.push_back(-*it);
  off.push_back(0.0);
  for (double x : pos) off.push_back(x);
  return off;
}

struct Window {
  double lo, hi, spacing;
};

Mesh finalize(std::vector<double> base, std::vector<double> patch,
              const std::vector<Window>& windows, const Configuration& cfg,
              const std::vector<double>& deltas, double grading) {
  // drop base nodes that fall inside a patch window in which the patch grid is
  // finer than the local base spacing (the endpoint clusters stay)
  std::vector<double> kept;
  kept.reserve(base.size() + patch.size());
  for (std::size_t j = 0; j < base.size(); ++j) {
    double local = 0.0;
    if (j > 0) local = std::max(local, base[j] - base[j - 1]);
    if (j + 1 < base.size()) local = std::max(local, base[j + 1] - base[j]);
    bool drop = false;
    for (const auto& w : windows)
      if (base[j] > w.lo && base[j] < w.hi && local > w.spacing) drop = true;
    if (!drop) kept.push_back(base[j]);
  }
  kept.insert(kept.end(), patch.begin(), patch.end());
  std::sort(kept.begin(), kept.end());

  // merge near-coincident nodes (overlapping patches); cluster means preserve
  // mirror symmetry exactly
  double merge_tol = 1e-13;
  for (const auto& w : windows) merge_tol = std::max(merge_tol, 0.05 * w.spacing);
  std::vector<double> nodes;
  nodes.reserve(kept.size());
  for (std::size_t j = 0; j < kept.size();) {
    std::size_t e = j + 1;
    double sum = kept[j];
    while (e < kept.size() && kept[e] - kept[e - 1] < merge_tol) sum += kept[e++];
    nodes.push_back(sum / double(e - j));
    j = e;
  }

  Mesh mesh;
  mesh.grading = grading;
  mesh.nodes = Eigen::Map<Eigen::VectorXd>(nodes.data(), nodes.size());
  const int n = mesh.size();
  if (n < 2) throw std::runtime_error("build_mesh: degenerate node set");
  mesh.weights.resize(n);
  for (int j = 0; j < n; ++j) {
    double w = 0.0;
    w += (j == 0) ? (nodes[0] + 1.0) : 0.5 * (nodes[j] - nodes[j - 1]);
    w += (j == n - 1) ? (1.0 - nodes[n - 1]) : 0.5 * (nodes[j + 1] - nodes[j]);
    mesh.weights[j] = w;
  }
  mesh.patch_centers = cfg.xis;
  mesh.patch_deltas = deltas;
  return mesh;
}

}  // namespace

Mesh build_mesh(int base_n, double grading) {
  if (base_n < 64) throw std::invalid_argument("build_mesh: base_n must be at least 64");
  Configuration empty;
  return finalize(base_nodes(base_n, grading), {}, {}, empty, {}, grading);
}

Mesh build_mesh(const Configuration& cfg, double lambda, int base_n, double grading) {
  if (base_n < 64) throw std::invalid_argument("build_mesh: base_n must be at least 64");
  if (cfg.k() == 0) return build_mesh(base_n, grading);
  cfg.validate();
  const std::vector<double> deltas = delta_choice(cfg, lambda);

  // resolving scale delta_i/8 across the unit interval must stay below the
  // node limit, otherwise lambda is below desk scale
  for (double d : deltas)
    if (2.0 / (d / kPatchSpacingFactor) > kNodeCountLimit)
      throw std::invalid_argument(
          "build_mesh: configuration demands too many nodes (lambda too small)");

  std::vector<Window> windows;
  for (int i = 0; i < cfg.k(); ++i)
    windows.push_back({std::max(cfg.xis[i] - kPatchHalfWidthFactor * deltas[i], -1.0 + kEdgeClip),
                       std::min(cfg.xis[i] + kPatchHalfWidthFactor * deltas[i], 1.0 - kEdgeClip),
                       deltas[i] / kPatchSpacingFactor});

  const double base_spacing = 2.0 * grading / base_n;
  std::vector<double> patch;
  const bool symmetric = cfg.mirror_symmetric();
  if (symmetric) {
    // build the patches of the nonnegative centers, mirror the rest exactly
    std::vector<double> pos;
    for (int i = 0; i < cfg.k(); ++i) {
      if (cfg.xis[i] < 0.0) continue;
      for (double u : patch_offsets(deltas[i], base_spacing)) {
        const double x = cfg.xis[i] + u;
        if (std::abs(x) < 1.0 - kEdgeClip) pos.push_back(x);
      }
    }
    for (double x : pos) {
      patch.push_back(x);
      if (x != 0.0) patch.push_back(-x);
    }
  } else {
    for (int i = 0; i < cfg.k(); ++i)
      for (double u : patch_offsets(deltas[i], base_spacing)) {
        const double x = cfg.xis[i] + u;
        if (std::abs(x) < 1.0 - kEdgeClip) patch.push_back(x);
      }
  }

  Mesh mesh = finalize(base_nodes(base_n, grading), std::move(patch), windows, cfg, deltas, grading);
  if (mesh.size() > 40 * base_n)
    throw std::runtime_error("build_mesh: node budget exceeded");
  return mesh;
}

Mesh mesh_from_nodes(std::vector<double> nodes) {
  if (nodes.size() < 2) throw std::invalid_argument("mesh_from_nodes: need at least two nodes");
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (!(std::abs(nodes[j]) < 1.0))
      throw std::invalid_argument("mesh_from_nodes: nodes must lie in (-1,1)");
    if (j > 0 && !(nodes[j] > nodes[j - 1]))
      throw std::invalid_argument("mesh_from_nodes: nodes must be strictly increasing");
  }
  Mesh mesh;
  mesh.nodes = Eigen::Map<Eigen::VectorXd>(nodes.data(), nodes.size());
  const int n = mesh.size();
  mesh.weights.resize(n);
  for (int j = 0; j < n; ++j) {
    double w = 0.0;
    w += (j == 0) ? (nodes[0] + 1.0) : 0.5 * (nodes[j] - nodes[j - 1]);
    w += (j == n - 1) ? (1.0 - nodes[n - 1]) : 0.5 * (nodes[j + 1] - nodes[j]);
    mesh.weights[j] = w;
  }
  return mesh;
}

double mesh_interpolate(const Mesh& mesh, const Eigen::VectorXd& values, double x) {
  const int n = mesh.size();
  if (values.size() != n) throw std::invalid_argument("mesh_interpolate: size mismatch");
  if (x <= -1.0 || x >= 1.0) return 0.0;
  const double* beg = mesh.nodes.data();
  const double* end = beg + n;
  const double* it = std::upper_bound(beg, end, x);
  if (it == beg) {  // boundary ramp [-1, x_0]
    const double t = (x + 1.0) / (mesh.nodes[0] + 1.0);
    return t * values[0];
  }
  if (it == end) {  // boundary ramp [x_{N-1}, 1]
    const double t = (1.0 - x) / (1.0 - mesh.nodes[n - 1]);
    return t * values[n - 1];
  }
  const int j = static_cast<int>(it - beg);
  const double t = (x - mesh.nodes[j - 1]) / (mesh.nodes[j] - mesh.nodes[j - 1]);
  return (1.0 - t) * values[j - 1] + t * values[j];
}

double GridFunction::operator()(double x) const { return mesh_interpolate(mesh, values, x); }

double mesh_interval_integral(const Mesh& mesh, const Eigen::VectorXd& values, double a, double b) {
  const int n = mesh.size();
  if (values.size() != n) throw std::invalid_argument("mesh_interval_integral: size mismatch");
  a = std::max(a, -1.0);
  b = std::min(b, 1.0);
  if (!(b > a)) return 0.0;
  // breakpoints of the interpolant inside [a,b]
  std::vector<double> xs = {a};
  for (int j = 0; j < n; ++j)
    if (mesh.nodes[j] > a && mesh.nodes[j] < b) xs.push_back(mesh.nodes[j]);
  xs.push_back(b);
  double acc = 0.0;
  for (std::size_t m = 0; m + 1 < xs.size(); ++m) {
    const double va = mesh_interpolate(mesh, values, xs[m]);
    const double vb = mesh_interpolate(mesh, values, xs[m + 1]);
    acc += 0.5 * (va + vb) * (xs[m + 1] - xs[m]);
  }
  return acc;
}

double mesh_lp_norm(const Mesh& mesh, const Eigen::VectorXd& values, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("mesh_lp_norm: p must be >= 1");
  double acc = 0.0;
  for (int j = 0; j < mesh.size(); ++j) acc += mesh.weights[j] * std::pow(std::abs(values[j]), p);
  return std::pow(acc, 1.0 / p);
}

}  // namespace sinhp
