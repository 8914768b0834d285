#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sinhp/green_kernel.hpp"

// The explicit bubble family U_{delta,xi} = log(2 delta / (delta^2 + (x-xi)^2)),
// the bounded solutions Z0, Z1 of its linearization, the closed-form expansions
// of their projections onto the space of functions vanishing outside I, the
// per-peak interaction energies F_i, the concentration-parameter rule
// delta_i = (lambda/2) exp(F_i), and the multi-peak ansatz assembled from all
// of the above.  Pure functions over immutable parameter records.

namespace sinhp {

struct BubbleParams {
  double delta;  // scale > 0
  double xi;     // center in (-1,1) whenever projections are involved
};

// Ordered peak centers with their signs.  Membership in the admissible set
// means: strictly increasing, interior with margin eta, gaps above eta.
struct Configuration {
  std::vector<double> xis;
  std::vector<int> signs;  // entries in {-1, +1}
  double eta = 0.0;        // declared separation margin (0 = only strictness)

  int k() const { return static_cast<int>(xis.size()); }

  // a_i = (-1)^(i-1), the sign pattern of the main construction
  static Configuration alternating(std::vector<double> xis_, double eta_ = 0.0) {
    Configuration c;
    c.xis = std::move(xis_);
    c.signs.resize(c.xis.size());
    for (std::size_t i = 0; i < c.signs.size(); ++i) c.signs[i] = (i % 2 == 0) ? 1 : -1;
    c.eta = eta_;
    return c;
  }

  // smallest of 1+xi_1, 1-xi_k and the interior gaps
  double margin() const {
    if (xis.empty()) return 2.0;
    double m = std::min(1.0 + xis.front(), 1.0 - xis.back());
    for (std::size_t i = 0; i + 1 < xis.size(); ++i) m = std::min(m, xis[i + 1] - xis[i]);
    return m;
  }

  bool alternating_signs() const {
    for (std::size_t i = 0; i + 1 < signs.size(); ++i)
      if (signs[i] == signs[i + 1]) return false;
    return true;
  }

  // exact mirror symmetry xi_i == -xi_{k+1-i} with matching signs; the mesh
  // builder uses this to produce bitwise-symmetric node sets
  bool mirror_symmetric() const {
    const int n = k();
    for (int i = 0; i < n; ++i)
      if (xis[i] != -xis[n - 1 - i]) return false;
    return true;
  }

  void validate() const {
    if (xis.size() != signs.size())
      throw std::invalid_argument("Configuration: xis/signs size mismatch");
    for (int s : signs)
      if (s != 1 && s != -1) throw std::invalid_argument("Configuration: signs must be +-1");
    for (std::size_t i = 0; i < xis.size(); ++i) {
      if (!(std::abs(xis[i]) < 1.0))
        throw std::invalid_argument("Configuration: centers must lie in (-1,1)");
      if (i > 0 && !(xis[i] > xis[i - 1]))
        throw std::invalid_argument("Configuration: centers must be strictly increasing");
    }
    if (!(margin() > eta))
      throw std::invalid_argument("Configuration: separation margin below eta");
  }
};

struct AnsatzSpec {
  Configuration config;
  double lambda = 0.0;
  std::vector<double> deltas;  // populated by delta_choice
};

template <class Scalar>
Scalar bubble(Scalar delta, Scalar xi, Scalar x) {
  if (!(delta > Scalar(0))) throw std::invalid_argument("bubble: delta must be positive");
  const Scalar t = x - xi;
  return std::log(Scalar(2) * delta / (delta * delta + t * t));
}

inline double bubble(const BubbleParams& p, double x) { return bubble(p.delta, p.xi, x); }

// e^{U_{delta,xi}} without going through the log
template <class Scalar>
Scalar bubble_density(Scalar delta, Scalar xi, Scalar x) {
  if (!(delta > Scalar(0))) throw std::invalid_argument("bubble_density: delta must be positive");
  const Scalar t = x - xi;
  return Scalar(2) * delta / (delta * delta + t * t);
}

// Z0 = (delta^2 - t^2)/(delta^2 + t^2),  Z1 = 2 delta t/(delta^2 + t^2),
// the bounded solutions of the linearized bubble equation
template <class Scalar>
Scalar bubble_z(Scalar delta, Scalar xi, int index, Scalar x) {
  if (!(delta > Scalar(0))) throw std::invalid_argument("bubble_z: delta must be positive");
  if (index != 0 && index != 1) throw std::invalid_argument("bubble_z: index must be 0 or 1");
  const Scalar t = x - xi;
  const Scalar q = delta * delta + t * t;
  return index == 0 ? (delta * delta - t * t) / q : Scalar(2) * delta * t / q;
}

inline double bubble_z(const BubbleParams& p, int index, double x) {
  return bubble_z(p.delta, p.xi, index, x);
}

namespace detail {
inline void require_projection_regime(double delta, double xi, const char* who) {
  if (!(delta > 0.0)) throw std::invalid_argument(std::string(who) + ": delta must be positive");
  if (!(delta < 1.0))
    throw std::invalid_argument(std::string(who) + ": expansion requires delta < 1");
  if (!(std::abs(xi) < 1.0))
    throw std::invalid_argument(std::string(who) + ": center must lie in (-1,1)");
}
}  // namespace detail

// Closed-form expansion of the projected bubble,
//   PU = U - log(2 delta) + 2 pi H(xi, .),
// exact up to O(delta^2) uniformly on I; identically 0 outside I.
inline double proj_bubble(double delta, double xi, double x) {
  detail::require_projection_regime(delta, xi, "proj_bubble");
  if (std::abs(x) >= 1.0) return 0.0;
  return bubble(delta, xi, x) - std::log(2.0 * delta) + 2.0 * pi * robin(xi, x);
}

inline double proj_bubble(const BubbleParams& p, double x) { return proj_bubble(p.delta, p.xi, x); }

// Closed-form expansion of the projected translation mode,
//   PZ1 = Z1 + 2 pi delta dH/dxi(xi, .),
// with O(delta^3) error; identically 0 outside I.  The 2 pi factor is the
// one that cancels the O(delta) exterior tail of Z1 (order confirmed by the
// quadrature oracle in the test suite).
inline double proj_z1(double delta, double xi, double x) {
  detail::require_projection_regime(delta, xi, "proj_z1");
  if (std::abs(x) >= 1.0) return 0.0;
  return bubble_z(delta, xi, 1, x) + 2.0 * pi * delta * robin_dxi(xi, x);
}

inline double proj_z1(const BubbleParams& p, double x) { return proj_z1(p.delta, p.xi, x); }

// F_i = 2 pi H(xi_i, xi_i) + 2 pi a_i sum_{j != i} a_j G(xi_j, xi_i)
inline double interaction_energy(const Configuration& cfg, int i) {
  cfg.validate();
  if (i < 0 || i >= cfg.k()) throw std::out_of_range("interaction_energy: index out of range");
  double f = 2.0 * pi * robin(cfg.xis[i], cfg.xis[i]);
  for (int j = 0; j < cfg.k(); ++j) {
    if (j == i) continue;
    f += 2.0 * pi * cfg.signs[i] * cfg.signs[j] * green(cfg.xis[j], cfg.xis[i]);
  }
  return f;
}

// delta_i = (lambda/2) exp(F_i); the choice that cancels the leading residual
inline std::vector<double> delta_choice(const Configuration& cfg, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("delta_choice: lambda must be positive");
  std::vector<double> d(cfg.k());
  for (int i = 0; i < cfg.k(); ++i) d[i] = 0.5 * lambda * std::exp(interaction_energy(cfg, i));
  return d;
}

inline AnsatzSpec make_ansatz(const Configuration& cfg, double lambda) {
  return {cfg, lambda, delta_choice(cfg, lambda)};
}

// omega = sum_i a_i PU_{delta_i, xi_i}; vanishes outside I
inline double ansatz_value(const AnsatzSpec& spec, double x) {
  if (spec.deltas.size() != spec.config.xis.size())
    throw std::invalid_argument("ansatz_value: deltas not populated (call make_ansatz)");
  double u = 0.0;
  for (int i = 0; i < spec.config.k(); ++i)
    u += spec.config.signs[i] * proj_bubble(spec.deltas[i], spec.config.xis[i], x);
  return u;
}

// sum_i a_i e^{U_i}: the density whose inverse image under the half Laplacian
// is the ansatz (its exact forward image, used by the residual identities)
inline double ansatz_density(const AnsatzSpec& spec, double x) {
  if (spec.deltas.size() != spec.config.xis.size())
    throw std::invalid_argument("ansatz_density: deltas not populated (call make_ansatz)");
  double f = 0.0;
  for (int i = 0; i < spec.config.k(); ++i)
    f += spec.config.signs[i] * bubble_density(spec.deltas[i], spec.config.xis[i], x);
  return f;
}

// a_i u(xi_i) to leading order: 2 log(2/lambda) - F_i
inline double predicted_peak_height(const Configuration& cfg, double lambda, int i) {
  return 2.0 * std::log(2.0 / lambda) - interaction_energy(cfg, i);
}

}  // namespace sinhp
