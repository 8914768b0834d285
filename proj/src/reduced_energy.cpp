#include "sinhp/reduced_energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace sinhp {

namespace {

constexpr double kDivergenceRise = 1e6;  // value gain that declares the ascent unbounded
constexpr double kClusterRadius = 1e-4;
constexpr int kMaxAscentIters = 600;

void check_ordered(const Configuration& cfg) {
  cfg.validate();
  for (std::size_t i = 0; i + 1 < cfg.xis.size(); ++i)
    if (!(cfg.xis[i + 1] > cfg.xis[i]))
      throw std::invalid_argument("reduced energy: configuration not strictly ordered");
}

// value that tolerates degenerate configurations by returning the signed
// limit (+inf when a same-sign pair collides, -inf at the boundary or when
// an opposite-sign pair collides) instead of throwing
double value_or_inf(const std::vector<double>& xis, const std::vector<int>& signs) {
  const int k = static_cast<int>(xis.size());
  const double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i)
    if (!(std::abs(xis[i]) < 1.0)) return -inf;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (xis[i] == xis[j]) return signs[i] * signs[j] > 0 ? inf : -inf;
  double f = 0.0;
  for (int i = 0; i < k; ++i) f += robin(xis[i], xis[i]);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      f += signs[i] * signs[j] * green(xis[i], xis[j]);
    }
  return f;
}

bool evaluable(const std::vector<double>& xis) {
  const int k = static_cast<int>(xis.size());
  for (int i = 0; i < k; ++i) {
    if (!(std::abs(xis[i]) < 1.0)) return false;
    for (int j = i + 1; j < k; ++j)
      if (xis[i] == xis[j]) return false;
  }
  return true;
}

Eigen::VectorXd grad_xi(const std::vector<double>& xis, const std::vector<int>& signs) {
  const int k = static_cast<int>(xis.size());
  Eigen::VectorXd g(k);
  for (int m = 0; m < k; ++m) {
    double gm = 2.0 * robin_dxi(xis[m], xis[m]);
    for (int j = 0; j < k; ++j) {
      if (j == m) continue;
      gm += 2.0 * signs[m] * signs[j] * green_dx(xis[j], xis[m]);
    }
    g[m] = gm;
  }
  return g;
}

// theta in R^{k+1} -> positive gaps summing to 2 -> ordered interior xi
std::vector<double> theta_to_xi(const Eigen::VectorXd& theta) {
  const int k = static_cast<int>(theta.size()) - 1;
  Eigen::VectorXd p = (theta.array() - theta.maxCoeff()).exp();
  p /= p.sum();
  std::vector<double> xis(k);
  double c = 0.0;
  for (int i = 0; i < k; ++i) {
    c += p[i];
    xis[i] = -1.0 + 2.0 * c;
  }
  return xis;
}

// d xi_i / d theta_m = 2 p_m ([m <= i] - C_i) with C_i the partial softmax sum
Eigen::VectorXd grad_theta(const Eigen::VectorXd& theta, const std::vector<int>& signs) {
  const int k = static_cast<int>(theta.size()) - 1;
  Eigen::VectorXd p = (theta.array() - theta.maxCoeff()).exp();
  p /= p.sum();
  const std::vector<double> xis = theta_to_xi(theta);
  const Eigen::VectorXd gxi = grad_xi(xis, signs);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(k + 1);
  double c = 0.0;
  for (int i = 0; i < k; ++i) {
    c += p[i];
    for (int m = 0; m <= k; ++m) g[m] += gxi[i] * 2.0 * p[m] * ((m <= i ? 1.0 : 0.0) - c);
  }
  return g;
}

struct AscentOutcome {
  enum class Status { critical, diverged, inconclusive } status;
  std::vector<double> xis;
  double value = 0.0;
  double grad_norm = 0.0;
};

// BFGS ascent of F in theta coordinates with an expanding/backtracking line
// search, then Newton polish on the analytic gradient in xi coordinates.
AscentOutcome ascend(Eigen::VectorXd theta, const std::vector<int>& signs, double tol) {
  const int dim = static_cast<int>(theta.size());
  auto phi = [&](const Eigen::VectorXd& t) { return -value_or_inf(theta_to_xi(t), signs); };

  AscentOutcome out;
  out.status = AscentOutcome::Status::inconclusive;
  out.xis = theta_to_xi(theta);
  if (!evaluable(out.xis)) return out;

  double f = phi(theta);
  const double f_start = f;
  Eigen::VectorXd g = -grad_theta(theta, signs);
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(dim, dim);

  auto declare_diverged = [&](const Eigen::VectorXd& t, double fval, double gn) {
    out.status = AscentOutcome::Status::diverged;
    out.xis = theta_to_xi(t);
    out.value = -fval;
    out.grad_norm = gn;
  };

  for (int it = 0; it < kMaxAscentIters; ++it) {
    if (f_start - f > kDivergenceRise && g.norm() > 1.0) {
      declare_diverged(theta, f, g.norm());
      return out;
    }
    if (g.norm() <= 1e-9) break;

    Eigen::VectorXd dir = -(h * g);
    if (dir.dot(g) >= 0.0) dir = -g;

    // backtrack from 1, then expand while the value keeps dropping
    double s = 1.0;
    double f_try = phi(theta + s * dir);
    int shrink = 0;
    while (!(f_try < f) && shrink < 60) {
      s *= 0.5;
      f_try = phi(theta + s * dir);
      ++shrink;
    }
    if (!(f_try < f)) {
      const bool was_steepest = dir.isApprox(Eigen::VectorXd(-g));
      h.setIdentity();  // retry from steepest descent once
      if (was_steepest) break;
      continue;
    }
    while (shrink == 0) {
      const double f_more = phi(theta + 2.0 * s * dir);
      if (!(f_more < f_try) || 2.0 * s > 1e6) break;
      s *= 2.0;
      f_try = f_more;
    }

    const Eigen::VectorXd theta_new = theta + s * dir;
    if (!std::isfinite(f_try) || !evaluable(theta_to_xi(theta_new))) {
      declare_diverged(theta_new, f_try, g.norm());
      return out;
    }
    const Eigen::VectorXd g_new = -grad_theta(theta_new, signs);
    const Eigen::VectorXd sk = theta_new - theta;
    const Eigen::VectorXd yk = g_new - g;
    const double sy = sk.dot(yk);
    if (sy > 1e-12 * sk.norm() * yk.norm()) {
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
      const Eigen::MatrixXd vmat = eye - sk * yk.transpose() / sy;
      h = vmat * h * vmat.transpose() + sk * sk.transpose() / sy;
    }
    theta = theta_new;
    f = f_try;
    g = g_new;
  }

  // Newton polish in xi space
  std::vector<double> xis = theta_to_xi(theta);
  if (!evaluable(xis)) {
    declare_diverged(theta, f, g.norm());
    return out;
  }
  const int k = static_cast<int>(xis.size());
  Eigen::VectorXd gx = grad_xi(xis, signs);
  for (int it = 0; it < 24 && gx.norm() > tol; ++it) {
    const double fd = 1e-5;
    Eigen::MatrixXd hess(k, k);
    for (int m = 0; m < k; ++m) {
      std::vector<double> xp = xis, xm = xis;
      xp[m] += fd;
      xm[m] -= fd;
      hess.col(m) = (grad_xi(xp, signs) - grad_xi(xm, signs)) / (2.0 * fd);
    }
    hess = 0.5 * (hess + hess.transpose()).eval();
    Eigen::VectorXd step = hess.fullPivLu().solve(-gx);
    if (!step.allFinite()) break;
    double s = 1.0;
    std::vector<double> xnew = xis;
    for (int half = 0; half < 40; ++half) {
      bool ok = true;
      for (int i = 0; i < k; ++i) {
        xnew[i] = xis[i] + s * step[i];
        if (!(std::abs(xnew[i]) < 1.0) || (i > 0 && !(xnew[i] > xnew[i - 1]))) ok = false;
      }
      if (ok) {
        const Eigen::VectorXd gnew = grad_xi(xnew, signs);
        if (gnew.norm() < gx.norm()) break;
      }
      s *= 0.5;
      if (half == 39) xnew = xis;
    }
    if (xnew == xis) break;
    xis = xnew;
    gx = grad_xi(xis, signs);
  }

  out.grad_norm = gx.norm();
  out.xis = xis;
  out.value = value_or_inf(xis, signs);
  if (out.grad_norm <= tol * 10.0)
    out.status = AscentOutcome::Status::critical;
  else if (-f + f_start > kDivergenceRise || !std::isfinite(out.value))
    out.status = AscentOutcome::Status::diverged;
  return out;
}

EnergyReport classify(const std::vector<double>& xis, const std::vector<int>& signs) {
  EnergyReport rep;
  rep.config.xis = xis;
  rep.config.signs = signs;
  rep.value = value_or_inf(xis, signs);
  const Eigen::VectorXd g = grad_xi(xis, signs);
  rep.grad_norm = g.norm();

  const int k = static_cast<int>(xis.size());
  const double fd = 1e-5;
  Eigen::MatrixXd hess(k, k);
  for (int m = 0; m < k; ++m) {
    std::vector<double> xp = xis, xm = xis;
    xp[m] += fd;
    xm[m] -= fd;
    hess.col(m) = (grad_xi(xp, signs) - grad_xi(xm, signs)) / (2.0 * fd);
  }
  hess = 0.5 * (hess + hess.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess, Eigen::EigenvaluesOnly);
  rep.hessian_eigs = eig.eigenvalues();

  const double margin = 1e-5 * std::max(1.0, rep.hessian_eigs.cwiseAbs().maxCoeff());
  const int below = (rep.hessian_eigs.array() < -margin).count();
  const int above = (rep.hessian_eigs.array() > margin).count();
  if (below == k)
    rep.classification = CriticalKind::max;
  else if (above == k)
    rep.classification = CriticalKind::min;
  else if (below + above == k)
    rep.classification = CriticalKind::saddle;
  else
    rep.classification = CriticalKind::degenerate;
  return rep;
}

void check_signs(int k, const std::vector<int>& signs) {
  if (k < 1) throw std::invalid_argument("reduced energy: k must be at least 1");
  if (static_cast<int>(signs.size()) != k)
    throw std::invalid_argument("reduced energy: signs size must equal k");
  for (int s : signs)
    if (s != 1 && s != -1) throw std::invalid_argument("reduced energy: signs must be +-1");
}

}  // namespace

const char* to_string(CriticalKind kind) {
  switch (kind) {
    case CriticalKind::max: return "max";
    case CriticalKind::saddle: return "saddle";
    case CriticalKind::min: return "min";
    default: return "degenerate";
  }
}

double reduced_value(const Configuration& cfg) {
  check_ordered(cfg);
  return value_or_inf(cfg.xis, cfg.signs);
}

Eigen::VectorXd reduced_grad(const Configuration& cfg) {
  check_ordered(cfg);
  return grad_xi(cfg.xis, cfg.signs);
}

EnergyReport maximize(int k, const std::vector<int>& signs, int seeds, double tol,
                      std::uint64_t rng_seed) {
  check_signs(k, signs);
  if (!(tol > 0.0)) throw std::invalid_argument("maximize: tol must be positive");

  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<AscentOutcome> criticals;
  int diverged = 0, inconclusive = 0;
  for (int s = 0; s < seeds; ++s) {
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(k + 1);
    if (s > 0)
      for (int m = 0; m <= k; ++m) theta[m] = gauss(rng);
    const AscentOutcome out = ascend(theta, signs, tol);
    switch (out.status) {
      case AscentOutcome::Status::critical: criticals.push_back(out); break;
      case AscentOutcome::Status::diverged: ++diverged; break;
      default: ++inconclusive; break;
    }
  }

  if (criticals.empty())
    throw NoCriticalPoint("maximize: every seed diverged without a critical point", diverged,
                          seeds);

  const auto best = std::max_element(
      criticals.begin(), criticals.end(),
      [](const AscentOutcome& a, const AscentOutcome& b) { return a.value < b.value; });
  EnergyReport rep = classify(best->xis, signs);
  rep.seeds_converged = static_cast<int>(criticals.size());
  rep.seeds_diverged = diverged;
  rep.seeds_inconclusive = inconclusive;
  return rep;
}

std::vector<BlowdownRow> boundary_blowdown_probe(int k, const std::vector<int>& signs,
                                                 const std::vector<double>& margins) {
  check_signs(k, signs);
  for (int i = 0; i + 1 < k; ++i)
    if (signs[i] == signs[i + 1])
      throw std::invalid_argument(
          "boundary_blowdown_probe: requires alternating signs (the value is unbounded above "
          "when an adjacent pair shares a sign)");
  std::vector<double> anchor(k);
  if (k == 1) {
    anchor[0] = 0.0;
  } else {
    const EnergyReport rep = maximize(k, signs, 8, 1e-10);
    anchor = rep.config.xis;
  }

  std::vector<BlowdownRow> rows;
  for (double eps : margins) {
    if (!(eps > 0.0)) throw std::invalid_argument("boundary_blowdown_probe: margins must be > 0");
    // endpoint collision: squeeze the whole configuration toward +1
    std::vector<double> squeezed(k);
    const double scale = eps / (1.0 - anchor[k - 1]);
    for (int i = 0; i < k; ++i) squeezed[i] = 1.0 - scale * (1.0 - anchor[i]);
    rows.push_back({"endpoint", eps, value_or_inf(squeezed, signs)});

    if (k >= 2) {  // neighbor collision: close the middle gap to eps
      std::vector<double> collided = anchor;
      const int i0 = (k - 1) / 2;
      collided[i0 + 1] = collided[i0] + eps;
      rows.push_back({"collision", eps, value_or_inf(collided, signs)});
    }
  }
  return rows;
}

ConjectureSummary conjecture_probe(int k, const std::vector<int>& signs, int n_starts,
                                   std::uint64_t rng_seed) {
  if (k < 3) throw std::invalid_argument("conjecture_probe: requires k >= 3");
  check_signs(k, signs);

  ConjectureSummary summary;
  summary.k = k;
  summary.signs = signs;
  summary.n_starts = n_starts;

  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<std::vector<double>> found;
  for (int s = 0; s < n_starts; ++s) {
    Eigen::VectorXd theta(k + 1);
    for (int m = 0; m <= k; ++m) theta[m] = gauss(rng);
    const AscentOutcome out = ascend(theta, signs, 1e-10);
    if (out.status == AscentOutcome::Status::critical) {
      ++summary.n_converged;
      bool fresh = true;
      for (const auto& c : found) {
        double dist = 0.0;
        for (int i = 0; i < k; ++i) dist = std::max(dist, std::abs(c[i] - out.xis[i]));
        if (dist <= kClusterRadius) fresh = false;
      }
      if (fresh) found.push_back(out.xis);
    } else if (out.status == AscentOutcome::Status::diverged) {
      ++summary.n_diverged;
    } else {
      ++summary.n_inconclusive;
    }
  }
  for (const auto& c : found) summary.clusters.push_back(classify(c, signs));
  return summary;
}

}  // namespace sinhp
