#include "sinhp/solver.hpp"

#include <cmath>

namespace sinhp {

namespace {

void check_amplitude(const Eigen::VectorXd& u) {
  if (u.cwiseAbs().maxCoeff() > 700.0)
    throw std::domain_error("nonlinearity: |u| > 700 would overflow exp");
}

Eigen::VectorXd ansatz_on_mesh(const Mesh& mesh, const AnsatzSpec& spec) {
  Eigen::VectorXd w(mesh.size());
  for (int j = 0; j < mesh.size(); ++j) w[j] = ansatz_value(spec, mesh.nodes[j]);
  return w;
}

// Measured peak locations of a converged solution: argmax of a_i u between
// the midpoints toward the neighboring centers, with parabolic refinement.
// Falls back to the configured center when a window has no interior maximum.
std::vector<double> measured_peaks(const GridFunction& u, const Configuration& cfg) {
  const int k = cfg.k();
  std::vector<double> peaks(cfg.xis);
  for (int i = 0; i < k; ++i) {
    const double lo = (i == 0) ? -1.0 : 0.5 * (cfg.xis[i - 1] + cfg.xis[i]);
    const double hi = (i == k - 1) ? 1.0 : 0.5 * (cfg.xis[i] + cfg.xis[i + 1]);
    int best = -1;
    double best_v = 0.0;
    for (int j = 0; j < u.mesh.size(); ++j) {
      const double x = u.mesh.nodes[j];
      if (x <= lo || x >= hi) continue;
      const double v = cfg.signs[i] * u.values[j];
      if (best < 0 || v > best_v) {
        best = j;
        best_v = v;
      }
    }
    if (best <= 0 || best + 1 >= u.mesh.size() || !(best_v > 0.0)) continue;
    const double x0 = u.mesh.nodes[best - 1], x1 = u.mesh.nodes[best], x2 = u.mesh.nodes[best + 1];
    const double v0 = cfg.signs[i] * u.values[best - 1];
    const double v2 = cfg.signs[i] * u.values[best + 1];
    const double c1 = (best_v - v0) / (x1 - x0);
    const double c2 = ((v2 - best_v) / (x2 - x1) - c1) / (x2 - x0);
    double loc = x1;
    if (c2 < 0.0) {
      const double xv = 0.5 * (x0 + x1) - 0.5 * c1 / c2;
      if (xv > x0 && xv < x2) loc = xv;
    }
    if (loc > lo && loc < hi) peaks[i] = loc;
  }
  return peaks;
}

// snap a nearly mirror-symmetric point set onto its exact mirror image
std::vector<double> symmetrize_points(std::vector<double> xs, double tol) {
  const int k = static_cast<int>(xs.size());
  double asym = 0.0;
  for (int i = 0; i < k; ++i) asym = std::max(asym, std::abs(xs[i] + xs[k - 1 - i]));
  if (asym < tol) {
    for (int i = 0; 2 * i < k; ++i) {
      const double m = 0.5 * (xs[i] - xs[k - 1 - i]);
      xs[i] = m;
      xs[k - 1 - i] = -m;
    }
    if (k % 2 == 1) xs[k / 2] = 0.0;
  }
  return xs;
}

}  // namespace

Eigen::VectorXd nonlinearity(const Eigen::VectorXd& u, double lambda) {
  check_amplitude(u);
  return 2.0 * lambda * u.array().sinh();
}

Eigen::VectorXd nonlinearity_prime(const Eigen::VectorXd& u, double lambda) {
  check_amplitude(u);
  return 2.0 * lambda * u.array().cosh();
}

Eigen::VectorXd residual(const KernelOperator& op, const Eigen::VectorXd& u, double lambda) {
  if (u.size() != op.mesh.size()) throw std::invalid_argument("residual: size mismatch");
  return u - op.apply(nonlinearity(u, lambda));
}

Eigen::VectorXd residual(const KernelOperator& op, const GridFunction& u, double lambda) {
  return residual(op, u.values, lambda);
}

double ansatz_error_norm(const Mesh& mesh, const AnsatzSpec& spec, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("ansatz_error_norm: requires p > 1");
  Eigen::VectorXd e(mesh.size());
  for (int j = 0; j < mesh.size(); ++j) {
    const double w = ansatz_value(spec, mesh.nodes[j]);
    e[j] = 2.0 * spec.lambda * std::sinh(w) - ansatz_density(spec, mesh.nodes[j]);
  }
  return mesh_lp_norm(mesh, e, p);
}

namespace {

double weighted_merit(const KernelOperator& op, const Eigen::VectorXd& r) {
  return std::sqrt(r.cwiseAbs2().dot(op.mesh.weights));
}

struct PhaseResult {
  bool converged = false;
  bool stalled = false;  // line search and LM exhausted
  int iters = 0;
  double rn = 0.0;
};

// One damped-Newton phase on F(u) = u - K f_lambda(u), mutating u in place.
// The Newton direction is a descent direction for the squared weighted-L2
// residual (never for the sup norm, whose maximizer sits at the stiffest
// peak node), so the line search backtracks on the L2 merit while the
// convergence test stays in the sup norm.  When backtracking stalls, a
// Levenberg-Marquardt step on the weighted least-squares problem restores
// progress.  Returns early when the merit stagnates, so a caller with peak
// structure can intervene.
PhaseResult newton_phase(const KernelOperator& op, Eigen::VectorXd& u, double lambda,
                         double tol, int max_iter, std::vector<double>& history, bool use_lm,
                         double min_step) {
  const int n = op.mesh.size();
  Eigen::VectorXd r = residual(op, u, lambda);
  double rn = r.cwiseAbs().maxCoeff();
  double rm = weighted_merit(op, r);
  if (history.empty()) history.push_back(rn);
  double mu_rel = 1e-5;
  int stagnant = 0;

  PhaseResult res;
  for (int it = 0; it < max_iter; ++it) {
    res.iters = it;
    res.rn = rn;
    if (rn <= tol) {
      res.converged = true;
      return res;
    }
    if (stagnant >= 25) return res;  // crawling; let the caller polish

    Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(n, n);
    jac -= op.matrix * nonlinearity_prime(u, lambda).asDiagonal();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
    const Eigen::VectorXd piv = lu.matrixLU().diagonal().cwiseAbs();
    if (piv.minCoeff() <= n * 1e-16 * piv.maxCoeff())
      throw SingularJacobian("newton_solve: singular Jacobian");
    Eigen::VectorXd step = lu.solve(-r);
    if (!step.allFinite()) throw SingularJacobian("newton_solve: dense solve failed");
    const double step_sup = step.cwiseAbs().maxCoeff();
    if (step_sup > 50.0) step *= 50.0 / step_sup;

    const double rm_before = rm;
    bool accepted = false;
    for (double s = 1.0; s >= (use_lm ? 1.0 / 64.0 : min_step); s *= 0.5) {
      const Eigen::VectorXd u_try = u + s * step;
      if (u_try.cwiseAbs().maxCoeff() > 700.0) continue;
      const Eigen::VectorXd r_try = residual(op, u_try, lambda);
      const double rm_try = weighted_merit(op, r_try);
      if (rm_try < rm * (1.0 - 1e-4 * s)) {
        u = u_try;
        r = r_try;
        rm = rm_try;
        accepted = true;
        break;
      }
    }

    if (!accepted && use_lm) {
      // LM fallback: (J^T W J + mu I) d = -J^T W r
      const Eigen::MatrixXd gram = jac.transpose() * (op.mesh.weights.asDiagonal() * jac);
      const Eigen::VectorXd grad = jac.transpose() * (op.mesh.weights.cwiseProduct(r));
      const double scale = gram.diagonal().mean();
      for (; mu_rel <= 1e10; mu_rel *= 8.0) {
        Eigen::MatrixXd reg = gram;
        reg.diagonal().array() += mu_rel * scale;
        const Eigen::VectorXd d = Eigen::LLT<Eigen::MatrixXd>(reg).solve(-grad);
        if (!d.allFinite()) continue;
        const Eigen::VectorXd u_try = u + d;
        if (u_try.cwiseAbs().maxCoeff() > 700.0) continue;
        const Eigen::VectorXd r_try = residual(op, u_try, lambda);
        const double rm_try = weighted_merit(op, r_try);
        if (rm_try < rm) {
          u = u_try;
          r = r_try;
          rm = rm_try;
          accepted = true;
          mu_rel = std::max(1e-7, mu_rel / 16.0);
          break;
        }
      }
    }

    rn = r.cwiseAbs().maxCoeff();
    history.push_back(rn);
    if (!accepted) {
      res.stalled = true;
      res.rn = rn;
      return res;
    }
    stagnant = (rm > 0.97 * rm_before) ? stagnant + 1 : 0;
  }
  res.rn = rn;
  res.converged = rn <= tol;
  return res;
}

SolveReport finish_report(const KernelOperator& op, Eigen::VectorXd u, double lambda, int iters,
                          double rn) {
  SolveReport rep;
  rep.lambda = lambda;
  rep.solution = {op.mesh, std::move(u)};
  rep.newton_iters = iters;
  rep.residual_sup = rn;
  return rep;
}

}  // namespace

SolveReport newton_solve(const KernelOperator& op, const Eigen::VectorXd& u0, double lambda,
                         const NewtonOptions& opts) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("newton_solve: tol must be positive");
  if (u0.size() != op.mesh.size()) throw std::invalid_argument("newton_solve: size mismatch");

  Eigen::VectorXd u = u0;
  std::vector<double> history;
  int used = 0;
  while (used < opts.max_iter) {
    const PhaseResult phase = newton_phase(op, u, lambda, opts.tol, opts.max_iter - used, history,
                                           true, opts.min_step);
    used += std::max(1, phase.iters);
    if (phase.converged) return finish_report(op, u, lambda, used, phase.rn);
    if (phase.stalled)
      throw NonConvergence("newton_solve: line search and LM fallback stalled", history);
    if (phase.iters == 0) break;  // stagnation with no budget consumed
  }
  throw NonConvergence("newton_solve: max iterations reached", history);
}

namespace {

// Bordered inner solve of the reduced formulation: find (u, c) with
//   u - K f_lambda(u) = sum_i c_i v_i,   <e^{U_i} Z_{1,i}, u - omega>_W = 0,
// where v_i = K(e^{U_i} Z_{1,i}) are the discrete projected translation
// modes at the anchor coordinates.  Deflating those modes with explicit
// multipliers keeps the bordered Jacobian uniformly well conditioned, which
// plain Newton on F(u) = 0 is not at small lambda.
struct InnerResult {
  Eigen::VectorXd c;
  double rn_true = 0.0;  // sup norm of the raw residual u - K f(u)
  int iters = 0;
  bool converged = false;
};

InnerResult bordered_inner_solve(const KernelOperator& op, Eigen::VectorXd& u,
                                 const Configuration& anchor, double lambda, double tol,
                                 int max_iter) {
  const int n = op.mesh.size();
  const int k = anchor.k();
  const std::vector<double> deltas = delta_choice(anchor, lambda);
  const AnsatzSpec spec{anchor, lambda, deltas};

  Eigen::MatrixXd modes(n, k);  // e^{U_i} Z_{1,i} at the nodes
  Eigen::VectorXd omega(n);
  for (int j = 0; j < n; ++j) {
    omega[j] = ansatz_value(spec, op.mesh.nodes[j]);
    for (int i = 0; i < k; ++i)
      modes(j, i) = bubble_density(deltas[i], anchor.xis[i], op.mesh.nodes[j]) *
                    bubble_z(deltas[i], anchor.xis[i], 1, op.mesh.nodes[j]);
  }
  const Eigen::MatrixXd v = op.matrix * modes;                      // n x k
  const Eigen::MatrixXd cons = op.mesh.weights.asDiagonal() * modes;  // n x k

  // least-squares multipliers for the current u
  Eigen::VectorXd r = residual(op, u, lambda);
  Eigen::VectorXd c =
      (v.transpose() * (op.mesh.weights.asDiagonal() * v))
          .llt()
          .solve(v.transpose() * (op.mesh.weights.cwiseProduct(r)));

  auto big_residual = [&](const Eigen::VectorXd& uu, const Eigen::VectorXd& cc,
                          const Eigen::VectorXd& rr) {
    Eigen::VectorXd g(n + k);
    g.head(n) = rr - v * cc;
    g.tail(k) = cons.transpose() * (uu - omega);
    return g;
  };
  auto merit = [&](const Eigen::VectorXd& g) { return g.norm(); };

  Eigen::VectorXd g = big_residual(u, c, r);

  InnerResult res;
  for (int it = 0; it < max_iter; ++it) {
    res.iters = it;
    res.rn_true = r.cwiseAbs().maxCoeff();
    if (g.head(n).cwiseAbs().maxCoeff() <= tol && g.tail(k).cwiseAbs().maxCoeff() <= tol) {
      res.converged = true;
      break;
    }
    Eigen::MatrixXd big = Eigen::MatrixXd::Zero(n + k, n + k);
    big.topLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n) -
                              op.matrix * nonlinearity_prime(u, lambda).asDiagonal();
    big.topRightCorner(n, k) = -v;
    big.bottomLeftCorner(k, n) = cons.transpose();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(big);
    const Eigen::VectorXd step = lu.solve(-g);
    if (!step.allFinite()) throw SingularJacobian("bordered solve failed");

    bool accepted = false;
    const double gm = merit(g);
    for (double sfac = 1.0; sfac >= 1.0 / 1024.0; sfac *= 0.5) {
      const Eigen::VectorXd u_try = u + sfac * step.head(n);
      if (u_try.cwiseAbs().maxCoeff() > 700.0) continue;
      const Eigen::VectorXd c_try = c + sfac * step.tail(k);
      const Eigen::VectorXd r_try = residual(op, u_try, lambda);
      const Eigen::VectorXd g_try = big_residual(u_try, c_try, r_try);
      if (merit(g_try) < gm * (1.0 - 1e-4 * sfac)) {
        u = u_try;
        c = c_try;
        r = r_try;
        g = g_try;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  res.c = c;
  res.rn_true = r.cwiseAbs().maxCoeff();
  return res;
}

}  // namespace

SolveReport reduced_newton_solve(const KernelOperator& op, const Eigen::VectorXd& u0,
                                 double lambda, const NewtonOptions& opts,
                                 const Configuration& anchor0) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("reduced_newton_solve: tol must be positive");
  if (u0.size() != op.mesh.size())
    throw std::invalid_argument("reduced_newton_solve: size mismatch");

  const int k = anchor0.k();
  Configuration anchor = anchor0;
  Eigen::VectorXd u = u0;
  std::vector<double> history;
  int inner_total = 0;

  const int inner_cap = std::max(1, std::min(30, opts.max_iter));
  auto run_inner = [&](Eigen::VectorXd& uu, const Configuration& a) {
    InnerResult res = bordered_inner_solve(op, uu, a, lambda, opts.tol, inner_cap);
    inner_total += res.iters;
    return res;
  };

  InnerResult base = run_inner(u, anchor);
  history.push_back(base.rn_true);
  for (int outer = 0; outer < 16; ++outer) {
    if (base.rn_true <= opts.tol) {
      SolveReport rep;
      rep.lambda = lambda;
      rep.solution = {op.mesh, u};
      rep.newton_iters = inner_total;
      rep.residual_sup = base.rn_true;
      return rep;
    }
    // finite-difference Jacobian of c with respect to the anchor centers
    const std::vector<double> deltas = delta_choice(anchor, lambda);
    Eigen::MatrixXd jout(k, k);
    for (int m = 0; m < k; ++m) {
      const double h = 0.01 * deltas[m];
      Configuration probe = anchor;
      probe.xis[m] += h;
      Eigen::VectorXd u_probe = u;
      const InnerResult pr = run_inner(u_probe, probe);
      jout.col(m) = (pr.c - base.c) / h;
    }
    Eigen::VectorXd move = jout.fullPivLu().solve(-base.c);
    if (!move.allFinite()) throw SingularJacobian("reduced_newton_solve: singular outer system");

    bool accepted = false;
    for (double sfac = 1.0; sfac >= 1.0 / 256.0; sfac *= 0.5) {
      Configuration trial = anchor;
      bool ok = true;
      for (int m = 0; m < k; ++m) {
        trial.xis[m] += sfac * move[m];
        if (!(std::abs(trial.xis[m]) < 1.0)) ok = false;
        if (m > 0 && !(trial.xis[m] > trial.xis[m - 1])) ok = false;
      }
      if (!ok) continue;
      Eigen::VectorXd u_try = u;
      const InnerResult tr = run_inner(u_try, trial);
      if (tr.rn_true <= opts.tol || tr.c.norm() < base.c.norm()) {
        anchor = trial;
        u = u_try;
        base = tr;
        history.push_back(base.rn_true);
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw NonConvergence("reduced_newton_solve: outer iteration stalled", history);
  }
  if (base.rn_true <= opts.tol) {
    SolveReport rep;
    rep.lambda = lambda;
    rep.solution = {op.mesh, u};
    rep.newton_iters = inner_total;
    rep.residual_sup = base.rn_true;
    return rep;
  }
  throw NonConvergence("reduced_newton_solve: outer iterations exhausted", history);
}

ContinuationResult continuation(const Configuration& cfg, double lambda_start, double lambda_end,
                                double factor, int base_n, const NewtonOptions& opts) {
  if (!(lambda_end > 0.0 && lambda_end < lambda_start))
    throw std::invalid_argument("continuation: need 0 < lambda_end < lambda_start");
  if (!(factor > 0.0 && factor < 1.0))
    throw std::invalid_argument("continuation: factor must lie in (0,1)");

  ContinuationResult result;
  const SolveReport* prev = nullptr;
  // the ansatz anchors follow the measured peak locations of the previous
  // step (the discrete realization of the lambda-dependent centers); the
  // reported configuration stays the requested one
  Configuration anchor = cfg;
  for (double lambda = lambda_start; lambda >= lambda_end * (1.0 - 1e-9); lambda *= factor) {
    const Mesh mesh = build_mesh(anchor, lambda, base_n);
    const KernelOperator op = assemble_inverse(mesh);
    const AnsatzSpec seed_spec = make_ansatz(anchor, lambda);
    Eigen::VectorXd u0 = ansatz_on_mesh(mesh, seed_spec);
    if (prev) {
      Eigen::VectorXd carried(mesh.size());
      for (int j = 0; j < mesh.size(); ++j)
        carried[j] = prev->solution(mesh.nodes[j]);
      u0 = 0.5 * u0 + 0.5 * carried;
    }
    try {
      SolveReport rep;
      try {
        NewtonOptions plain = opts;
        plain.max_iter = std::min(opts.max_iter, 40);
        rep = newton_solve(op, u0, lambda, plain);
      } catch (const NonConvergence&) {
        rep = reduced_newton_solve(op, u0, lambda, opts, anchor);
      }
      rep.config = cfg;
      rep.deltas = delta_choice(cfg, lambda);
      result.reports.push_back(std::move(rep));
      prev = &result.reports.back();
      anchor.xis = symmetrize_points(measured_peaks(prev->solution, anchor), 1e-6);
    } catch (const NonConvergence& e) {
      result.failure = e.what();
      return result;
    } catch (const SingularJacobian& e) {
      result.failure = e.what();
      return result;
    }
  }
  result.completed = true;
  return result;
}

EnergyBreakdown energy_from_density(const KernelOperator& op, const Eigen::VectorXd& density,
                                    double lambda) {
  const Eigen::VectorXd u = op.apply(density);
  const double norm_sq = op.pairing(density, u);
  const Eigen::VectorXd g = lambda * (u.array().cosh() * 2.0 - 2.0);
  const double total = norm_sq / 2.0 - op.mesh.weights.dot(g);
  if (!std::isfinite(total)) throw std::invalid_argument("energy_from_density: non-finite value");
  return {norm_sq, total};
}

double energy(const KernelOperator& op, const GridFunction& u, double lambda) {
  const Eigen::VectorXd density = nonlinearity(u.values, lambda);
  const double norm_sq = op.pairing(density, u.values);
  const Eigen::VectorXd g = lambda * (u.values.array().cosh() * 2.0 - 2.0);
  const double total = norm_sq / 2.0 - op.mesh.weights.dot(g);
  if (!std::isfinite(total)) throw std::invalid_argument("energy: non-finite value");
  return total;
}

SingularPair linearized_smallest_singulars(const KernelOperator& op, const GridFunction& u,
                                           double lambda, const Configuration& cfg) {
  const int n = op.mesh.size();
  const int k = cfg.k();

  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  a -= op.matrix * nonlinearity_prime(u.values, lambda).asDiagonal();

  // discrete energy Gram matrix B ~ W K^{-1}, symmetrized
  Eigen::PartialPivLU<Eigen::MatrixXd> klu(op.matrix);
  Eigen::MatrixXd b = op.mesh.weights.asDiagonal() * klu.inverse();
  b = 0.5 * (b + b.transpose()).eval();

  Eigen::LLT<Eigen::MatrixXd> llt(b);
  double ridge = 0.0;
  while (llt.info() != Eigen::Success) {
    ridge = (ridge == 0.0) ? 1e-12 * b.diagonal().maxCoeff() : 10.0 * ridge;
    if (!(ridge < b.diagonal().maxCoeff()))
      throw std::runtime_error("linearized_smallest_singulars: energy Gram not positive");
    llt.compute(b + ridge * Eigen::MatrixXd::Identity(n, n));
  }
  const Eigen::MatrixXd lmat = llt.matrixL();

  // M = L^T A L^{-T}, the linearization in energy coordinates
  Eigen::MatrixXd m = lmat.transpose() * a;
  m = lmat.triangularView<Eigen::Lower>().solve(m.transpose()).transpose().eval();
  m = 0.5 * (m + m.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(m, Eigen::EigenvaluesOnly);
  const double sigma_full = full.eigenvalues().cwiseAbs().minCoeff();

  // deflation directions: discrete projections K(e^{U_j} Z_{1,j})
  const std::vector<double> deltas = delta_choice(cfg, lambda);
  Eigen::MatrixXd v(n, k);
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd density(n);
    for (int i = 0; i < n; ++i)
      density[i] = bubble_density(deltas[j], cfg.xis[j], op.mesh.nodes[i]) *
                   bubble_z(deltas[j], cfg.xis[j], 1, op.mesh.nodes[i]);
    v.col(j) = op.apply(density);
  }
  // orthonormal basis of the complement: last n-k columns of the full Q from
  // the QR of the deflation directions in energy coordinates
  const Eigen::MatrixXd vt = lmat.transpose() * v;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(vt);
  const Eigen::MatrixXd qfull = qr.householderQ();
  const Eigen::MatrixXd q2 = qfull.rightCols(n - k);

  const Eigen::MatrixXd mq = m * q2;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram(mq.transpose() * mq, Eigen::EigenvaluesOnly);
  const double sigma_perp = std::sqrt(std::max(0.0, gram.eigenvalues().minCoeff()));

  return {sigma_full, sigma_perp};
}

}  // namespace sinhp
