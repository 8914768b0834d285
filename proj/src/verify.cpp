#include "sinhp/verify.hpp"

#include <algorithm>
#include <cmath>

namespace sinhp {

namespace {

constexpr int kEpsHalvings = 6;

double min_gap(const Configuration& cfg) {
  double m = std::min(1.0 + cfg.xis.front(), 1.0 - cfg.xis.back());
  for (int i = 0; i + 1 < cfg.k(); ++i) m = std::min(m, cfg.xis[i + 1] - cfg.xis[i]);
  return m;
}

// (-1)^j u0' sqrt(1-x^2) evaluated through the pole-free product form
// sum_i a_i (-1/pi) sqrt(1-xi_i^2) / (x - xi_i)
double slope_product(const Configuration& cfg, double x) {
  double s = 0.0;
  for (int i = 0; i < cfg.k(); ++i)
    s += cfg.signs[i] * (-1.0 / pi) * std::sqrt((1.0 - cfg.xis[i]) * (1.0 + cfg.xis[i])) /
         (x - cfg.xis[i]);
  return s;
}

// monotonicity constant restricted to the two outer intervals, which is what
// the outer-zone certification bound uses; zone signs are +1 on the left
// (j = 0) and (-1)^k on the right (j = k)
double outer_monotonicity(const Configuration& cfg, int samples = 2000) {
  double m = std::numeric_limits<double>::infinity();
  const int k = cfg.k();
  for (int side = 0; side < 2; ++side) {
    const double a = side == 0 ? -1.0 : cfg.xis[k - 1];
    const double b = side == 0 ? cfg.xis[0] : 1.0;
    const double zone_sign = side == 0 ? 1.0 : (k % 2 == 0 ? 1.0 : -1.0);
    for (int i = 0; i <= samples; ++i) {
      const double x = a + (b - a) * double(i) / samples;
      if (side == 0 && x >= b) continue;  // skip the pole endpoint only
      if (side == 1 && x <= a) continue;
      m = std::min(m, zone_sign * slope_product(cfg, x));
    }
  }
  return m;
}

struct ZoneCheck {
  bool ok = false;
  std::vector<double> zeros;
  std::vector<ZeroBracket> brackets;
};

double bisect_zero(const GridFunction& u, double lo, double hi) {
  double flo = u(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = u(mid);
    if (fm == 0.0) return mid;
    if ((flo < 0) != (fm < 0)) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

ZoneCheck try_certify(const GridFunction& u, const Configuration& cfg, double eps, double c_out) {
  const int k = cfg.k();
  const Mesh& mesh = u.mesh;
  ZoneCheck res;

  // zone 1: outer intervals, |u| >= (1/2) * 2 pi c_out sqrt(2 d(x))
  for (int j = 0; j < mesh.size(); ++j) {
    const double x = mesh.nodes[j];
    if (x > cfg.xis.front() - eps && x < cfg.xis.back() + eps) continue;
    const double d = 1.0 - std::abs(x);
    const double threshold = pi * c_out * std::sqrt(2.0 * d);
    if (!(std::abs(u.values[j]) >= threshold)) return res;
  }

  // zone 2: peak windows, a_i u >= 1
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < mesh.size(); ++j) {
      const double x = mesh.nodes[j];
      if (std::abs(x - cfg.xis[i]) >= eps) continue;
      if (!(cfg.signs[i] * u.values[j] >= 1.0)) return res;
    }
  }

  // zone 3: between-peak zones, exactly one sign change each.  Exact zero
  // node values are admitted as crossings when the surrounding signs flip;
  // a zero touched without a sign change is genuinely ambiguous.
  for (int i = 0; i + 1 < k; ++i) {
    const double a = cfg.xis[i] + eps;
    const double b = cfg.xis[i + 1] - eps;
    if (!(b > a)) return res;
    if (!(cfg.signs[i] * u(a) > 0.0) || !(cfg.signs[i + 1] * u(b) > 0.0)) return res;
    int changes = 0;
    double lo = a, hi = b;
    double prev_x = a;
    double prev_v = u(a);
    bool pending_zero = false;
    auto feed = [&](double x, double v) {
      if (v == 0.0) {
        pending_zero = true;
        return;
      }
      if ((prev_v < 0) != (v < 0)) {
        ++changes;
        lo = prev_x;
        hi = x;
      } else if (pending_zero) {
        throw AmbiguousZero("count_nodal_regions: zero node value without a sign change");
      }
      pending_zero = false;
      prev_x = x;
      prev_v = v;
    };
    for (int j = 0; j < mesh.size(); ++j) {
      const double x = mesh.nodes[j];
      if (x <= a || x >= b) continue;
      feed(x, u.values[j]);
    }
    feed(b, u(b));
    if (changes != 1) return res;
    res.zeros.push_back(bisect_zero(u, lo, hi));
    res.brackets.push_back({lo, hi});
  }
  res.ok = true;
  return res;
}

}  // namespace

double limit_profile(const Configuration& cfg, double x) {
  double v = 0.0;
  for (int i = 0; i < cfg.k(); ++i)
    if (x != cfg.xis[i]) v += cfg.signs[i] * green(cfg.xis[i], x);
  return 2.0 * pi * v;
}

NodalReport count_nodal_regions(const GridFunction& u, const Configuration& cfg, double lambda,
                                double eps) {
  (void)lambda;
  cfg.validate();
  if (u.values.size() != u.mesh.size())
    throw std::invalid_argument("count_nodal_regions: malformed grid function");

  const double c_out = outer_monotonicity(cfg);
  double eps0 = eps > 0.0 ? eps : 0.5 * min_gap(cfg);

  for (int halving = 0; halving <= kEpsHalvings; ++halving) {
    const double e = eps0 * std::pow(0.5, halving);
    const ZoneCheck z = try_certify(u, cfg, e, c_out);
    if (z.ok) {
      NodalReport rep;
      rep.zero_locations = z.zeros;
      rep.brackets = z.brackets;
      rep.nodal_count = static_cast<int>(z.zeros.size()) + 1;
      rep.certified = true;
      rep.eps_used = e;
      return rep;
    }
  }

  // fallback: raw sign-change counting over the nodes, flagged uncertified
  NodalReport rep;
  rep.certified = false;
  rep.eps_used = 0.0;
  double prev_x = u.mesh.nodes[0];
  double prev_v = u.values[0];
  for (int j = 1; j < u.mesh.size(); ++j) {
    const double v = u.values[j];
    if (v == 0.0) continue;
    if (prev_v != 0.0 && (prev_v < 0) != (v < 0)) {
      rep.zero_locations.push_back(bisect_zero(u, prev_x, u.mesh.nodes[j]));
      rep.brackets.push_back({prev_x, u.mesh.nodes[j]});
    }
    prev_x = u.mesh.nodes[j];
    prev_v = v;
  }
  rep.nodal_count = static_cast<int>(rep.zero_locations.size()) + 1;
  return rep;
}

PeakReport peak_diagnostics(const GridFunction& u, const Configuration& cfg, double lambda,
                            const NodalReport& nodal) {
  cfg.validate();
  const int k = cfg.k();
  if (static_cast<int>(nodal.zero_locations.size()) != k - 1)
    throw std::invalid_argument("peak_diagnostics: nodal split does not match k peaks");

  PeakReport rep;
  rep.zone_edges.push_back(-1.0);
  for (double z : nodal.zero_locations) rep.zone_edges.push_back(z);
  rep.zone_edges.push_back(1.0);

  for (int i = 0; i < k; ++i) {
    const double a = rep.zone_edges[i];
    const double b = rep.zone_edges[i + 1];
    int best = -1;
    double best_v = 0.0;
    for (int j = 0; j < u.mesh.size(); ++j) {
      const double x = u.mesh.nodes[j];
      if (x <= a || x >= b) continue;
      const double v = cfg.signs[i] * u.values[j];
      if (best < 0 || v > best_v) {
        best = j;
        best_v = v;
      }
    }
    if (best < 0 || !(best_v > 0.0))
      throw MissingPeak("peak_diagnostics: no interior extremum of the expected sign");

    // parabola through the extremal node and its neighbors (Newton form)
    double loc = u.mesh.nodes[best];
    double height = best_v;
    if (best > 0 && best + 1 < u.mesh.size()) {
      const double x0 = u.mesh.nodes[best - 1], x1 = u.mesh.nodes[best], x2 = u.mesh.nodes[best + 1];
      const double v0 = cfg.signs[i] * u.values[best - 1];
      const double v2 = cfg.signs[i] * u.values[best + 1];
      const double c1 = (best_v - v0) / (x1 - x0);
      const double c2 = ((v2 - best_v) / (x2 - x1) - c1) / (x2 - x0);
      if (c2 < 0.0) {
        const double xv = 0.5 * (x0 + x1) - 0.5 * c1 / c2;
        if (xv > x0 && xv < x2) {
          loc = xv;
          height = v0 + c1 * (xv - x0) + c2 * (xv - x0) * (xv - x1);
        }
      }
    }

    PeakInfo info;
    info.xi = cfg.xis[i];
    info.sign = cfg.signs[i];
    info.location = loc;
    info.height = height;
    Eigen::VectorXd density(u.mesh.size());
    for (int j = 0; j < u.mesh.size(); ++j) density[j] = 2.0 * lambda * std::sinh(u.values[j]);
    info.mass = mesh_interval_integral(u.mesh, density, a, b);
    rep.peaks.push_back(info);
  }
  return rep;
}

ProfileDeviation profile_convergence(const GridFunction& u, const Configuration& cfg,
                                     double lambda, double eps) {
  (void)lambda;
  cfg.validate();
  if (!(eps > 0.0)) throw std::invalid_argument("profile_convergence: eps must be positive");
  if (!(cfg.xis.front() - eps > -1.0) || !(cfg.xis.back() + eps < 1.0))
    throw std::invalid_argument("profile_convergence: eps windows overlap the boundary");

  ProfileDeviation dev{0.0, 0.0};
  for (int j = 0; j < u.mesh.size(); ++j) {
    const double x = u.mesh.nodes[j];
    bool in_window = false;
    for (int i = 0; i < cfg.k(); ++i)
      if (std::abs(x - cfg.xis[i]) < eps) in_window = true;
    if (in_window) continue;
    const double diff = std::abs(u.values[j] - limit_profile(cfg, x));
    dev.sup = std::max(dev.sup, diff);
    if (x < cfg.xis.front() - eps || x > cfg.xis.back() + eps)
      dev.weighted_outer_sup = std::max(dev.weighted_outer_sup, diff / std::sqrt(1.0 - std::abs(x)));
  }
  return dev;
}

double limit_profile_monotonicity(const Configuration& cfg, int samples_per_interval) {
  cfg.validate();
  if (!cfg.alternating_signs())
    throw std::invalid_argument("limit_profile_monotonicity: requires alternating signs");

  const int k = cfg.k();
  double m = std::numeric_limits<double>::infinity();
  for (int j = 0; j <= k; ++j) {
    const double a = (j == 0) ? -1.0 : cfg.xis[j - 1];
    const double b = (j == k) ? 1.0 : cfg.xis[j];
    const double zone_sign = (j % 2 == 0) ? 1.0 : -1.0;
    for (int i = 0; i <= samples_per_interval; ++i) {
      double x = a + (b - a) * double(i) / samples_per_interval;
      // the product form is finite at +-1 but singular at the peak centers
      if (j > 0 && i == 0) continue;
      if (j < k && i == samples_per_interval) continue;
      m = std::min(m, zone_sign * slope_product(cfg, x));
    }
  }
  return m;
}

}  // namespace sinhp
