#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "sinhp/pipeline.hpp"

using namespace sinhp;

namespace {

GridFunction sample_on_mesh(const Mesh& mesh, const std::function<double(double)>& f) {
  Eigen::VectorXd v(mesh.size());
  for (int j = 0; j < mesh.size(); ++j) v[j] = f(mesh.nodes[j]);
  return {mesh, v};
}

SolveReport solve_k2(double lambda, int base_n = 128) {
  const double t = 1.0 / std::sqrt(3.0);
  Configuration cfg = Configuration::alternating({-t, t});
  return run_solve(cfg, lambda, base_n, 1e-10, false);
}

}  // namespace

TEST_CASE("count_nodal_regions: constants and sampled limit profiles") {
  Configuration cfg = Configuration::alternating({0.0});
  Mesh mesh = build_mesh(cfg, 0.05, 128);

  // positive constant: no zeros, one nodal region (certification falls back)
  GridFunction pos = sample_on_mesh(mesh, [](double) { return 2.0; });
  const NodalReport flat = count_nodal_regions(pos, cfg, 0.05);
  CHECK(flat.nodal_count == 1);
  CHECK(flat.zero_locations.empty());

  // sampled G difference: one zero at the origin
  Configuration two = Configuration::alternating({-0.5, 0.5});
  Mesh mesh2 = build_mesh(two, 0.05, 128);
  GridFunction gdiff = sample_on_mesh(mesh2, [&](double x) {
    const double g1 = x == -0.5 ? 30.0 : green(-0.5, x);
    const double g2 = x == 0.5 ? 30.0 : green(0.5, x);
    return 2.0 * pi * (g1 - g2);
  });
  const NodalReport rep = count_nodal_regions(gdiff, two, 0.05);
  CHECK(rep.nodal_count == 2);
  REQUIRE(rep.zero_locations.size() == 1);
  CHECK(std::abs(rep.zero_locations[0]) <= 1e-9);
  CHECK(rep.certified);
}

TEST_CASE("count_nodal_regions on a solved k=2 profile; zone soundness") {
  const SolveReport rep = solve_k2(0.05);
  const NodalReport nodal = count_nodal_regions(rep.solution, rep.config, 0.05);
  CHECK(nodal.nodal_count == 2);
  CHECK(nodal.certified);
  REQUIRE(nodal.zero_locations.size() == 1);
  CHECK(std::abs(nodal.zero_locations[0]) <= 1e-8);  // symmetry pins the zero at 0

  // brute-force recount on a 10x refined interpolation grid agrees
  int changes = 0;
  double prev = rep.solution(-1.0 + 1e-9);
  const int fine = 10 * rep.solution.mesh.size();
  for (int i = 1; i <= fine; ++i) {
    const double x = -1.0 + 2.0 * double(i) / (fine + 1);
    const double v = rep.solution(x);
    if (v != 0.0 && prev != 0.0 && (v < 0) != (prev < 0)) ++changes;
    if (v != 0.0) prev = v;
  }
  CHECK(changes + 1 == nodal.nodal_count);
}

TEST_CASE("count_nodal_regions: zero touch without a crossing is ambiguous") {
  const SolveReport rep = solve_k2(0.05);
  GridFunction u = rep.solution;
  // plant an exact zero at a node inside the between-peak zone whose
  // neighbors keep the same sign: a touch, not a crossing
  int target = -1;
  for (int j = 1; j + 1 < u.mesh.size(); ++j) {
    const double x = u.mesh.nodes[j];
    if (x > -0.2 && x < -0.1 && u.values[j - 1] > 0.1 && u.values[j + 1] > 0.1) target = j;
  }
  REQUIRE(target > 0);
  u.values[target] = 0.0;
  CHECK_THROWS_AS(count_nodal_regions(u, rep.config, 0.05), AmbiguousZero);
}

TEST_CASE("peak_diagnostics: masses, heights, sign flip") {
  const double lambda = 0.05;
  const SolveReport rep = solve_k2(lambda);
  const NodalReport nodal = count_nodal_regions(rep.solution, rep.config, lambda);
  const PeakReport peaks = peak_diagnostics(rep.solution, rep.config, lambda, nodal);
  REQUIRE(peaks.peaks.size() == 2);
  CHECK(peaks.peaks[0].sign == 1);
  CHECK(peaks.peaks[1].sign == -1);
  CHECK(peaks.peaks[0].mass == doctest::Approx(2.0 * pi).epsilon(0.1));
  CHECK(peaks.peaks[1].mass == doctest::Approx(-2.0 * pi).epsilon(0.1));
  for (int i = 0; i < 2; ++i)
    CHECK(std::abs(peaks.peaks[i].height - predicted_peak_height(rep.config, lambda, i)) <= 0.2);

  // masses negate under u -> -u
  GridFunction flipped{rep.solution.mesh, -rep.solution.values};
  Configuration neg = rep.config;
  for (int& s : neg.signs) s = -s;
  const NodalReport nodal_f = count_nodal_regions(flipped, neg, lambda);
  const PeakReport peaks_f = peak_diagnostics(flipped, neg, lambda, nodal_f);
  for (int i = 0; i < 2; ++i)
    CHECK(peaks_f.peaks[i].mass == doctest::Approx(-peaks.peaks[i].mass).epsilon(1e-9));

  // missing peak: feed a profile of the wrong sign
  CHECK_THROWS_AS(peak_diagnostics(flipped, rep.config, lambda, nodal_f), MissingPeak);
}

TEST_CASE("profile_convergence: self-comparison and lambda trend") {
  Configuration cfg = Configuration::alternating({0.0});
  Mesh mesh = build_mesh(cfg, 0.05, 128);
  GridFunction exact = sample_on_mesh(mesh, [&](double x) {
    return x == 0.0 ? std::log(1e18) : 2.0 * pi * green(0.0, x);
  });
  const ProfileDeviation self = profile_convergence(exact, cfg, 0.05, 0.2);
  CHECK(self.sup <= 1e-12);
  CHECK(self.weighted_outer_sup <= 1e-10);

  double prev = 1e9, prev_w = 1e9;
  for (double lam : {0.1, 0.05, 0.025}) {
    const SolveReport rep = run_solve(cfg, lam, 128, 1e-10, false);
    const ProfileDeviation dev = profile_convergence(rep.solution, cfg, lam, 0.2);
    CHECK(dev.sup < prev);
    CHECK(std::isfinite(dev.weighted_outer_sup));
    CHECK(dev.weighted_outer_sup < prev_w);  // sqrt(d)-weighted boundary ratio
    prev = dev.sup;
    prev_w = dev.weighted_outer_sup;
  }

  CHECK_THROWS_AS(profile_convergence(exact, cfg, 0.05, 1.5), std::invalid_argument);
}

TEST_CASE("peak locations converge toward the reduced-energy maximizer") {
  const double t = 1.0 / std::sqrt(3.0);
  Configuration cfg = Configuration::alternating({-t, t});
  SweepOptions opts;
  opts.lambda_start = 0.2;
  opts.lambda_end = 0.05;
  opts.factor = 0.5;
  opts.base_n = 128;
  opts.with_sigma = false;
  const ContinuationResult res = run_sweep(cfg, opts);
  REQUIRE(res.completed);
  double prev = 1e9;
  for (const SolveReport& r : res.reports) {
    double dist = 0.0;
    for (const PeakInfo& p : r.peaks) dist = std::max(dist, std::abs(p.location - p.xi));
    CHECK(dist < prev);
    prev = dist;
  }
}

TEST_CASE("limit_profile_monotonicity: k=1 equals 1/pi, k=2 positive") {
  Configuration one = Configuration::alternating({0.0});
  CHECK(limit_profile_monotonicity(one) == doctest::Approx(1.0 / pi).epsilon(1e-6));

  const double t = 1.0 / std::sqrt(3.0);
  Configuration two = Configuration::alternating({-t, t});
  const double m2 = limit_profile_monotonicity(two);
  CHECK(m2 > 0.0);

  // sampling refinement does not reduce the minimum
  const double coarse = limit_profile_monotonicity(two, 500);
  const double fine = limit_profile_monotonicity(two, 5000);
  CHECK(fine >= coarse - 1e-8);

  Configuration same = two;
  same.signs = {1, 1};
  CHECK_THROWS_AS(limit_profile_monotonicity(same), std::invalid_argument);
}

TEST_CASE("property: monotonicity positive over random alternating configs") {
  std::mt19937_64 rng(5150);
  std::uniform_real_distribution<double> gap(0.08, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 1 + trial % 4;
    std::vector<double> gaps(k + 1);
    double total = 0.0;
    for (double& g : gaps) total += (g = gap(rng));
    std::vector<double> xis(k);
    double c = 0.0;
    for (int i = 0; i < k; ++i) {
      c += gaps[i] / total * 2.0;
      xis[i] = -1.0 + c;
    }
    Configuration cfg = Configuration::alternating(xis);
    if (cfg.margin() < 0.05) continue;
    CHECK(limit_profile_monotonicity(cfg, 300) > 0.0);
  }
}
