#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "sinhp/reduced_energy.hpp"

using namespace sinhp;

namespace {

std::mt19937_64 rng(99281);

Configuration random_config(int k, bool alternating = true) {
  std::uniform_real_distribution<double> gap(0.05, 1.0);
  std::vector<double> gaps(k + 1);
  double total = 0.0;
  for (double& g : gaps) {
    g = gap(rng);
    total += g;
  }
  std::vector<double> xis(k);
  double c = 0.0;
  for (int i = 0; i < k; ++i) {
    c += gaps[i] / total * 2.0;
    xis[i] = -1.0 + c;
  }
  Configuration cfg = Configuration::alternating(xis);
  if (!alternating) {
    std::uniform_int_distribution<int> coin(0, 1);
    for (int& s : cfg.signs) s = coin(rng) ? 1 : -1;
  }
  return cfg;
}

}  // namespace

TEST_CASE("reduced_value: frozen values and rejection of bad configs") {
  CHECK(reduced_value(Configuration::alternating({0.0})) ==
        doctest::Approx(0.220635600152652).epsilon(1e-13));
  const double t = 1.0 / std::sqrt(3.0);
  CHECK(reduced_value(Configuration::alternating({-t, t})) ==
        doctest::Approx(-0.166555057087573).epsilon(1e-12));

  Configuration bad = Configuration::alternating({0.3, 0.3});
  CHECK_THROWS_AS(reduced_value(bad), std::invalid_argument);
  Configuration unordered = Configuration::alternating({0.5, -0.5});
  CHECK_THROWS_AS(reduced_value(unordered), std::invalid_argument);
}

TEST_CASE("reduced_grad: vanishes at the known critical points") {
  CHECK(reduced_grad(Configuration::alternating({0.0})).norm() <= 1e-14);
  const double t = 1.0 / std::sqrt(3.0);
  CHECK(reduced_grad(Configuration::alternating({-t, t})).norm() <= 1e-10);
}

TEST_CASE("property: analytic gradient matches directional differences") {
  const double step = 1e-6;
  for (int k = 1; k <= 5; ++k) {
    for (int trial = 0; trial < 200; ++trial) {
      Configuration cfg = random_config(k, trial % 3 != 0);
      if (cfg.margin() < 0.04) continue;
      const Eigen::VectorXd g = reduced_grad(cfg);
      for (int m = 0; m < k; ++m) {
        Configuration up = cfg, dn = cfg;
        up.xis[m] += step;
        dn.xis[m] -= step;
        const double fd = (reduced_value(up) - reduced_value(dn)) / (2.0 * step);
        CHECK(std::abs(fd - g[m]) <= 1e-6 * std::max(1.0, std::abs(g[m])));
      }
    }
  }
}

TEST_CASE("property: reflection symmetry of the functional") {
  for (int trial = 0; trial < 500; ++trial) {
    Configuration cfg = random_config(2 + trial % 4);
    Configuration mirror = cfg;
    const int k = cfg.k();
    for (int i = 0; i < k; ++i) mirror.xis[i] = -cfg.xis[k - 1 - i];
    // mirrored alternating pattern has the same pairwise sign products
    CHECK(reduced_value(mirror) == doctest::Approx(reduced_value(cfg)).epsilon(1e-12));
  }
}

TEST_CASE("property: alternating interaction part is nonpositive") {
  for (int trial = 0; trial < 10000; ++trial) {
    Configuration cfg = random_config(2 + trial % 5);
    const int k = cfg.k();
    double inter = 0.0;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        if (i == j) continue;
        inter += cfg.signs[i] * cfg.signs[j] * green(cfg.xis[i], cfg.xis[j]);
      }
    CHECK(inter <= 1e-12);
  }
}

TEST_CASE("unboundedness witness: same-sign pair collapse exceeds any threshold") {
  // representable gaps bound the attainable value at ~(2/pi) log(1/eps_mach)
  for (double target : {5.0, 12.0, 20.0}) {
    bool exceeded = false;
    for (double gap = 1e-2; gap > 1e-15 && !exceeded; gap *= 0.01) {
      Configuration cfg;
      cfg.xis = {-0.2, -0.2 + gap, 0.5};
      cfg.signs = {1, 1, -1};
      if (reduced_value(cfg) > target) exceeded = true;
    }
    CHECK(exceeded);
  }
}

TEST_CASE("maximize: exact critical points for k=1,2; none for equal signs") {
  const EnergyReport one = maximize_alternating(1);
  CHECK(std::abs(one.config.xis[0]) <= 1e-8);
  CHECK(one.classification == CriticalKind::max);
  CHECK(one.grad_norm <= 1e-10);

  const EnergyReport two = maximize_alternating(2);
  const double t = 1.0 / std::sqrt(3.0);
  CHECK(std::abs(two.config.xis[0] + t) <= 1e-6);
  CHECK(std::abs(two.config.xis[1] - t) <= 1e-6);
  CHECK(two.classification == CriticalKind::max);
  for (int i = 0; i < 2; ++i) CHECK(two.hessian_eigs[i] < 0.0);

  CHECK_THROWS_AS(maximize(2, {1, 1}), NoCriticalPoint);
  CHECK_THROWS_AS(maximize(0, {}), std::invalid_argument);
}

TEST_CASE("maximize: k=2 maximizer reproduced from every interior start") {
  const double t = 1.0 / std::sqrt(3.0);
  for (std::uint64_t seed : {7ull, 1234ull, 999331ull}) {
    const EnergyReport rep = maximize_alternating(2, 16, 1e-11, seed);
    CHECK(rep.seeds_converged == 16);
    CHECK(std::abs(rep.config.xis[0] + t) <= 1e-6);
    CHECK(std::abs(rep.config.xis[1] - t) <= 1e-6);
  }
}

TEST_CASE("boundary blow-down: values decrease like the predicted log rates") {
  std::vector<double> margins;
  for (double e = 1e-2; e >= 1e-6; e *= 0.1) margins.push_back(e);

  // k=1 endpoint: value ~ (1/pi) log(eps) + O(1)
  const auto rows1 = boundary_blowdown_probe(1, {1}, margins);
  double prev = 1e9;
  std::vector<double> vals;
  for (const auto& row : rows1) {
    CHECK(row.kind == "endpoint");
    CHECK(row.value < prev);
    prev = row.value;
    vals.push_back(row.value);
  }
  for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
    const double slope = (vals[i] - vals[i + 1]) / (std::log(margins[i]) - std::log(margins[i + 1]));
    CHECK(slope == doctest::Approx(1.0 / pi).epsilon(0.05));
  }

  CHECK_THROWS_AS(boundary_blowdown_probe(2, {1, 1}, {1e-3}), std::invalid_argument);

  // k=2 collision: value ~ (2/pi) log(eps) + O(1), and the interior max
  // exceeds all probed boundary values
  const auto rows2 = boundary_blowdown_probe(2, {1, -1}, margins);
  const double interior = maximize_alternating(2).value;
  std::vector<double> collision;
  for (const auto& row : rows2) {
    CHECK(interior > row.value);
    if (row.kind == "collision") collision.push_back(row.value);
  }
  for (std::size_t i = 0; i + 1 < collision.size(); ++i) {
    const double slope =
        (collision[i] - collision[i + 1]) / (std::log(margins[i]) - std::log(margins[i + 1]));
    CHECK(slope == doctest::Approx(2.0 / pi).epsilon(0.05));
  }
}

TEST_CASE("conjecture probe: k=3 alternating has one cluster, mixed signs none") {
  const ConjectureSummary alt = conjecture_probe(3, {1, -1, 1}, 60, 31337);
  CHECK(alt.clusters.size() == 1);
  CHECK(alt.clusters[0].classification == CriticalKind::max);

  const ConjectureSummary again = conjecture_probe(3, {1, -1, 1}, 60, 31337);
  CHECK(again.clusters.size() == alt.clusters.size());
  CHECK(again.clusters[0].config.xis[0] == alt.clusters[0].config.xis[0]);

  const ConjectureSummary mixed = conjecture_probe(3, {1, 1, -1}, 60, 31337);
  CHECK(mixed.clusters.empty());
  CHECK(mixed.n_diverged > 0);

  CHECK_THROWS_AS(conjecture_probe(2, {1, -1}, 10, 1), std::invalid_argument);
}
