#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "sinhp/green_kernel.hpp"

using namespace sinhp;

namespace {
std::mt19937_64 rng(20240817);
double uniform(double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}
}  // namespace

TEST_CASE("green: frozen closed-form values") {
  // reference values computed at 30-digit precision from the closed form
  CHECK(green(0.0, 0.5) == doctest::Approx(0.419200718278982733).epsilon(1e-14));
  CHECK(green(0.3, 1.0) == 0.0);
  CHECK(green(0.3, 1.5) == 0.0);
  CHECK(green(0.3, -1.0) == 0.0);
  CHECK(green(0.2, 0.7) == doctest::Approx(green(0.7, 0.2)).epsilon(1e-15));
}

TEST_CASE("green_pair bundles G and H consistently") {
  const GreenPair gp = green_pair(0.2, 0.7);
  CHECK(gp.g == green(0.2, 0.7));
  CHECK(gp.h == robin(0.2, 0.7));
}

TEST_CASE("green: rejects the pole and bad centers") {
  CHECK_THROWS_AS(green(0.4, 0.4), std::domain_error);
  CHECK_THROWS_AS(green(1.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(green(-1.2, 0.5), std::domain_error);
}

TEST_CASE("robin: frozen values and the diagonal identity") {
  CHECK(robin(0.0, 0.0) == doctest::Approx(0.220635600152651593).epsilon(1e-14));
  CHECK(robin(0.5, 0.5) == doctest::Approx(0.129063552413408185).epsilon(1e-14));
  for (int i = 0; i < 200; ++i) {
    const double xi = uniform(-0.999, 0.999);
    CHECK(robin(xi, xi) ==
          doctest::Approx(std::log(2.0 * (1.0 - xi * xi)) / pi).epsilon(1e-13));
  }
  CHECK_THROWS_AS(robin(0.0, 1.5), std::domain_error);
  CHECK_THROWS_AS(robin(1.0, 0.0), std::domain_error);
}

TEST_CASE("robin: H(xi,xi) decreases to -inf toward the endpoint") {
  double prev = robin(0.0, 0.0);
  for (double xi = 0.1; xi < 1.0 - 1e-12; xi = 1.0 - (1.0 - xi) * 0.5) {
    const double v = robin(xi, xi);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < -7.0);
}

TEST_CASE("green_dx: frozen values, oddness, sign") {
  CHECK(green_dx(0.0, 0.5) == doctest::Approx(-0.735105193895722733).epsilon(1e-14));
  CHECK(green_dx(0.0, -0.5) == doctest::Approx(0.735105193895722733).epsilon(1e-14));
  CHECK(green_dx(0.2, 0.9) < 0.0);
  CHECK(green_dx(0.2, -0.9) > 0.0);
  CHECK_THROWS_AS(green_dx(0.2, 0.2), std::domain_error);
  CHECK_THROWS_AS(green_dx(0.2, 1.0), std::domain_error);
}

TEST_CASE("robin_dxi: frozen values on both branches") {
  CHECK(robin_dxi(0.0, 0.0) == 0.0);
  CHECK(robin_dxi(0.0, 0.5) == doctest::Approx(-0.085290876945789294).epsilon(1e-14));
  CHECK(robin_dxi(0.3, 2.0) == doctest::Approx(-0.187241109519876866).epsilon(1e-14));
  CHECK_THROWS_AS(robin_dxi(1.0, 0.5), std::domain_error);
}

TEST_CASE("property: reciprocity on 1e4 random interior pairs") {
  for (int i = 0; i < 10000; ++i) {
    const double a = uniform(-0.999, 0.999);
    double b = uniform(-0.999, 0.999);
    if (a == b) b += 1e-6;
    CHECK(std::abs(green(a, b) - green(b, a)) <= 1e-14);
  }
}

TEST_CASE("property: Robin consistency G = H + (1/pi) log(1/|x-xi|)") {
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    const double xi = uniform(-0.99, 0.99);
    const double x = uniform(-0.99, 0.99);
    if (std::abs(x - xi) < 1e-6) continue;
    const double lhs = green(xi, x) - robin(xi, x) - std::log(1.0 / std::abs(x - xi)) / pi;
    CHECK(std::abs(lhs) <= 1e-12);
    ++checked;
  }
  CHECK(checked > 9000);
}

TEST_CASE("property: positivity of G on interior pairs") {
  for (int i = 0; i < 10000; ++i) {
    const double xi = uniform(-0.999, 0.999);
    double x = uniform(-0.999, 0.999);
    if (x == xi) x += 1e-7;
    CHECK(green(xi, x) > 0.0);
  }
}

TEST_CASE("property: G(x,.) does not increase to the right of the pole") {
  for (int i = 0; i < 10000; ++i) {
    double t[3] = {uniform(-0.999, 0.999), uniform(-0.999, 0.999), uniform(-0.999, 0.999)};
    std::sort(t, t + 3);
    if (t[0] == t[1] || t[1] == t[2]) continue;
    CHECK(green(t[0], t[2]) - green(t[0], t[1]) <= 1e-14);
  }
}

TEST_CASE("property: derivatives match centered differences") {
  const double step = 1e-6;
  for (int i = 0; i < 2000; ++i) {
    const double xi = uniform(-0.9, 0.9);
    double x = uniform(-0.9, 0.9);
    if (std::abs(x - xi) < 0.05) continue;

    const double fd_g = (green(xi, x + step) - green(xi, x - step)) / (2.0 * step);
    const double an_g = green_dx(xi, x);
    CHECK(std::abs(fd_g - an_g) <= 1e-6 * std::max(1.0, std::abs(an_g)));

    const double fd_h = (robin(xi + step, x) - robin(xi - step, x)) / (2.0 * step);
    const double an_h = robin_dxi(xi, x);
    CHECK(std::abs(fd_h - an_h) <= 1e-6 * std::max(1.0, std::abs(an_h)));
  }
  // exterior branch of dH/dxi against the closed form H = (1/pi) log|x-xi|
  for (int i = 0; i < 2000; ++i) {
    const double xi = uniform(-0.9, 0.9);
    const double x = uniform(1.05, 3.0) * (i % 2 == 0 ? 1.0 : -1.0);
    const double fd = (std::log(std::abs(x - (xi + step))) - std::log(std::abs(x - (xi - step)))) /
                      (2.0 * pi * step);
    CHECK(std::abs(fd - robin_dxi(xi, x)) <= 1e-6 * std::max(1.0, std::abs(fd)));
  }
}
