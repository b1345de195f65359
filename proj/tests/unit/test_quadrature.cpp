#include <doctest.h>

#include <cmath>
#include <vector>

#include "spcap/quadrature.hpp"

using namespace spcap;

TEST_SUITE("quadrature") {

TEST_CASE("Gauss-Legendre exactness") {
  for (int order : {1, 3, 8, 20}) {
    const Rule1D r = gauss_legendre(order, -0.5, 2.0);
    for (int p = 0; p <= 2 * order - 1; ++p) {
      const double want = (std::pow(2.0, p + 1) - std::pow(-0.5, p + 1)) / (p + 1);
      CHECK(r.integrate([&](double x) { return std::pow(x, p); }) == doctest::Approx(want).epsilon(1e-13));
    }
  }
  CHECK_THROWS(gauss_legendre(0));
}

TEST_CASE("graded rules resolve endpoint singularities") {
  // int_0^1 x^(-1/2) = 2 and int_0^1 log(1 - x) = -1
  const Rule1D left = graded_rule(0.0, 1.0, 10, 30, Grading::Left);
  CHECK(left.integrate([](double x) { return 1 / std::sqrt(x); }) == doctest::Approx(2.0).epsilon(1e-6));
  const Rule1D right = graded_rule(0.0, 1.0, 10, 12, Grading::Right);
  CHECK(right.integrate([](double x) { return std::log(1 - x); }) == doctest::Approx(-1.0).epsilon(1e-8));
  const Rule1D both = graded_rule(0.0, 1.0, 8, 12, Grading::Both);
  double w = 0.0;
  for (double v : both.weights) w += v;
  CHECK(w == doctest::Approx(1.0).epsilon(1e-14));
  const Rule1D comp = composite_rule(0.0, M_PI, 8, 4);
  CHECK(comp.integrate([](double x) { return std::sin(x); }) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("compensated summation") {
  const std::vector<double> v{1e16, 1.0, -1e16, 1.0};
  CHECK(compensated_sum(v) == 2.0);
  CompensatedSum acc;
  for (int i = 0; i < 1000000; ++i) acc.add(0.1);
  CHECK(std::abs(acc.value() - 100000.0) < 1e-9);
}

TEST_CASE("Chebyshev tables") {
  const auto t = ChebyshevTable::build(0.0, 2.0, 4, 16, [](double x) { return std::exp(-x) * std::cos(3 * x); });
  for (double x = 0.0; x <= 2.0; x += 0.0137)
    CHECK(t(x) == doctest::Approx(std::exp(-x) * std::cos(3 * x)).epsilon(1e-12).scale(1.0));
  const auto pts = ChebyshevTable::sample_points(0.0, 1.0, 2, 10);
  std::vector<double> vals;
  for (double p : pts) vals.push_back(p * p);
  const auto u = ChebyshevTable::build_from_values(0.0, 1.0, 2, 10, vals);
  CHECK(u(0.3) == doctest::Approx(0.09).epsilon(1e-14));
}

}  // TEST_SUITE
