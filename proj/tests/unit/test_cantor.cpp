#include <doctest.h>

#include <cmath>

#include "spcap/cantor.hpp"
#include "spcap/random.hpp"

using namespace spcap;

namespace {

int scan_branching(double s) {
  for (int d = 2;; ++d)
    if (d + 1 < std::pow(d, 2 * s)) return d;
}

SParams params(int n, double s, int d = 0) {
  SParams p;
  p.n = n;
  p.s = s;
  p.d = d ? d : min_branching(s);
  p.tau0 = default_tau0(p.d);
  return p;
}

// mu_k of a box by summing Lebesgue fractions over every leaf.
double brute_mass(const CantorTree& tree, const Box& b) {
  const int n = tree.n();
  const double side = tree.ell(tree.k()), ext = std::pow(side, 2 * tree.s());
  double total = 0.0;
  for (std::size_t c = 0; c < tree.leaves(); ++c) {
    double frac = std::max(0.0, std::min(b.thi, tree.leaf_t()[c] + ext) - std::max(b.tlo, tree.leaf_t()[c])) / ext;
    for (int i = 0; i < n; ++i) {
      const double x = tree.leaf_x()[c * n + i];
      frac *= std::max(0.0, std::min(b.hi[i], x + side) - std::max(b.lo[i], x)) / side;
    }
    total += frac * tree.leaf_mass();
  }
  return total;
}

}  // namespace

TEST_SUITE("cantor") {

TEST_CASE("minimal branching") {
  CHECK(min_branching(1.0) == 2);
  CHECK(min_branching(0.75) == 3);
  CHECK(min_branching(0.6) == 4);
  for (double s = 0.55; s <= 1.0; s += 0.01) CHECK(min_branching(s) == scan_branching(s));
  CHECK_THROWS(min_branching(0.5));
  CHECK_THROWS(min_branching(1.1));
}

TEST_CASE("first generation intervals") {
  const CantorTree t = CantorTree::build(params(1, 1.0, 2), {0.3});
  REQUIRE(t.leaves() == 6);
  const double xs[] = {0.0, 0.7}, ts[] = {0.0, 0.455, 0.91};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 3; ++b) {
      const std::vector<int> digits{a * 3 + b};
      const SPCube q = t.cube_of(digits);
      CHECK(q.corner().x[0] == doctest::Approx(xs[a]).epsilon(1e-15));
      CHECK(q.corner().t == doctest::Approx(ts[b]).epsilon(1e-15));
      CHECK(q.side() == doctest::Approx(0.3));
      CHECK(q.temporal_extent() == doctest::Approx(0.09));
    }
  const SPCube q = t.cube_of(std::vector<int>{1 * 3 + 2});
  CHECK(q.corner().x[0] == doctest::Approx(0.7));
  CHECK(q.corner().t == doctest::Approx(0.91));
  CHECK(t.cube_of(std::vector<int>{}).side() == 1.0);
  CHECK_THROWS(t.cube_of(std::vector<int>{6}));
  CHECK(CantorTree::build_constant(params(1, 1.0, 2), 0.3, 2).leaves() == 36);
  CHECK(CantorTree::build_constant(params(1, 1.0, 2), 0.3, 0).leaves() == 1);
}

TEST_CASE("densities and the critical ratio") {
  const CantorTree t = CantorTree::build_constant(params(1, 1.0, 2), 0.3, 5);
  CHECK(t.theta(0) == 1.0);
  for (int j = 1; j <= 5; ++j) CHECK(t.theta(j) == doctest::Approx(std::pow(0.54, -j)).epsilon(1e-13));
  CHECK_THROWS(t.theta(6));
  CHECK(critical_ratio(params(1, 1.0, 2)) == doctest::Approx(std::pow(6.0, -0.5)).epsilon(1e-15));
  CHECK(critical_ratio(params(2, 1.0, 2)) == doctest::Approx(std::pow(12.0, -1.0 / 3)).epsilon(1e-15));
  CHECK(critical_ratio(params(1, 1.0, 2)) == doctest::Approx(0.40825).epsilon(1e-5));
  for (int n : {1, 2}) {
    SParams p = params(n, 1.0, 2);
    p.tau0 = 0.49;
    const CantorTree c = CantorTree::build_constant(p, critical_ratio(p), 4);
    for (int j = 0; j <= 4; ++j) CHECK(c.theta(j) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("admissibility") {
  CHECK_THROWS(CantorTree::build(params(1, 1.0, 2), {0.6}));
  CHECK_THROWS(CantorTree::build(params(1, 1.0, 2), {0.0}));
  SParams bad = params(1, 0.75, 2);
  CHECK_THROWS(bad.validate());
}

TEST_CASE("measure of boxes") {
  const CantorTree t = CantorTree::build(params(1, 0.75), {0.3, 0.2, 0.25});
  CHECK(t.mu_of_cube(t.root()) == doctest::Approx(1.0).epsilon(1e-14));
  for (int j = 0; j <= 3; ++j)
    CHECK(t.mu_of_cube(t.cube_at(j, t.count(j) / 2)) == doctest::Approx(std::pow(12.0, -j)).epsilon(1e-13));
  Box far;
  far.lo = {2.0};
  far.hi = {3.0};
  far.tlo = 0.0;
  far.thi = 1.0;
  CHECK(t.mu_of_box(far) == 0.0);
  auto rng = make_stream(3, "boxes");
  for (int i = 0; i < 200; ++i) {
    Box b;
    const double x = uniform(rng, -0.2, 1.0), tt = uniform(rng, -0.2, 1.0);
    b.lo = {x};
    b.hi = {x + uniform(rng, 0.0, 0.6)};
    b.tlo = tt;
    b.thi = tt + uniform(rng, 0.0, 0.6);
    CHECK(t.mu_of_box(b) == doctest::Approx(brute_mass(t, b)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("children partition the parent mass") {
  const CantorTree t = CantorTree::build_constant(params(2, 1.0, 2), 0.35, 2);
  for (std::size_t q = 0; q < t.count(1); ++q) {
    double sum = 0.0;
    for (std::size_t c = 0; c < t.branching(); ++c) sum += t.mu_of_cube(t.cube_at(2, q * t.branching() + c));
    CHECK(sum == doctest::Approx(t.mu_of_cube(t.cube_at(1, q))).epsilon(1e-12));
  }
}

TEST_CASE("growth") {
  SParams p = params(1, 1.0, 2);
  p.tau0 = 0.49;
  const CantorTree t = CantorTree::build_constant(p, critical_ratio(p), 4);
  auto rng = make_stream(1, "growth");
  const GrowthReport g = growth_check(t, 10000, 1.0, rng);
  CHECK(g.within_claimed());
  CHECK(g.within_proven());
  CHECK(g.max_ratio > 0.0);
}

TEST_CASE("doubling search") {
  const CantorTree t = CantorTree::build(params(1, 1.0, 2), {0.3, 0.3, 0.3});
  const double f = std::pow(3.0, 3);
  for (std::size_t c = 0; c < t.leaves(); c += 7) {
    const SPCube q = t.cube_at(3, c);
    const auto j0 = doubling_search(t, q);
    REQUIRE(j0.has_value());
    auto mass = [&](int j) { return t.mu_of_cube(sp_dilate(q, std::pow(3.0, j))); };
    CHECK(mass(*j0 + 1) <= f * mass(*j0));
    for (int j = 1; j <= *j0; ++j) CHECK(mass(j) > f * mass(j - 1));
  }
  const SPCube off(SPoint({50.0}, 50.0), 0.01, 1.0);
  CHECK_FALSE(doubling_search(t, off, 3).has_value());
}

TEST_CASE("small boundaries") {
  // generation zero is Lebesgue measure on the unit cube
  const CantorTree leb = CantorTree::build(params(1, 1.0, 2), {});
  const SPCube q(SPoint({0.3}, 0.3), 0.2, 1.0);
  const std::vector<double> alphas{0.01, 0.05, 0.1, 0.3};
  CHECK(small_boundary_check(leb, q, 10.0, alphas).pass);
  const SmallBoundaryResult sat = small_boundary_check(leb, q, 1.0, std::vector<double>{1.0, 2.0});
  CHECK(sat.pass);
  CHECK_FALSE(small_boundary_check(leb, q, 0.5, std::vector<double>{1.0}).pass);
  const SPCube off(SPoint({5.0}, 5.0), 0.2, 1.0);
  CHECK(small_boundary_check(leb, off, 1.0, alphas).vacuous);
}

TEST_CASE("time mirror") {
  const CantorTree t = CantorTree::build(params(1, 1.0, 2), {0.3, 0.25});
  const CantorTree m = t.time_mirrored();
  CHECK(m.mirrored());
  const double ext = std::pow(t.ell(2), 2.0);
  for (std::size_t c = 0; c < t.leaves(); ++c) {
    CHECK(m.leaf_x()[c] == t.leaf_x()[c]);
    CHECK(m.leaf_t()[c] == doctest::Approx(1.0 - t.leaf_t()[c] - ext).epsilon(1e-14));
  }
}

}  // TEST_SUITE
