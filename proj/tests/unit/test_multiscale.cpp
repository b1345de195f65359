#include <doctest.h>

#include <cmath>
#include <vector>

#include "spcap/multiscale.hpp"
#include "spcap/random.hpp"

using namespace spcap;

namespace {

SParams params(int n, double s, int d, double tau0) {
  SParams p;
  p.n = n;
  p.s = s;
  p.d = d;
  p.tau0 = tau0;
  return p;
}

CubeVector random_leaves(const CantorTree& t, std::uint64_t seed, double shift = 0.0) {
  auto rng = make_stream(seed, "leaves");
  CubeVector f(t.leaves(), t.n());
  for (double& v : f.values) v = uniform(rng, -1, 1) + shift;
  return f;
}

}  // namespace

TEST_SUITE("multiscale") {

TEST_CASE("differences have zero mean on every parent") {
  const CantorTree t = CantorTree::build(params(1, 1.0, 2, 0.45), {0.3, 0.25, 0.35});
  const MartingaleDecomposition dec = project(t, random_leaves(t, 1));
  for (int j = 0; j < dec.k; ++j)
    for (std::size_t q = 0; q < t.count(j); ++q)
      for (int i = 0; i < dec.n; ++i) {
        double sum = 0.0;
        for (std::size_t c = 0; c < dec.branching; ++c) sum += dec.mass(j + 1) * dec.D[j].at(q * dec.branching + c, i);
        CHECK(std::abs(sum) <= 1e-12);
      }
  CHECK(dec.mass(0) == 1.0);
  CHECK(dec.mass(3) == doctest::Approx(1.0 / 216).epsilon(1e-15));
}

TEST_CASE("orthogonality and telescoping") {
  const CantorTree t = CantorTree::build(params(2, 1.0, 2, 0.45), {0.3, 0.4});
  const MartingaleDecomposition dec = project(t, random_leaves(t, 2));
  CHECK(orthogonality_check(dec) <= 1e-12);
  CHECK(orthogonality_check(dec, 100, 9) <= 1e-12);
  CHECK(telescoping_error(dec) <= 1e-13);
}

TEST_CASE("energy identity") {
  const CantorTree t = CantorTree::build(params(1, 1.0, 2, 0.45), {0.3, 0.3});
  // mean-zero data: the sum of squared differences is the whole energy
  CubeVector f = random_leaves(t, 3);
  double mean = 0.0;
  for (double v : f.values) mean += v;
  mean /= static_cast<double>(f.values.size());
  for (double& v : f.values) v -= mean;
  const EnergyIdentity e = energy_identity_check(project(t, f));
  CHECK(e.holds());
  CHECK(e.rel_diff <= 1e-12);
  CHECK(e.pythagoras_rel <= 1e-12);
  // constant data: the defect is exactly the squared mean and stays within the allowance
  CubeVector c(t.leaves(), 1, 2.5);
  const EnergyIdentity k = energy_identity_check(project(t, c));
  CHECK(k.rhs == doctest::Approx(0.0));
  CHECK(k.mean_sq == doctest::Approx(6.25));
  CHECK(k.rel_diff == doctest::Approx(1.0));
  CHECK(k.holds());
  CHECK(k.pythagoras_rel <= 1e-14);
  CubeVector z(t.leaves(), 1, 0.0);
  CHECK(energy_identity_check(project(t, z)).degenerate);
}

TEST_CASE("stopping scales") {
  const std::vector<double> theta{1, 1, 9, 1};
  CHECK(stop_scales(theta, 3.0, 3) == std::vector<int>{0, 2, 3});
  const ScaleAnalysis a = analyze_scales(theta, {}, 3.0, 10);
  REQUIRE(a.intervals.size() == 2);
  CHECK(a.intervals[0].start == 0);
  CHECK(a.intervals[0].end == 2);
  CHECK(a.intervals[1].start == 2);
  CHECK(a.intervals[1].end == 3);
  CHECK(a.sigma_range(0, 3) == doctest::Approx(83.0));
}

TEST_CASE("critical ratios keep every scale good") {
  SParams p = params(1, 1.0, 2, 0.45);
  const double ls = critical_ratio(p);
  const CantorTree t = CantorTree::build_constant(p, ls, 6);
  CHECK(p_of(t, 0) == doctest::Approx(1.0));
  CHECK(p_of(t, 2) == doctest::Approx(1 + ls + ls * ls).epsilon(1e-14));
  CHECK(p_of(t, 2) == doctest::Approx(1.5749).epsilon(1e-4));
  const ScaleAnalysis a = analyze_scales(t, 100.0, 10);
  for (int j = 0; j <= 6; ++j) {
    CHECK(a.good_scale[j]);
    CHECK(a.p[j] <= 1 / (1 - ls));
  }
  for (const auto& c : lemma_suite(a, 2)) CHECK_MESSAGE(c.pass, c.name);
}

TEST_CASE("densities from ratios") {
  const std::vector<double> l{0.3, 0.2, 0.45, 0.1};
  const CantorTree t = CantorTree::build(params(2, 1.0, 2, 0.45), l);
  const auto th = theta_from_lambdas(l, 2, 2);
  REQUIRE(th.size() == 5);
  for (int j = 0; j <= 4; ++j) CHECK(th[j] == doctest::Approx(t.theta(j)).epsilon(1e-13));
}

TEST_CASE("lemma suite on a long good interval") {
  std::vector<double> theta(30, 1.0), lambdas(29, 0.3);
  const ScaleAnalysis a = analyze_scales(theta, lambdas, 100.0, 10);
  REQUIRE(a.intervals.size() == 1);
  CHECK(a.intervals[0].is_long);
  CHECK(a.intervals[0].good);
  const auto checks = lemma_suite(a, 2);
  CHECK(checks.size() >= 4);
  for (const auto& c : checks) {
    CHECK(c.applicable);
    CHECK_MESSAGE(c.pass, c.name);
  }
}

}  // TEST_SUITE
