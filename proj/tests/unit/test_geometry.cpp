#include <doctest.h>

#include <cmath>
#include <limits>

#include "spcap/geometry.hpp"
#include "spcap/random.hpp"

using namespace spcap;

namespace {

SPoint pt(double x, double t) { return SPoint({x}, t); }

// Dense sampling of the boundary of a one-dimensional parabolic rectangle.
double sampled_boundary_dist(const SPoint& p, const SPCube& q, double s, int per_edge = 20000) {
  const Box b = q.box();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= per_edge; ++i) {
    const double u = static_cast<double>(i) / per_edge;
    const double x = b.lo[0] + u * (b.hi[0] - b.lo[0]);
    const double t = b.tlo + u * (b.thi - b.tlo);
    for (const SPoint& y : {pt(x, b.tlo), pt(x, b.thi), pt(b.lo[0], t), pt(b.hi[0], t)})
      best = std::min(best, sp_dist(p, y, s));
  }
  return best;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("distance examples") {
  for (double s : {0.3, 0.75, 1.0}) CHECK(sp_dist(pt(0, 0), pt(1, 1), s) == 1.0);
  CHECK(sp_dist(pt(0, 0), pt(0.5, 0.2), 0.75) == doctest::Approx(0.5));
  CHECK(std::pow(0.2, 2.0 / 3.0) < 0.5);
  CHECK(sp_dist(pt(0.3, 0.4), pt(0.3, 0.4), 0.6) == 0.0);
  CHECK(sp_norm(pt(0, 0), 1.0) == 0.0);
  CHECK(sp_norm(pt(1, 0), 1.0) == 1.0);
  CHECK(sp_norm(pt(0, 4), 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS(sp_dist(pt(0, 0), pt(1, 1), 0.0));
  CHECK_THROWS(sp_dist(pt(0, 0), pt(1, 1), 1.5));
}

// The time branch |t|^(1/(2s)) is subadditive only for s >= 1/2; below that
// the distance is a quasi-metric, which is all the s < 1/2 kernel code needs.
TEST_CASE("metric axioms and homogeneity on random triples") {
  auto rng = make_stream(11, "geometry");
  for (int i = 0; i < 1000; ++i) {
    const double s = uniform(rng, 0.5, 1.0);
    const int n = 1 + i % 3;
    auto rnd = [&] {
      SPoint p(std::vector<double>(n), uniform(rng, -3, 3));
      for (double& v : p.x) v = uniform(rng, -3, 3);
      return p;
    };
    const SPoint a = rnd(), b = rnd(), c = rnd();
    const double ab = sp_dist(a, b, s), bc = sp_dist(b, c, s), ac = sp_dist(a, c, s);
    CHECK(ab >= 0.0);
    CHECK(ab == sp_dist(b, a, s));
    CHECK(ac <= ab + bc + 1e-12);
    const double lam = uniform(rng, 1e-3, 10.0);
    CHECK(sp_dist(parabolic_scale(a, lam, s), parabolic_scale(b, lam, s), s) ==
          doctest::Approx(lam * ab).epsilon(1e-12));
    double dx = 0.0;
    for (int k = 0; k < n; ++k) dx += (a.x[k] - b.x[k]) * (a.x[k] - b.x[k]);
    const double euclid = std::sqrt(dx + std::pow(std::abs(a.t - b.t), 1.0 / s));
    CHECK(ab <= euclid * (1 + 1e-14));
    CHECK(euclid <= std::sqrt(2.0) * ab * (1 + 1e-14));
  }
}

TEST_CASE("dilation") {
  const SPCube q(SPoint({-0.5}, -0.5), 1.0, 1.0);
  CHECK(sp_dilate(q, 1.0).side() == 1.0);
  const SPCube q2 = sp_dilate(q, 2.0);
  CHECK(q2.side() == doctest::Approx(2.0));
  CHECK(q2.temporal_extent() == doctest::Approx(4.0));
  CHECK(q2.center().x[0] == doctest::Approx(q.center().x[0]));
  CHECK(q2.center().t == doctest::Approx(q.center().t));
  const SPCube a = sp_dilate(sp_dilate(q, 3.0), 3.0), b = sp_dilate(q, 9.0);
  CHECK(a.side() == doctest::Approx(b.side()));
  CHECK(a.corner().t == doctest::Approx(b.corner().t));
  CHECK(a.corner().x[0] == doctest::Approx(b.corner().x[0]));
  CHECK_THROWS(sp_dilate(q, 0.0));
  CHECK_THROWS(sp_dilate(q, -1.0));
}

TEST_CASE("temporal reflection") {
  const SPoint p({0.3, -0.1}, 0.2);
  const SPoint r = temporal_reflect(p, 0.5);
  CHECK(r.t == doctest::Approx(0.8));
  CHECK(r.x == p.x);
  CHECK(temporal_reflect(r, 0.5).t == doctest::Approx(0.2));
  CHECK(temporal_reflect(pt(1, 0.7), 0.7).t == 0.7);
}

TEST_CASE("quasi-triangle inequality below s = 1/2") {
  // (a + b)^q <= 2^(q-1) (a^q + b^q) for q = 1/(2s) >= 1
  auto rng = make_stream(12, "quasi");
  for (int i = 0; i < 1000; ++i) {
    const double s = uniform(rng, 0.2, 0.5), K = std::pow(2.0, 1 / (2 * s) - 1);
    const SPoint a = pt(uniform(rng, -3, 3), uniform(rng, -3, 3)), b = pt(uniform(rng, -3, 3), uniform(rng, -3, 3)),
                 c = pt(uniform(rng, -3, 3), uniform(rng, -3, 3));
    CHECK(sp_dist(a, c, s) <= K * (sp_dist(a, b, s) + sp_dist(b, c, s)) * (1 + 1e-12));
  }
}

TEST_CASE("corner sub-cubes") {
  const SPCube q(SPoint({0.0, 0.0}, 0.0), 1.0, 1.0);
  const SPCube ur = corner_subcube(q, Corner::UpperRight);
  CHECK(ur.side() == 0.25);
  CHECK(ur.corner().x[0] == doctest::Approx(0.75));
  CHECK(ur.corner().x[1] == doctest::Approx(0.75));
  CHECK(ur.corner().t == doctest::Approx(0.9375));
  const SPCube ll = corner_subcube(q, Corner::LowerLeft);
  CHECK(ll.corner().x[0] == 0.0);
  CHECK(ll.corner().t == 0.0);
  CHECK(ll.side() == 0.25);
  CHECK(intersect(ur.box(), ll.box()).empty());
}

TEST_CASE("boundary distance") {
  const SPCube unit(pt(0, 0), 1.0, 1.0);
  CHECK(boundary_dist(pt(0.5, 0.5), unit, 1.0) == doctest::Approx(0.5));
  CHECK(boundary_dist(pt(0.0, 0.3), unit, 1.0) == 0.0);
  CHECK(boundary_dist(pt(0.4, 1.0), unit, 1.0) == 0.0);
  auto rng = make_stream(5, "boundary");
  for (int i = 0; i < 40; ++i) {
    const double s = uniform(rng, 0.55, 1.0);
    const SPCube q(pt(uniform(rng, -1, 1), uniform(rng, -1, 1)), uniform(rng, 0.2, 2.0), s);
    const SPoint p = pt(uniform(rng, -3, 3), uniform(rng, -3, 3));
    const double exact = boundary_dist(p, q, s);
    const double sampled = sampled_boundary_dist(p, q, s);
    // the sampled value is an upper bound within the sampling resolution
    CHECK(exact <= sampled + 1e-12);
    CHECK(sampled - exact <= 2e-3 * std::max(1.0, q.side()));
  }
}

}  // TEST_SUITE
