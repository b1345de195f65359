#include <doctest.h>

#include <cmath>
#include <vector>

#include "spcap/operator.hpp"
#include "spcap/random.hpp"

using namespace spcap;

namespace {

CantorTree small_tree(int n, double s, std::vector<double> lambdas) {
  SParams p;
  p.n = n;
  p.s = s;
  p.d = min_branching(s);
  p.tau0 = default_tau0(p.d);
  return CantorTree::build(p, std::move(lambdas));
}

Box make_box(std::vector<double> lo, std::vector<double> hi, double tlo, double thi) {
  Box b;
  b.lo = std::move(lo);
  b.hi = std::move(hi);
  b.tlo = tlo;
  b.thi = thi;
  return b;
}

// Largest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
double jacobi_top(std::vector<double> a, std::size_t N) {
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) off += a[p * N + q] * a[p * N + q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) {
        const double apq = a[p * N + q];
        if (apq == 0.0) continue;
        const double th = (a[q * N + q] - a[p * N + p]) / (2 * apq);
        const double t = (th >= 0 ? 1.0 : -1.0) / (std::abs(th) + std::sqrt(th * th + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < N; ++k) {
          const double akp = a[k * N + p], akq = a[k * N + q];
          a[k * N + p] = c * akp - s * akq;
          a[k * N + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < N; ++k) {
          const double apk = a[p * N + k], aqk = a[q * N + k];
          a[p * N + k] = c * apk - s * aqk;
          a[q * N + k] = s * apk + c * aqk;
        }
      }
  }
  double top = a[0];
  for (std::size_t i = 1; i < N; ++i) top = std::max(top, a[i * N + i]);
  return top;
}

}  // namespace

TEST_SUITE("operator") {

TEST_CASE("box field: closed spatial integral against tensor quadrature") {
  for (double s : {0.75, 1.0}) {
    const BoxFieldEvaluator ev(1, s);
    REQUIRE(ev.analytic());
    const Box b = make_box({0.2}, {0.5}, 0.1, 0.3);
    for (const SPoint& p : {SPoint({0.9}, 0.6), SPoint({0.35}, 0.5), SPoint({0.3}, 0.2), SPoint({-0.4}, 1.5)})
      for (bool conj : {false, true}) {
        std::vector<double> a(1), d(1);
        ev.field(b, p, conj, a);
        ev.field_direct(b, p, conj, 24, 30, d);
        CHECK(std::abs(a[0] - d[0]) <= 1e-7 * std::abs(d[0]) + 1e-14);
      }
  }
}

TEST_CASE("box field in two dimensions: face reduction against tensor quadrature") {
  const BoxFieldEvaluator ev(2, 0.75);
  const Box b = make_box({0.0, 0.1}, {0.3, 0.4}, 0.0, 0.2);
  for (const SPoint& p : {SPoint({0.6, 0.5}, 0.5), SPoint({0.15, 0.2}, 0.3), SPoint({-0.2, 0.3}, 0.9)}) {
    std::vector<double> f(2), d(2);
    ev.field_faces(b, p, false, 16, 20, f);
    ev.field_direct(b, p, false, 16, 20, d);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(f[i] - d[i]) <= 1e-6 * std::abs(d[i]) + 1e-12);
  }
}

TEST_CASE("Gaussian product reduction in two dimensions against tensor quadrature") {
  const BoxFieldEvaluator ev(2, 1.0);
  const Box b = make_box({0.2, 0.3}, {0.5, 0.6}, 0.1, 0.19);
  for (const SPoint& p : {SPoint({0.3, 0.4}, 0.15), SPoint({0.9, -0.2}, 0.5), SPoint({0.35, 0.45}, 0.6),
                          SPoint({0.1, 0.7}, 0.12)})
    for (bool conj : {false, true}) {
      const SPoint q = conj ? SPoint(p.x, 0.29 - p.t) : p;
      std::vector<double> f(2), d(2);
      ev.field(b, q, conj, f);
      ev.field_direct(b, q, conj, 12, 12, d);
      for (int i = 0; i < 2; ++i) CHECK(std::abs(f[i] - d[i]) <= 1e-7 * std::hypot(d[0], d[1]) + 1e-14);
    }
}

TEST_CASE("field vanishes before the source in time and flips for the conjugate") {
  const BoxFieldEvaluator ev(1, 1.0);
  const Box b = make_box({0.0}, {1.0}, 0.5, 0.7);
  std::vector<double> f(1);
  ev.field(b, SPoint({0.3}, 0.4), false, f);
  CHECK(f[0] == 0.0);
  ev.field(b, SPoint({0.3}, 0.8), true, f);
  CHECK(f[0] == 0.0);
}

TEST_CASE("serial and parallel passes agree bit for bit") {
  const CantorTree t = small_tree(1, 1.0, {0.3, 0.3});
  const SingularOperator op(t, {}, KernelMethod::Auto, 3);
  const PassResult a = op.pass({}, false, true, true, false, true);
  const PassResult b = op.pass({}, false, true, true, true, true);
  CHECK(a.avg == b.avg);
  CHECK(a.l2 == b.l2);
  CHECK(a.matrix == b.matrix);
  CHECK(a.node_values == b.node_values);
  CHECK(a.gram == b.gram);
  const SingularOperator one(t, {}, KernelMethod::Auto, 1);
  CHECK(one.pass({}, false, false, false, true, true).gram == b.gram);
}

TEST_CASE("averaged matrix reproduces the field averages") {
  const CantorTree t = small_tree(1, 0.75, {0.3, 0.25});
  const SingularOperator op(t);
  const PairKernelMatrix M = op.averaged_matrix();
  const EnergyResult e = op.energy();
  const std::vector<double> ones(op.size(), 1.0);
  const CubeVector avg = M.apply(ones);
  double scale = 0.0;
  for (double v : e.averages.values) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < avg.values.size(); ++i)
    CHECK(std::abs(avg.values[i] - e.averages.values[i]) <= 1e-10 * scale);
}

TEST_CASE("piecewise operator norm") {
  GramMatrix one;
  one.N = 1;
  one.data = {0.36};
  const std::vector<double> m{0.25};
  CHECK(op_norm_piecewise(one, m).value == doctest::Approx(1.2).epsilon(1e-14));

  const CantorTree t = small_tree(1, 1.0, {0.3});
  const SingularOperator op(t);
  const GramMatrix G = op.gram_matrix();
  const std::vector<double> masses(G.N, t.leaf_mass());
  const OpNormResult r = op_norm_piecewise(G, masses);
  CHECK(r.converged);
  // dense eigenvalue oracle on D^(-1/2) G D^(-1/2)
  std::vector<double> S(G.N * G.N);
  for (std::size_t b = 0; b < G.N; ++b)
    for (std::size_t c = 0; c < G.N; ++c) S[b * G.N + c] = G.at(b, c) / t.leaf_mass();
  CHECK(r.value == doctest::Approx(std::sqrt(jacobi_top(S, G.N))).epsilon(1e-7));
  // Rayleigh quotients never exceed it; f = 1 gives the L2 norm of the field
  auto rng = make_stream(2, "rayleigh");
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> f(G.N);
    for (double& v : f) v = uniform(rng, -1, 1);
    double num = 0.0, den = 0.0;
    for (std::size_t b = 0; b < G.N; ++b) {
      den += t.leaf_mass() * f[b] * f[b];
      for (std::size_t c = 0; c < G.N; ++c) num += f[b] * G.at(b, c) * f[c];
    }
    CHECK(std::sqrt(num / den) <= r.value * (1 + 1e-10));
  }
  CHECK(r.value >= std::sqrt(op.l2_norm_sq()) * (1 - 1e-10));
}

TEST_CASE("conjugate energy equals the energy of the time-mirrored set") {
  const CantorTree t = small_tree(1, 1.0, {0.3, 0.35});
  const SingularOperator op(t), mir(t.time_mirrored());
  CHECK(op.l2_norm_sq({}, true) == doctest::Approx(mir.l2_norm_sq()).epsilon(1e-8));
}

TEST_CASE("generation zero energy against Monte Carlo") {
  const CantorTree t = small_tree(1, 1.0, {});
  const SingularOperator op(t, QuadratureSpec{}.doubled());
  const double l2 = op.l2_norm_sq();
  CHECK(l2 > 0.0);
  const BoxFieldEvaluator& ev = op.evaluator();
  const Box q0 = t.root().box();
  auto rng = make_stream(7, "monte-carlo");
  double acc = 0.0;
  const int N = 1000000;
  std::vector<double> f(1);
  for (int i = 0; i < N; ++i) {
    ev.field(q0, SPoint({uniform01(rng)}, uniform01(rng)), false, f);
    acc += f[0] * f[0];
  }
  CHECK(acc / N == doctest::Approx(l2).epsilon(0.01));
}

TEST_CASE("cancellation on a tree cube is small") {
  const CantorTree t = small_tree(1, 1.0, {0.3});
  const SingularOperator op(t);
  const CancellationResult c = op.cancellation(t.root().box());
  CHECK(c.abs_integral > 0.0);
  CHECK(c.relative < 1e-10);
}

TEST_CASE("truncated field is one-dimensional only") {
  const CantorTree t2 = small_tree(2, 1.0, {0.3});
  const SingularOperator op(t2);
  CHECK_THROWS(op.field({}, SPoint({0.5, 0.5}, 2.0), 0.1));
  const CantorTree t1 = small_tree(1, 1.0, {0.3});
  const SingularOperator op1(t1);
  // a truncation radius beyond the support leaves nothing
  const auto f = op1.field({}, SPoint({0.5}, 0.5), 10.0);
  CHECK(f[0] == 0.0);
}

}  // TEST_SUITE
