#include <doctest.h>

#include <cmath>

#include "spcap/box_field.hpp"
#include "spcap/kernel.hpp"
#include "spcap/profile.hpp"
#include "spcap/quadrature.hpp"

using namespace spcap;

namespace {

SPoint pt(double x, double t) { return SPoint({x}, t); }

}  // namespace

TEST_SUITE("kernel") {

TEST_CASE("closed-form values through both routes") {
  for (auto m : {KernelMethod::ClosedForm, KernelMethod::RadialQuadrature}) {
    CHECK(ps_eval({1, 1.0, m, 1e-9}, pt(0, 1)) == doctest::Approx(1 / std::sqrt(4 * M_PI)).epsilon(1e-9));
    CHECK(ps_eval({1, 0.5, m, 1e-9}, pt(1, 1)) == doctest::Approx(1 / (2 * M_PI)).epsilon(1e-9));
  }
  CHECK(ps_eval({1, 1.0}, pt(0.3, -0.1)) == 0.0);
  CHECK(ps_eval({2, 0.75}, SPoint({0.1, 0.2}, 0.0)) == 0.0);
}

TEST_CASE("gradient examples") {
  const double want = -2 / std::sqrt(M_PI) * std::exp(-1.0);
  for (auto m : {KernelMethod::ClosedForm, KernelMethod::RadialQuadrature}) {
    const KernelSpec spec{1, 1.0, m, 1e-9};
    CHECK(grad_ps_eval(spec, pt(1, 0.25))[0] == doctest::Approx(want).epsilon(1e-9));
    CHECK(conj_grad_eval(spec, pt(1, -0.25))[0] == doctest::Approx(-want).epsilon(1e-9));
  }
  CHECK(want == doctest::Approx(-0.41511).epsilon(1e-5));
  // Poisson kernel derivative -2 x t / (pi (x^2 + t^2)^2) at (1, 1)
  const KernelSpec half{1, 0.5, KernelMethod::RadialQuadrature, 1e-9};
  const double g = grad_ps_eval(half, pt(1, 1))[0];
  CHECK(g == doctest::Approx(-1 / (2 * M_PI)).epsilon(1e-9));
  const double h = 1e-5;
  const double fd = (ps_eval(half, pt(1 + h, 1)) - ps_eval(half, pt(1 - h, 1))) / (2 * h);
  CHECK(g == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("gradient is radial and odd") {
  const KernelSpec spec{2, 0.75};
  const auto g = grad_ps_eval(spec, SPoint({0.3, -0.4}, 0.5));
  const auto h = grad_ps_eval(spec, SPoint({-0.3, 0.4}, 0.5));
  CHECK(g[0] / 0.3 == doctest::Approx(g[1] / -0.4).epsilon(1e-14));
  CHECK(g[0] == doctest::Approx(-h[0]).epsilon(1e-15));
}

TEST_CASE("tabulated profiles against direct Fourier inversion") {
  for (int m : {1, 2, 3})
    for (double alpha : {0.8, 1.5, 1.9}) {
      const StableProfile& p = *stable_profile(m, alpha);
      for (double r : {0.0, 0.2, 0.7, 1.9, 4.0, 12.0}) {
        const double want = fourier_profile(m, alpha, r);
        CHECK(p(r) == doctest::Approx(want).epsilon(1e-8));
      }
      // the table and the asymptotic tail meet continuously
      const double rs = p.switch_radius();
      CHECK(p(rs * (1 - 1e-9)) == doctest::Approx(p(rs * (1 + 1e-9))).epsilon(1e-7));
    }
}

TEST_CASE("time-integrated profile") {
  const double alpha = 1.5;
  const TimeIntegratedProfile tip(*stable_profile(1, alpha));
  const KernelSpec spec{1, alpha / 2, KernelMethod::RadialQuadrature, 1e-9};
  for (double z : {0.05, 0.4, 2.0})
    for (double T : {0.1, 1.0, 3.0}) {
      const Rule1D r = graded_rule(0.0, T, 20, 25, Grading::Left);
      const double want = r.integrate([&](double tau) { return ps_eval(spec, pt(z, tau)); });
      CHECK(tip.G(z, T) == doctest::Approx(want).epsilon(1e-8));
    }
}

TEST_CASE("exponent range and method names") {
  CHECK_THROWS(HeatKernel({1, 0.1}));
  CHECK_THROWS(HeatKernel({1, 1.2}));
  CHECK_NOTHROW(HeatKernel({1, 0.2}));
  for (auto m : {KernelMethod::Auto, KernelMethod::ClosedForm, KernelMethod::RadialQuadrature})
    CHECK(kernel_method_from_string(to_string(m)) == m);
  CHECK_THROWS(kernel_method_from_string("spline"));
  CHECK_THROWS(HeatKernel({1, 0.75, KernelMethod::ClosedForm}));
}

TEST_CASE("two-sided comparison at s = 1/2 is an identity up to a constant") {
  for (int n : {1, 2}) {
    const auto a = kernel_bound_audit({n, 0.5}, default_audit_grid(n));
    CHECK(a.bg.spread() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::isfinite(a.gradient.sup));
  }
  const auto b = kernel_bound_audit({1, 0.75}, default_audit_grid(1));
  CHECK(b.bg.inf > 0.0);
  CHECK(std::isfinite(b.holder.sup));
  CHECK(b.holder_exponent == doctest::Approx(1.0));
}

}  // TEST_SUITE
