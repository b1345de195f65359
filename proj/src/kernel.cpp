#include "spcap/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace spcap {

namespace {

constexpr double kPi = std::numbers::pi;

double poisson_const(int n) { return std::tgamma(0.5 * (n + 1)) * std::pow(kPi, -0.5 * (n + 1)); }

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace

std::string to_string(KernelMethod m) {
  switch (m) {
    case KernelMethod::Auto: return "auto";
    case KernelMethod::ClosedForm: return "closed_form";
    case KernelMethod::RadialQuadrature: return "radial_quadrature";
  }
  return "auto";
}

KernelMethod kernel_method_from_string(const std::string& name) {
  if (name == "auto") return KernelMethod::Auto;
  if (name == "closed_form") return KernelMethod::ClosedForm;
  if (name == "radial_quadrature") return KernelMethod::RadialQuadrature;
  throw std::invalid_argument("unknown kernel method '" + name + "'");
}

std::shared_ptr<const StableProfile> stable_profile(int m, double alpha) {
  static std::mutex mtx;
  static std::map<std::pair<int, double>, std::shared_ptr<const StableProfile>> cache;
  std::lock_guard lock(mtx);
  auto& slot = cache[{m, alpha}];
  if (!slot) slot = std::make_shared<const StableProfile>(m, alpha);
  return slot;
}

HeatKernel::HeatKernel(const KernelSpec& spec) : spec_(spec) {
  check_exponent(spec.s);
  if (spec.n < 1) throw std::invalid_argument("spatial dimension must be >= 1");
  if (!(spec.quad_tol > 0.0)) throw std::invalid_argument("quad_tol must be positive");
  const bool has_closed = spec.s == 1.0 || spec.s == 0.5;
  if (spec.method == KernelMethod::ClosedForm && !has_closed)
    throw std::invalid_argument("closed form exists only for s = 1/2 and s = 1");
  closed_ = spec.method == KernelMethod::ClosedForm || (spec.method == KernelMethod::Auto && has_closed);
  if (!closed_) {
    if (spec.n > 2) throw std::invalid_argument("general-s profiles are implemented for n <= 2");
    pn_ = stable_profile(spec.n, alpha());
    pn2_ = stable_profile(spec.n + 2, alpha());
    // Spot check the tables against direct quadrature.
    for (double r : {0.25, 1.3, 3.7}) {
      for (const auto& p : {pn_, pn2_}) {
        const double ref = fourier_profile(p->dim(), alpha(), r);
        if (std::abs((*p)(r) - ref) > spec.quad_tol * std::abs(ref))
          throw std::runtime_error("profile table misses quad_tol");
      }
    }
  }
}

double HeatKernel::radial(int m, double r, double t) const {
  if (t <= 0.0) return 0.0;
  if (closed_) {
    if (spec_.s == 1.0) return std::pow(4.0 * kPi * t, -0.5 * m) * std::exp(-r * r / (4.0 * t));
    return poisson_const(m) * t / std::pow(r * r + t * t, 0.5 * (m + 1));
  }
  const StableProfile* p = m == spec_.n ? pn_.get() : m == spec_.n + 2 ? pn2_.get() : nullptr;
  if (!p) throw std::invalid_argument("profile dimension not prepared");
  const double ta = std::pow(t, 1.0 / alpha());
  return std::pow(ta, -m) * (*p)(r / ta);
}

double HeatKernel::value(std::span<const double> x, double t) const {
  return radial(spec_.n, norm2(x), t);
}

double HeatKernel::grad_factor(double r, double t) const {
  if (t <= 0.0) return 0.0;
  if (closed_) {
    if (spec_.s == 1.0) return -radial(spec_.n, r, t) / (2.0 * t);
    const int n = spec_.n;
    return -(n + 1) * poisson_const(n) * t / std::pow(r * r + t * t, 0.5 * (n + 3));
  }
  return -2.0 * kPi * radial(spec_.n + 2, r, t);
}

void HeatKernel::grad(std::span<const double> x, double t, std::span<double> out) const {
  const double r = norm2(x);
  if (t == 0.0 && r == 0.0) throw std::domain_error("gradient is singular at the space-time origin");
  const double f = grad_factor(r, t);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = f * x[i];
}

const HeatKernel& kernel_for(const KernelSpec& spec) {
  static std::mutex mtx;
  static std::map<std::tuple<int, double, int, double>, std::unique_ptr<HeatKernel>> cache;
  std::lock_guard lock(mtx);
  auto& slot = cache[{spec.n, spec.s, static_cast<int>(spec.method), spec.quad_tol}];
  if (!slot) slot = std::make_unique<HeatKernel>(spec);
  return *slot;
}

double ps_eval(const KernelSpec& spec, const SPoint& p) {
  if (static_cast<int>(p.dim()) != spec.n) throw std::invalid_argument("dimension mismatch");
  return kernel_for(spec).value(p.x, p.t);
}

std::vector<double> grad_ps_eval(const KernelSpec& spec, const SPoint& p) {
  if (static_cast<int>(p.dim()) != spec.n) throw std::invalid_argument("dimension mismatch");
  std::vector<double> g(p.dim());
  kernel_for(spec).grad(p.x, p.t, g);
  return g;
}

std::vector<double> conj_grad_eval(const KernelSpec& spec, const SPoint& p) {
  SPoint q = p;
  for (auto& v : q.x) v = -v;
  q.t = -q.t;
  return grad_ps_eval(spec, q);
}

void RatioStats::add(double v) {
  if (count == 0) {
    sup = inf = v;
  } else {
    sup = std::max(sup, v);
    inf = std::min(inf, v);
  }
  ++count;
}

std::vector<SPoint> default_audit_grid(int n, int per_axis) {
  std::vector<SPoint> grid;
  const double dir = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < per_axis; ++i) {
    const double r = 0.1 * std::pow(100.0, i / double(per_axis - 1));
    for (int j = 0; j < per_axis; ++j) {
      const double t = 0.01 * std::pow(1000.0, j / double(per_axis - 1));
      grid.emplace_back(std::vector<double>(n, r * dir), t);
    }
  }
  return grid;
}

std::vector<SPoint> cone_audit_grid(int n, double s, int per_axis, double aperture) {
  std::vector<SPoint> grid;
  const double dir = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < per_axis; ++j) {
    const double t = 0.01 * std::pow(1000.0, j / double(per_axis - 1));
    const double reach = aperture * std::pow(t, 0.5 / s);
    for (int i = 0; i < per_axis; ++i) {
      const double r = reach * std::pow(0.01, 1.0 - i / double(per_axis - 1));
      grid.emplace_back(std::vector<double>(n, r * dir), t);
    }
  }
  return grid;
}

KernelAudit kernel_bound_audit(const KernelSpec& spec, const std::vector<SPoint>& grid) {
  const HeatKernel& K = kernel_for(spec);
  const int n = spec.n;
  const double s = spec.s;
  KernelAudit out;
  out.holder_exponent = std::min(1.0, 2.0 * s);
  std::vector<double> g(n), g2(n), gp(n), gm(n);
  for (const auto& p : grid) {
    if (p.t <= 0.0) continue;  // every bound is trivial or vacuous there
    const double r = norm2(p.x);
    const double rho = sp_norm(p, s);
    const double P = K.value(p.x, p.t);
    out.bg.add(P / (p.t / std::pow(r * r + std::pow(p.t, 1.0 / s), 0.5 * (n + 2 * s))));
    if (r == 0.0) continue;
    K.grad(p.x, p.t, g);
    out.gradient.add(norm2(g) / (r * p.t / std::pow(rho, n + 2 * s + 2)));

    const double h = 1e-4 * p.t;
    K.grad(p.x, p.t + h, gp);
    K.grad(p.x, p.t - h, gm);
    for (int i = 0; i < n; ++i) g2[i] = (gp[i] - gm[i]) / (2 * h);
    out.dt_gradient.add(norm2(g2) / (r / std::pow(rho, n + 2 * s + 2)));

    // Admissible partners at parabolic distance rho/2^k, mixing space and time shifts.
    for (int k = 1; k <= 4; ++k) {
      const double d = rho / std::pow(2.0, k + 0.0);
      for (int variant = 0; variant < 3; ++variant) {
        SPoint q = p;
        if (variant != 1) q.x[0] += (variant == 0 ? d : -d);
        if (variant != 0) q.t += (variant == 1 ? 1.0 : -1.0) * std::pow(d, 2 * s);
        const double dist = sp_dist(p, q, s);
        if (dist == 0.0 || dist > rho / 2 || q.t <= 0.0) continue;
        K.grad(q.x, q.t, g2);
        double diff = 0.0;
        for (int i = 0; i < n; ++i) diff += (g[i] - g2[i]) * (g[i] - g2[i]);
        const double bound =
            std::pow(dist, out.holder_exponent) / std::pow(rho, n + 1 + out.holder_exponent);
        out.holder.add(std::sqrt(diff) / bound);
      }
    }
  }
  return out;
}

}  // namespace spcap
