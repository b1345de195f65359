#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "spcap/geometry.hpp"
#include "spcap/profile.hpp"

namespace spcap {

enum class KernelMethod { Auto, ClosedForm, RadialQuadrature };

struct KernelSpec {
  int n = 1;
  double s = 1.0;
  KernelMethod method = KernelMethod::Auto;  // closed form when available
  double quad_tol = 1e-9;
};

std::string to_string(KernelMethod m);
KernelMethod kernel_method_from_string(const std::string& name);

/// Shared, cached profile for (m, 2s).
std::shared_ptr<const StableProfile> stable_profile(int m, double alpha);

/// Fractional heat kernel P_s on R^n x R and its spatial gradient.
/// Convention: P(., t) is the inverse transform of exp(-t (2 pi |xi|)^(2s)).
class HeatKernel {
 public:
  explicit HeatKernel(const KernelSpec& spec);

  const KernelSpec& spec() const { return spec_; }
  bool closed_form() const { return closed_; }
  double alpha() const { return 2.0 * spec_.s; }

  /// P^(m)(r, t) for a radial argument r = |x| in R^m.
  double radial(int m, double r, double t) const;
  double value(std::span<const double> x, double t) const;
  /// grad_x P(x, t) = factor(|x|, t) * x.
  double grad_factor(double r, double t) const;
  void grad(std::span<const double> x, double t, std::span<double> out) const;

 private:
  KernelSpec spec_;
  bool closed_;
  std::shared_ptr<const StableProfile> pn_, pn2_;
};

/// Cached kernel instance per spec; safe to share across threads.
const HeatKernel& kernel_for(const KernelSpec& spec);

double ps_eval(const KernelSpec& spec, const SPoint& p);
std::vector<double> grad_ps_eval(const KernelSpec& spec, const SPoint& p);
/// grad_ps_eval at -p.
std::vector<double> conj_grad_eval(const KernelSpec& spec, const SPoint& p);

struct RatioStats {
  double sup = 0.0;
  double inf = 0.0;
  std::size_t count = 0;
  void add(double v);
  double spread() const { return count ? sup / inf : 0.0; }
};

struct KernelAudit {
  RatioStats bg;          // P / [t / (|x|^2 + t^(1/s))^((n+2s)/2)]
  RatioStats gradient;    // |grad P| / [|x t| / |p|^(n+2s+2)]
  RatioStats dt_gradient; // |d_t grad P| / [|x| / |p|^(n+2s+2)]
  RatioStats holder;      // |grad P(p) - grad P(q)| / [|p-q|^(2z) / |p|^(n+1+2z)]
  double holder_exponent = 0.0;  // 2 zeta = min(1, 2s)
};

/// Default audit grid: |x| in [0.1, 10], t in [0.01, 10], geometric.
std::vector<SPoint> default_audit_grid(int n, int per_axis = 8);

/// Points with |x| <= aperture * t^(1/(2s)), |x| spanning two decades below
/// that reach. At s = 1 the lower bracket only exists on such cones.
std::vector<SPoint> cone_audit_grid(int n, double s, int per_axis = 8, double aperture = 4.0);
KernelAudit kernel_bound_audit(const KernelSpec& spec, const std::vector<SPoint>& grid);

}  // namespace spcap
