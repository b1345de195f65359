#pragma once

#include <memory>
#include <span>
#include <vector>

#include "spcap/cantor.hpp"
#include "spcap/kernel.hpp"
#include "spcap/profile.hpp"

namespace spcap {

/// Flattened list of axis-parallel boxes with a scalar coefficient each
/// (measure density times weight).
struct BoxSet {
  int n = 1;
  std::vector<double> lo, hi;    // size() * n
  std::vector<double> tlo, thi;  // size()
  std::vector<double> coef;
  std::vector<std::size_t> leaf; // originating generation-k cube

  std::size_t size() const { return tlo.size(); }
  void push(const Box& b, double c, std::size_t origin);
  Box box(std::size_t i) const;
  double volume(std::size_t i) const;

  /// Generation-k cubes with coefficient w_b / |E_k| (w empty means 1).
  static BoxSet leaves(const CantorTree& tree, std::span<const double> w = {});
  /// Same, clipped to R; empty intersections are dropped.
  static BoxSet clipped(const CantorTree& tree, const Box& R, std::span<const double> w = {});
};

/// F_B(p) = int_B grad_x P(x - y, t - tau) dy dtau, or with the conjugate
/// kernel grad_x P(y - x, tau - t).
class BoxFieldEvaluator {
 public:
  BoxFieldEvaluator(int n, double s, KernelMethod method = KernelMethod::Auto);

  int n() const { return n_; }
  double s() const { return s_; }
  /// True when the spatial integral is done in closed form (n = 1).
  bool analytic() const { return n_ == 1; }

  /// G(z, T) = int_0^T P(z, u) du given Ta = T^(1/(2s)).
  double G(double z, double T, double Ta) const;
  double G(double z, double T) const;

  void field(const double* lo, const double* hi, double tlo, double thi, const double* x, double t,
             bool conjugate, double* out) const;
  void field(const Box& b, const SPoint& p, bool conjugate, std::span<double> out) const;

  /// Tensor graded Gauss-Legendre integration of the kernel itself; works for
  /// every n and serves as the independent check of the n = 1 reduction.
  void field_direct(const Box& b, const SPoint& p, bool conjugate, int order, int levels,
                    std::span<double> out) const;

  /// Spatial integral along each component done exactly (difference of the
  /// kernel on two faces), the rest by graded quadrature; used for n >= 2.
  void field_faces(const Box& b, const SPoint& p, bool conjugate, int order, int levels,
                   std::span<double> out) const;

  /// s = 1 only: the Gaussian factorizes, so each spatial integral is an
  /// error function or a face difference and one time integral remains.
  void field_separable(const double* lo, const double* hi, double tlo, double thi, const double* x, double t,
                       bool conjugate, double* out) const;

  const HeatKernel& kernel() const { return *kernel_; }

 private:
  int n_;
  double s_, alpha_;
  bool gauss_;
  const HeatKernel* kernel_;
  std::unique_ptr<TimeIntegratedProfile> tip_;
};

}  // namespace spcap
