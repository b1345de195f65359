#pragma once

#include <vector>

#include "spcap/quadrature.hpp"

namespace spcap {

/// p(r) = (2 pi)^-m int_{R^m} e^{i x.w} e^{-|w|^alpha} dw at |x| = r, evaluated
/// by direct radial quadrature. Slow; used to build tables and as an oracle.
double fourier_profile(int m, double alpha, double r);

/// Radial profile of the isotropic stable density in R^m, so that
/// P^(m)(x, t) = t^(-m/alpha) p(|x| t^(-1/alpha)) with alpha = 2s.
/// Chebyshev tables cover [0, R]; beyond R the asymptotic power series is used.
class StableProfile {
 public:
  StableProfile(int m, double alpha);

  double operator()(double r) const;
  double at_zero() const { return p0_; }
  int dim() const { return m_; }
  double alpha() const { return alpha_; }
  double switch_radius() const { return rswitch_; }

  /// Coefficients a_k of p(r) ~ sum a_k r^(-m - alpha k), k >= 1.
  const std::vector<double>& tail_coeffs() const { return tail_; }
  double tail(double r) const;

 private:
  int m_;
  double alpha_;
  double p0_;
  double rswitch_ = 0.0;
  std::vector<double> tail_;
  ChebyshevTable inner_;  // in r on [0, 1/2]
  ChebyshevTable outer_;  // in ln r on [1/2, rswitch]
};

/// Time integral of the one-dimensional profile, alpha > 1:
///   G(z, T) = int_0^T P(z, tau) dtau = T^(1 - 1/alpha) g(|z| T^(-1/alpha)),
///   g(R) = alpha R^(alpha-1) int_R^inf r^-alpha p(r) dr.
class TimeIntegratedProfile {
 public:
  explicit TimeIntegratedProfile(const StableProfile& p);

  double g(double R) const;
  double G(double z, double T) const;
  double alpha() const { return alpha_; }

 private:
  double alpha_;
  double g0_, g1_;
  double rmin_, rswitch_;
  std::vector<double> tail_;  // coefficients of R^(-alpha k - 1)
  ChebyshevTable table_;      // in ln R on [ln rmin, ln rswitch]
};

}  // namespace spcap
