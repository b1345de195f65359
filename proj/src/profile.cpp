#include "spcap/profile.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spcap {

namespace {

constexpr double kPi = std::numbers::pi;

// Gamma(nu+1) (2/z)^nu J_nu(z), nu = m/2 - 1; equals 1 at z = 0.
double lambda_bessel(int m, double z) {
  switch (m) {
    case 1:
      return std::cos(z);
    case 3:
      if (z < 1e-3) return 1.0 - z * z / 6.0 + z * z * z * z / 120.0;
      return std::sin(z) / z;
    case 2:
      return std::cyl_bessel_j(0.0, z);
    case 4:
      if (z < 1e-3) return 1.0 - z * z / 8.0 + z * z * z * z / 192.0;
      return 2.0 * std::cyl_bessel_j(1.0, z) / z;
    default: {
      const double nu = 0.5 * m - 1.0;
      if (z < 1e-4) return 1.0 - z * z / (4.0 * (nu + 1.0));
      return std::exp(std::lgamma(nu + 1.0) + nu * std::log(2.0 / z)) * std::cyl_bessel_j(nu, z);
    }
  }
}

double frequency_cutoff(int m, double alpha) {
  const double target = -std::log(1e-22);
  double w = std::pow(target, 1.0 / alpha);
  for (int i = 0; i < 20; ++i)
    w = std::pow(target + (m - 1) * std::log(std::max(w, 1.0)), 1.0 / alpha);
  return w;
}

void check_profile_args(int m, double alpha) {
  if (m < 1) throw std::invalid_argument("profile dimension must be >= 1");
  // Below alpha = 0.4 the frequency cutoff makes radial quadrature impractical.
  if (!(alpha >= 0.4 && alpha <= 2.0))
    throw std::invalid_argument("radial profile supports 2s in [0.4, 2]");
}

}  // namespace

double fourier_profile(int m, double alpha, double r) {
  check_profile_args(m, alpha);
  r = std::abs(r);
  const double cm = 2.0 / (std::pow(4.0 * kPi, 0.5 * m) * std::tgamma(0.5 * m));
  const double h0 = r > 2.5 ? 2.5 / r : 1.0;
  const double W = frequency_cutoff(m, alpha);
  auto f = [&](double w) {
    return lambda_bessel(m, r * w) * std::pow(w, m - 1) * std::exp(-std::pow(w, alpha));
  };
  CompensatedSum acc;
  // The weight exp(-w^alpha) is not smooth at w = 0.
  const Rule1D first = graded_rule(0.0, std::min(h0, W), 24, 14, Grading::Left, 0.2);
  for (std::size_t i = 0; i < first.size(); ++i) acc.add(first.weights[i] * f(first.nodes[i]));
  const Rule1D ref = gauss_legendre(24);
  for (double a = h0; a < W; a += h0) {
    const double b = std::min(a + h0, W);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double panel = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) panel += ref.weights[i] * f(c + h * ref.nodes[i]);
    acc.add(h * panel);
  }
  return cm * acc.value();
}

StableProfile::StableProfile(int m, double alpha) : m_(m), alpha_(alpha) {
  check_profile_args(m, alpha);
  p0_ = std::pow(2.0 * kPi, -m) * 2.0 * std::pow(kPi, 0.5 * m) / std::tgamma(0.5 * m) *
        std::tgamma(m / alpha) / alpha;

  if (alpha == 2.0) {
    rswitch_ = 16.0;  // Gaussian below 1e-25 of its peak here
  } else {
    std::vector<double> coeffs;
    for (int k = 1; k <= 400; ++k) {
      const double sn = std::sin(kPi * alpha * k / 2.0);
      if (std::abs(sn) < 1e-14) {
        coeffs.push_back(0.0);
        continue;
      }
      const double lg = alpha * k * std::log(2.0) - (0.5 * m + 1.0) * std::log(kPi) +
                        std::lgamma(0.5 * (m + alpha * k)) + std::lgamma(1.0 + 0.5 * alpha * k) -
                        std::lgamma(k + 1.0);
      const double sign = (k % 2 == 1) ? 1.0 : -1.0;
      coeffs.push_back(sign * sn * std::exp(lg));
    }
    const double candidates[] = {6, 8, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256};
    for (double R : candidates) {
      double sum = 0.0, biggest = 0.0, prev = INFINITY;
      std::size_t used = 0;
      bool ok = false;
      for (std::size_t k = 0; k < coeffs.size(); ++k) {
        if (coeffs[k] == 0.0) continue;
        const double term = coeffs[k] * std::pow(R, -m - alpha * (k + 1.0));
        if (std::abs(term) > prev) break;  // asymptotic series turned around
        sum += term;
        biggest = std::max(biggest, std::abs(term));
        prev = std::abs(term);
        used = k + 1;
        if (std::abs(term) < 1e-17 * std::abs(sum)) {
          ok = biggest < 1e3 * std::abs(sum);
          break;
        }
      }
      if (ok) {
        rswitch_ = R;
        tail_.assign(coeffs.begin(), coeffs.begin() + used);
        break;
      }
    }
    if (rswitch_ == 0.0) throw std::runtime_error("profile tail series did not converge");
  }

  inner_ = ChebyshevTable::build(0.0, 0.5, 2, 20,
                                 [&](double r) { return fourier_profile(m, alpha, r); });
  const double ua = std::log(0.5), ub = std::log(rswitch_);
  const int panels = static_cast<int>(std::ceil((ub - ua) / 0.25));
  outer_ = ChebyshevTable::build(ua, ub, panels, 16,
                                 [&](double u) { return fourier_profile(m, alpha, std::exp(u)); });
}

double StableProfile::tail(double r) const {
  double acc = 0.0;
  for (std::size_t k = tail_.size(); k-- > 0;)
    acc += tail_[k] * std::pow(r, -alpha_ * (k + 1.0));
  return acc * std::pow(r, -m_);
}

double StableProfile::operator()(double r) const {
  r = std::abs(r);
  if (r <= 0.5) return inner_(r);
  if (r <= rswitch_) return outer_(std::log(r));
  return tail(r);
}

TimeIntegratedProfile::TimeIntegratedProfile(const StableProfile& p)
    : alpha_(p.alpha()), rmin_(1e-7), rswitch_(p.switch_radius()) {
  if (p.dim() != 1) throw std::invalid_argument("time-integrated profile needs the 1-D profile");
  if (!(alpha_ > 1.0)) throw std::invalid_argument("time-integrated profile needs s > 1/2");
  const double a = alpha_;
  g0_ = a * p.at_zero() / (a - 1.0);

  const auto& pc = p.tail_coeffs();
  double h_switch = 0.0;
  tail_.resize(pc.size());
  for (std::size_t k = 0; k < pc.size(); ++k) {
    const double kk = k + 1.0;
    tail_[k] = pc[k] / (kk + 1.0);
    h_switch += pc[k] * std::pow(rswitch_, -a * (kk + 1.0)) / (a * (kk + 1.0));
  }

  // h(R) = h(rswitch) + int_{ln R}^{ln rswitch} e^{(1-a)u} p(e^u) du.
  const double ua = std::log(rmin_), ub = std::log(rswitch_);
  const int panels = static_cast<int>(std::ceil((ub - ua) / 0.25));
  const int degree = 16;
  const double width = (ub - ua) / panels;
  auto integrand = [&](double u) { return std::exp((1.0 - a) * u) * p(std::exp(u)); };
  const Rule1D ref = gauss_legendre(30);
  auto piece = [&](double lo, double hi) {
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    double acc = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) acc += ref.weights[i] * integrand(c + h * ref.nodes[i]);
    return h * acc;
  };
  std::vector<double> from_edge(panels + 1, 0.0);
  for (int e = panels - 1; e >= 0; --e)
    from_edge[e] = from_edge[e + 1] + piece(ua + e * width, ua + (e + 1) * width);

  const auto pts = ChebyshevTable::sample_points(ua, ub, panels, degree);
  std::vector<double> vals(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const int pan = static_cast<int>(i / (degree + 1));
    const double right = ua + (pan + 1) * width;
    const double h = h_switch + from_edge[pan + 1] + piece(pts[i], right);
    vals[i] = a * std::exp((a - 1.0) * pts[i]) * h;
  }
  table_ = ChebyshevTable::build_from_values(ua, ub, panels, degree, vals);
  g1_ = (table_(ua) - g0_) / std::pow(rmin_, a - 1.0);
}

double TimeIntegratedProfile::g(double R) const {
  R = std::abs(R);
  if (R < rmin_) return g0_ + g1_ * std::pow(R, alpha_ - 1.0);
  if (R <= rswitch_) return table_(std::log(R));
  double acc = 0.0;
  for (std::size_t k = tail_.size(); k-- > 0;) acc += tail_[k] * std::pow(R, -alpha_ * (k + 1.0));
  return acc / R;
}

double TimeIntegratedProfile::G(double z, double T) const {
  if (T <= 0.0) return 0.0;
  const double Ta = std::pow(T, 1.0 / alpha_);
  return (T / Ta) * g(std::abs(z) / Ta);
}

}  // namespace spcap
