#include "spcap/quadrature.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace spcap {

namespace {

// Reference nodes on [-1, 1], computed once per order.
const Rule1D& reference_rule(int order) {
  static std::mutex mtx;
  static std::map<int, Rule1D> cache;
  std::lock_guard lock(mtx);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  Rule1D r;
  r.nodes.resize(order);
  r.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Final derivative at the converged node.
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= order; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = order * (z * p1 - p0) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.nodes[i] = -z;
    r.nodes[order - 1 - i] = z;
    r.weights[i] = w;
    r.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) r.nodes[order / 2] = 0.0;
  return cache.emplace(order, std::move(r)).first->second;
}

void append_panel(Rule1D& out, const Rule1D& ref, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    out.nodes.push_back(c + h * ref.nodes[i]);
    out.weights.push_back(h * ref.weights[i]);
  }
}

// Breakpoints of a geometric mesh on [a, b] refined toward a.
std::vector<double> graded_breaks(double a, double b, int levels, double ratio) {
  std::vector<double> br{a};
  for (int l = levels; l >= 1; --l) br.push_back(a + (b - a) * std::pow(ratio, l));
  br.push_back(b);
  return br;
}

}  // namespace

Rule1D gauss_legendre(int order, double a, double b) {
  if (order < 1) throw std::invalid_argument("quadrature order must be >= 1");
  Rule1D out;
  append_panel(out, reference_rule(order), a, b);
  return out;
}

Rule1D composite_rule(double a, double b, int order, int panels) {
  if (order < 1 || panels < 1) throw std::invalid_argument("bad composite rule");
  const Rule1D& ref = reference_rule(order);
  Rule1D out;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p)
    append_panel(out, ref, a + p * h, p + 1 == panels ? b : a + (p + 1) * h);
  return out;
}

Rule1D graded_rule(double a, double b, int order, int levels, Grading grading, double ratio) {
  if (order < 1 || levels < 0) throw std::invalid_argument("bad graded rule");
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("grading ratio must lie in (0, 1)");
  const Rule1D& ref = reference_rule(order);
  Rule1D out;
  std::vector<double> br;
  switch (grading) {
    case Grading::None:
      br = {a, b};
      break;
    case Grading::Left:
      br = graded_breaks(a, b, levels, ratio);
      break;
    case Grading::Right: {
      auto g = graded_breaks(b, a, levels, ratio);
      br.assign(g.rbegin(), g.rend());
      break;
    }
    case Grading::Both: {
      const double m = 0.5 * (a + b);
      br = graded_breaks(a, m, levels, ratio);
      auto g = graded_breaks(b, m, levels, ratio);
      br.insert(br.end(), g.rbegin() + 1, g.rend());
      break;
    }
  }
  for (std::size_t i = 0; i + 1 < br.size(); ++i) append_panel(out, ref, br[i], br[i + 1]);
  return out;
}

double compensated_sum(std::span<const double> values) {
  CompensatedSum acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

void ChebyshevTable::init(double a, double b, int panels, int degree) {
  if (!(b > a) || panels < 1 || degree < 1) throw std::invalid_argument("bad Chebyshev table");
  a_ = a;
  b_ = b;
  panels_ = panels;
  degree_ = degree;
  width_ = (b - a) / panels;
  points_ = sample_points(a, b, panels, degree);
}

std::vector<double> ChebyshevTable::sample_points(double a, double b, int panels, int degree) {
  const int m = degree + 1;
  const double w = (b - a) / panels;
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(panels) * m);
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * w;
    for (int j = 0; j < m; ++j)
      pts.push_back(c + 0.5 * w * std::cos(std::numbers::pi * (j + 0.5) / m));
  }
  return pts;
}

ChebyshevTable ChebyshevTable::build_from_values(double a, double b, int panels, int degree,
                                                 std::span<const double> values) {
  ChebyshevTable t;
  t.init(a, b, panels, degree);
  if (values.size() != t.points_.size()) throw std::invalid_argument("Chebyshev sample count mismatch");
  t.fit(values);
  return t;
}

void ChebyshevTable::fit(std::span<const double> values) {
  const int m = degree_ + 1;
  coeffs_.assign(values.size(), 0.0);
  for (int p = 0; p < panels_; ++p) {
    const double* f = values.data() + static_cast<std::size_t>(p) * m;
    double* c = coeffs_.data() + static_cast<std::size_t>(p) * m;
    for (int k = 0; k < m; ++k) {
      double acc = 0.0;
      for (int j = 0; j < m; ++j) acc += f[j] * std::cos(std::numbers::pi * k * (j + 0.5) / m);
      c[k] = (k == 0 ? 1.0 : 2.0) * acc / m;
    }
  }
  points_.clear();
  points_.shrink_to_fit();
}

double ChebyshevTable::operator()(double u) const {
  int p = static_cast<int>((u - a_) / width_);
  p = std::clamp(p, 0, panels_ - 1);
  const double c = a_ + (p + 0.5) * width_;
  const double y = 2.0 * (u - c) / width_;
  const double* cf = coeffs_.data() + static_cast<std::size_t>(p) * (degree_ + 1);
  // Clenshaw recurrence.
  double b1 = 0.0, b2 = 0.0;
  for (int k = degree_; k >= 1; --k) {
    const double b0 = 2.0 * y * b1 - b2 + cf[k];
    b2 = b1;
    b1 = b0;
  }
  return y * b1 - b2 + cf[0];
}

}  // namespace spcap
