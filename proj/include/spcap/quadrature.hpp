#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace spcap {

/// Nodes and weights of a one-dimensional rule on some interval.
struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  double integrate(auto&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

/// Gauss-Legendre rule of the given order on [a, b].
Rule1D gauss_legendre(int order, double a = -1.0, double b = 1.0);

enum class Grading { None, Left, Right, Both };

/// Composite Gauss-Legendre rule with geometric refinement toward the graded
/// end(s). `levels` geometric panels with ratio `ratio` sit next to each
/// graded end; `Both` grades each half independently.
Rule1D graded_rule(double a, double b, int order, int levels, Grading grading,
                   double ratio = 0.15);

/// Composite rule with `panels` equal panels.
Rule1D composite_rule(double a, double b, int order, int panels);

/// Neumaier's variant of Kahan summation. Order-dependent but reproducible
/// for a fixed order of additions.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> values);

/// Piecewise Chebyshev interpolant of a smooth function on [a, b].
class ChebyshevTable {
 public:
  ChebyshevTable() = default;

  /// Samples f at the Chebyshev points of each of `panels` equal panels.
  template <class F>
  static ChebyshevTable build(double a, double b, int panels, int degree, F&& f) {
    ChebyshevTable t;
    t.init(a, b, panels, degree);
    std::vector<double> values(t.points_.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = f(t.points_[i]);
    t.fit(values);
    return t;
  }

  /// Sampling points in panel-major order; pair with build_from_values.
  static std::vector<double> sample_points(double a, double b, int panels, int degree);
  static ChebyshevTable build_from_values(double a, double b, int panels, int degree,
                                          std::span<const double> values);

  double operator()(double u) const;
  double lower() const { return a_; }
  double upper() const { return b_; }
  bool empty() const { return coeffs_.empty(); }

 private:
  void init(double a, double b, int panels, int degree);
  void fit(std::span<const double> values);

  double a_ = 0.0, b_ = 0.0, width_ = 1.0;
  int panels_ = 0, degree_ = 0;
  std::vector<double> points_;
  std::vector<double> coeffs_;
};

}  // namespace spcap
