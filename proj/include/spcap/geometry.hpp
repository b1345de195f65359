#pragma once

#include <span>
#include <vector>

namespace spcap {

/// A point (x, t) of R^n x R.
struct SPoint {
  std::vector<double> x;
  double t = 0.0;

  SPoint() = default;
  SPoint(std::vector<double> x_, double t_) : x(std::move(x_)), t(t_) {}

  std::size_t dim() const { return x.size(); }
};

/// Axis-parallel box [lo, hi] x [tlo, thi]; not necessarily parabolic.
struct Box {
  std::vector<double> lo, hi;
  double tlo = 0.0, thi = 0.0;

  std::size_t dim() const { return lo.size(); }
  double volume() const;
  bool empty() const;
  bool contains(const SPoint& p) const;
};

Box intersect(const Box& a, const Box& b);

/// s-parabolic cube: spatial side `side`, temporal extent side^(2s).
/// Only the side is stored, so the temporal extent cannot drift.
class SPCube {
 public:
  SPCube(SPoint corner, double side, double s);

  const SPoint& corner() const { return corner_; }
  double side() const { return side_; }
  double s() const { return s_; }
  std::size_t dim() const { return corner_.dim(); }
  double temporal_extent() const;
  SPoint center() const;
  SPoint far_corner() const;
  Box box() const;
  bool contains(const SPoint& p) const;

 private:
  SPoint corner_;
  double side_;
  double s_;
};

enum class Corner { UpperRight, LowerLeft };

/// max{|x - y|, |t - tau|^(1/(2s))}, Euclidean spatial norm.
double sp_dist(const SPoint& p, const SPoint& q, double s);
double sp_norm(const SPoint& p, double s);

/// Concentric s-parabolic dilation: spatial side alpha*l, temporal extent (alpha*l)^(2s).
SPCube sp_dilate(const SPCube& q, double alpha);

/// (x, 2 t0 - t).
SPoint temporal_reflect(const SPoint& p, double t0);

/// Sub-cube of side l/4 sharing the maximal (UpperRight) or minimal (LowerLeft) vertex.
SPCube corner_subcube(const SPCube& q, Corner which);

/// s-parabolic distance from p to the topological boundary of q.
double boundary_dist(const SPoint& p, const SPCube& q, double s);

/// Same for an arbitrary box (used by shell measures).
double boundary_dist(const SPoint& p, const Box& b, double s);

/// delta_lambda(x, t) = (lambda x, lambda^(2s) t).
SPoint parabolic_scale(const SPoint& p, double lambda, double s);

void check_exponent(double s);

}  // namespace spcap
