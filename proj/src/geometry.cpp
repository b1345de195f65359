#include "spcap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spcap {

void check_exponent(double s) {
  if (!(s > 0.0 && s <= 1.0))
    throw std::invalid_argument("s-parabolic exponent must lie in (0, 1]");
}

double Box::volume() const {
  if (empty()) return 0.0;
  double v = thi - tlo;
  for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

bool Box::empty() const {
  if (!(thi > tlo)) return true;
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(hi[i] > lo[i])) return true;
  return false;
}

bool Box::contains(const SPoint& p) const {
  if (p.t < tlo || p.t > thi) return false;
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (p.x[i] < lo[i] || p.x[i] > hi[i]) return false;
  return true;
}

Box intersect(const Box& a, const Box& b) {
  Box r;
  r.lo.resize(a.dim());
  r.hi.resize(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    r.lo[i] = std::max(a.lo[i], b.lo[i]);
    r.hi[i] = std::min(a.hi[i], b.hi[i]);
  }
  r.tlo = std::max(a.tlo, b.tlo);
  r.thi = std::min(a.thi, b.thi);
  return r;
}

SPCube::SPCube(SPoint corner, double side, double s)
    : corner_(std::move(corner)), side_(side), s_(s) {
  if (!(side > 0.0)) throw std::invalid_argument("cube side must be positive");
  check_exponent(s);
  if (corner_.dim() == 0) throw std::invalid_argument("spatial dimension must be >= 1");
}

double SPCube::temporal_extent() const { return std::pow(side_, 2.0 * s_); }

SPoint SPCube::center() const {
  SPoint c = corner_;
  for (auto& xi : c.x) xi += 0.5 * side_;
  c.t += 0.5 * temporal_extent();
  return c;
}

SPoint SPCube::far_corner() const {
  SPoint c = corner_;
  for (auto& xi : c.x) xi += side_;
  c.t += temporal_extent();
  return c;
}

Box SPCube::box() const {
  Box b;
  b.lo = corner_.x;
  b.hi = corner_.x;
  for (auto& h : b.hi) h += side_;
  b.tlo = corner_.t;
  b.thi = corner_.t + temporal_extent();
  return b;
}

bool SPCube::contains(const SPoint& p) const { return box().contains(p); }

double sp_dist(const SPoint& p, const SPoint& q, double s) {
  check_exponent(s);
  if (p.dim() != q.dim()) throw std::invalid_argument("dimension mismatch");
  double sq = 0.0;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    const double d = p.x[i] - q.x[i];
    sq += d * d;
  }
  const double spatial = std::sqrt(sq);
  const double temporal = std::pow(std::abs(p.t - q.t), 1.0 / (2.0 * s));
  return std::max(spatial, temporal);
}

double sp_norm(const SPoint& p, double s) {
  return sp_dist(p, SPoint(std::vector<double>(p.dim(), 0.0), 0.0), s);
}

SPCube sp_dilate(const SPCube& q, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("dilation factor must be positive");
  const SPoint c = q.center();
  const double side = alpha * q.side();
  SPoint corner = c;
  for (auto& xi : corner.x) xi -= 0.5 * side;
  corner.t -= 0.5 * std::pow(side, 2.0 * q.s());
  return SPCube(std::move(corner), side, q.s());
}

SPoint temporal_reflect(const SPoint& p, double t0) { return SPoint(p.x, 2.0 * t0 - p.t); }

SPCube corner_subcube(const SPCube& q, Corner which) {
  const double side = 0.25 * q.side();
  if (which == Corner::LowerLeft) return SPCube(q.corner(), side, q.s());
  SPoint corner = q.far_corner();
  for (auto& xi : corner.x) xi -= side;
  corner.t -= std::pow(side, 2.0 * q.s());
  return SPCube(std::move(corner), side, q.s());
}

double boundary_dist(const SPoint& p, const Box& b, double s) {
  check_exponent(s);
  const double inv2s = 1.0 / (2.0 * s);
  if (b.contains(p)) {
    double best = std::pow(std::min(p.t - b.tlo, b.thi - p.t), inv2s);
    for (std::size_t i = 0; i < b.dim(); ++i)
      best = std::min(best, std::min(p.x[i] - b.lo[i], b.hi[i] - p.x[i]));
    return best;
  }
  // Outside the closed box the nearest point of the box lies on its boundary.
  double sq = 0.0;
  for (std::size_t i = 0; i < b.dim(); ++i) {
    const double e = std::max({b.lo[i] - p.x[i], 0.0, p.x[i] - b.hi[i]});
    sq += e * e;
  }
  const double et = std::max({b.tlo - p.t, 0.0, p.t - b.thi});
  return std::max(std::sqrt(sq), std::pow(et, inv2s));
}

double boundary_dist(const SPoint& p, const SPCube& q, double s) {
  return boundary_dist(p, q.box(), s);
}

SPoint parabolic_scale(const SPoint& p, double lambda, double s) {
  SPoint r = p;
  for (auto& xi : r.x) xi *= lambda;
  r.t *= std::pow(lambda, 2.0 * s);
  return r;
}

}  // namespace spcap
