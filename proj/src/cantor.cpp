#include "spcap/cantor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "spcap/random.hpp"

namespace spcap {

void SParams::validate() const {
  std::ostringstream err;
  if (n < 1) err << "n must be >= 1; ";
  if (!(s > 0.5 && s <= 1.0)) err << "s must lie in (1/2, 1]; ";
  if (d < 2) err << "d must be >= 2; ";
  if (d >= 2 && s > 0.5 && s <= 1.0 && !(d + 1.0 < std::pow(d, 2.0 * s)))
    err << "d + 1 < d^(2s) fails; ";
  if (!(tau0 > 0.0 && tau0 < 1.0 / d)) err << "tau0 must lie in (0, 1/d); ";
  if (!err.str().empty()) throw std::invalid_argument(err.str());
}

int min_branching(double s) {
  if (!(s > 0.5 && s <= 1.0)) throw std::invalid_argument("min_branching needs s in (1/2, 1]");
  for (int d = 2;; ++d)
    if (d + 1.0 < std::pow(d, 2.0 * s)) return d;
}

double default_tau0(int d) { return 0.9 / d; }

double critical_ratio(const SParams& p) {
  return std::pow((p.d + 1.0) * std::pow(p.d, p.n), -1.0 / (p.n + 1.0));
}

CantorTree CantorTree::build(const SParams& params, std::vector<double> lambdas) {
  params.validate();
  for (double l : lambdas)
    if (!(l > 0.0 && l <= params.tau0))
      throw std::invalid_argument("every lambda must lie in (0, tau0]");
  CantorTree t;
  t.params_ = params;
  t.k_ = static_cast<int>(lambdas.size());
  t.lambdas_ = std::move(lambdas);
  t.branching_ = static_cast<std::size_t>(params.d + 1);
  for (int i = 0; i < params.n; ++i) t.branching_ *= params.d;
  t.ell_.assign(t.k_ + 1, 1.0);
  for (int j = 1; j <= t.k_; ++j) t.ell_[j] = t.ell_[j - 1] * t.lambdas_[j - 1];

  const std::size_t N = t.leaves();
  const int n = params.n;
  t.leaf_x_.assign(N * n, 0.0);
  t.leaf_t_.assign(N, 0.0);
  for (std::size_t idx = 0; idx < N; ++idx) {
    const SPCube q = t.cube_at(t.k_, idx);
    for (int i = 0; i < n; ++i) t.leaf_x_[idx * n + i] = q.corner().x[i];
    t.leaf_t_[idx] = q.corner().t;
  }
  return t;
}

CantorTree CantorTree::build_constant(const SParams& params, double lambda, int k) {
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  return build(params, std::vector<double>(k, lambda));
}

std::size_t CantorTree::count(int j) const {
  if (j < 0 || j > k_) throw std::out_of_range("generation out of range");
  std::size_t c = 1;
  for (int i = 0; i < j; ++i) c *= branching_;
  return c;
}

double CantorTree::theta(int j) const {
  if (j < 0 || j > k_) throw std::out_of_range("generation out of range");
  return 1.0 / (static_cast<double>(count(j)) * std::pow(ell_[j], n() + 1));
}

double CantorTree::spatial_offset(int r, int c) const {
  const double lam = lambdas_.at(r - 1);
  const int d = params_.d;
  const double gap = (1.0 - d * lam) / (d - 1);
  return ell_[r - 1] * c * (lam + gap);
}

double CantorTree::temporal_offset(int r, int c) const {
  const double lam2s = std::pow(lambdas_.at(r - 1), 2.0 * s());
  const int d = params_.d;
  const double gap = (1.0 - (d + 1) * lam2s) / d;
  return std::pow(ell_[r - 1], 2.0 * s()) * c * (lam2s + gap);
}

SPCube CantorTree::root() const { return SPCube(SPoint(std::vector<double>(n(), 0.0), 0.0), 1.0, s()); }

SPCube CantorTree::cube_of(std::span<const int> digits) const {
  if (static_cast<int>(digits.size()) > k_) throw std::out_of_range("address longer than k");
  const int d = params_.d;
  SPoint corner(std::vector<double>(n(), 0.0), 0.0);
  for (std::size_t r = 0; r < digits.size(); ++r) {
    int digit = digits[r];
    if (digit < 0 || static_cast<std::size_t>(digit) >= branching_)
      throw std::out_of_range("digit out of range");
    const int ct = digit % (d + 1);
    int sp = digit / (d + 1);
    for (int i = 0; i < n(); ++i) {
      corner.x[i] += spatial_offset(static_cast<int>(r) + 1, sp % d);
      sp /= d;
    }
    corner.t += temporal_offset(static_cast<int>(r) + 1, ct);
  }
  const double side = ell_[digits.size()];
  if (mirrored_) corner.t = 1.0 - corner.t - std::pow(side, 2.0 * s());
  return SPCube(std::move(corner), side, s());
}

std::vector<int> CantorTree::digits_of(int j, std::size_t index) const {
  if (index >= count(j)) throw std::out_of_range("cube index out of range");
  std::vector<int> digits(j);
  for (int r = j - 1; r >= 0; --r) {
    digits[r] = static_cast<int>(index % branching_);
    index /= branching_;
  }
  return digits;
}

SPCube CantorTree::cube_at(int j, std::size_t index) const {
  const auto digits = digits_of(j, index);
  return cube_of(digits);
}

double CantorTree::mass_1d(double a, double b, int r, double origin, bool temporal) const {
  // Fraction of the generation-k mass inside the level-r interval starting at origin.
  const double len = temporal ? std::pow(ell_[r], 2.0 * s()) : ell_[r];
  const double lo = std::max(a, origin), hi = std::min(b, origin + len);
  if (!(hi > lo)) return 0.0;
  if (lo == origin && hi == origin + len) return 1.0;
  if (r == k_) return (hi - lo) / len;
  const int children = temporal ? params_.d + 1 : params_.d;
  double acc = 0.0;
  for (int c = 0; c < children; ++c) {
    const double off = temporal ? temporal_offset(r + 1, c) : spatial_offset(r + 1, c);
    acc += mass_1d(a, b, r + 1, origin + off, temporal);
  }
  return acc / children;
}

double CantorTree::spatial_mass(double a, double b) const { return mass_1d(a, b, 0, 0.0, false); }

double CantorTree::temporal_mass(double a, double b) const {
  if (mirrored_) return mass_1d(1.0 - b, 1.0 - a, 0, 0.0, true);
  return mass_1d(a, b, 0, 0.0, true);
}

double CantorTree::mu_of_box(const Box& b) const {
  if (static_cast<int>(b.dim()) != n()) throw std::invalid_argument("dimension mismatch");
  double m = temporal_mass(b.tlo, b.thi);
  for (int i = 0; i < n() && m > 0.0; ++i) m *= spatial_mass(b.lo[i], b.hi[i]);
  return m;
}

CantorTree CantorTree::time_mirrored() const {
  CantorTree t = *this;
  t.mirrored_ = !mirrored_;
  const double ext = std::pow(ell_[k_], 2.0 * s());
  for (auto& v : t.leaf_t_) v = 1.0 - v - ext;
  return t;
}

GrowthReport growth_check(const CantorTree& tree, std::size_t trials, double kappa,
                          std::mt19937_64& rng) {
  const int n = tree.n(), k = tree.k();
  const double s = tree.s();
  GrowthReport rep;
  if (kappa <= 0.0)
    for (int j = 0; j <= k; ++j) kappa = std::max(kappa, tree.theta(j));
  rep.kappa = kappa;
  double lam_min = 1.0;
  for (double l : tree.lambdas()) lam_min = std::min(lam_min, l);
  rep.claimed_bound = (tree.params().d + 1) * std::pow(tree.params().d, n) * kappa;
  rep.proven_bound = std::pow(2.0, n + 1) * kappa / std::pow(lam_min, n + 1);
  const std::size_t N = tree.leaves();
  for (std::size_t trial = 0; trial < trials; ++trial) {
    // Sides from 1e-3 l_k up to 2, log-uniform; centred near a random leaf.
    const double lo = std::log(1e-3 * tree.ell(k)), hi = std::log(2.0);
    const double side = std::exp(uniform(rng, lo, hi));
    const std::size_t leaf = uniform_index(rng, N);
    SPoint corner(std::vector<double>(n), 0.0);
    const double lk = tree.ell(k), tk = std::pow(lk, 2 * s), tq = std::pow(side, 2 * s);
    for (int i = 0; i < n; ++i)
      corner.x[i] = tree.leaf_x()[leaf * n + i] + uniform(rng, -side, lk);
    corner.t = tree.leaf_t()[leaf] + uniform(rng, -tq, tk);
    const SPCube q(corner, side, s);
    const double ratio = tree.mu_of_cube(q) / std::pow(side, n + 1);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    ++rep.trials;
  }
  return rep;
}

std::optional<int> doubling_search(const CantorTree& tree, const SPCube& q, int max_steps) {
  const double factor = std::pow(3.0, tree.n() + 2);
  double cur = tree.mu_of_cube(q);
  for (int j = 0; j < max_steps; ++j) {
    const double next = tree.mu_of_cube(sp_dilate(q, std::pow(3.0, j + 1)));
    if (cur > 0.0 && next <= factor * cur) return j;
    cur = next;
  }
  return std::nullopt;
}

double boundary_shell_mass(const CantorTree& tree, const SPCube& q, double alpha) {
  const double s = tree.s();
  const double l = q.side();
  const double a = alpha * l, at = std::pow(alpha * l, 2 * s);
  const Box qb = q.box();
  const Box big = sp_dilate(q, 2.0).box();
  Box outer = qb;
  for (std::size_t i = 0; i < outer.dim(); ++i) {
    outer.lo[i] -= a;
    outer.hi[i] += a;
  }
  outer.tlo -= at;
  outer.thi += at;
  Box inner = qb;
  for (std::size_t i = 0; i < inner.dim(); ++i) {
    inner.lo[i] += a;
    inner.hi[i] -= a;
  }
  inner.tlo += at;
  inner.thi -= at;
  const double out_mass = tree.mu_of_box(intersect(big, outer));
  const double in_mass = inner.empty() ? 0.0 : tree.mu_of_box(inner);
  return std::max(0.0, out_mass - in_mass);
}

SmallBoundaryResult small_boundary_check(const CantorTree& tree, const SPCube& q, double A,
                                         std::span<const double> alphas) {
  if (!(A > 0.0)) throw std::invalid_argument("A must be positive");
  SmallBoundaryResult res;
  const double m2 = tree.mu_of_cube(sp_dilate(q, 2.0));
  if (m2 == 0.0) {
    res.vacuous = true;
    return res;
  }
  for (double al : alphas) {
    if (!(al > 0.0)) continue;
    const double ratio = boundary_shell_mass(tree, q, al) / (al * m2);
    if (ratio > res.worst_ratio) {
      res.worst_ratio = ratio;
      res.worst_alpha = al;
    }
    if (ratio > A * (1 + 1e-12)) res.pass = false;
  }
  return res;
}

}  // namespace spcap
