#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "spcap/geometry.hpp"

namespace spcap {

struct SParams {
  int n = 1;
  double s = 1.0;
  int d = 2;
  double tau0 = 0.45;  // use default_tau0(d) unless set deliberately

  void validate() const;
};

/// Least integer d >= 2 with d + 1 < d^(2s); s in (1/2, 1].
int min_branching(double s);
double default_tau0(int d);
/// ((d+1) d^n)^(-1/(n+1)): the ratio making every density equal to one.
double critical_ratio(const SParams& p);

/// Corner-like Cantor construction up to generation k. Cubes of generation j
/// are addressed by a flat index whose base-B digits (B = (d+1) d^n) are
/// spatial_index * (d+1) + temporal_index, most significant first.
class CantorTree {
 public:
  static CantorTree build(const SParams& params, std::vector<double> lambdas);
  static CantorTree build_constant(const SParams& params, double lambda, int k);

  const SParams& params() const { return params_; }
  int k() const { return k_; }
  int n() const { return params_.n; }
  double s() const { return params_.s; }
  const std::vector<double>& lambdas() const { return lambdas_; }
  std::size_t branching() const { return branching_; }
  std::size_t count(int j) const;
  std::size_t leaves() const { return count(k_); }
  double ell(int j) const { return ell_.at(j); }
  double theta(int j) const;
  double leaf_mass() const { return 1.0 / static_cast<double>(leaves()); }

  /// Spatial (axis-independent) and temporal offsets of child `c` at level r >= 1,
  /// relative to the parent's minimal corner.
  double spatial_offset(int r, int c) const;
  double temporal_offset(int r, int c) const;

  SPCube root() const;
  SPCube cube_of(std::span<const int> digits) const;
  SPCube cube_at(int j, std::size_t index) const;
  std::vector<int> digits_of(int j, std::size_t index) const;

  /// Generation-k corners, row-major (leaves() x n) and times.
  const std::vector<double>& leaf_x() const { return leaf_x_; }
  const std::vector<double>& leaf_t() const { return leaf_t_; }

  /// Exact mu_k mass of an axis-parallel box (product of one-dimensional masses).
  double mu_of_box(const Box& b) const;
  double mu_of_cube(const SPCube& q) const { return mu_of_box(q.box()); }
  double spatial_mass(double a, double b) const;
  double temporal_mass(double a, double b) const;

  /// Time-mirrored tree: t -> 1 - t. Still a product set but no longer
  /// a corner-like construction, so it is represented by its leaves only.
  bool mirrored() const { return mirrored_; }
  CantorTree time_mirrored() const;

 private:
  double mass_1d(double a, double b, int r, double origin, bool temporal) const;

  SParams params_;
  int k_ = 0;
  std::vector<double> lambdas_;
  std::vector<double> ell_;
  std::size_t branching_ = 0;
  std::vector<double> leaf_x_, leaf_t_;
  bool mirrored_ = false;
};

struct GrowthReport {
  double kappa = 0.0;
  double max_ratio = 0.0;      // max mu(Q) / l(Q)^(n+1)
  double claimed_bound = 0.0;  // (d+1) d^n kappa
  double proven_bound = 0.0;   // 2^(n+1) kappa / lambda_min^(n+1)
  std::size_t trials = 0;
  bool within_claimed() const { return max_ratio <= claimed_bound * (1 + 1e-12); }
  bool within_proven() const { return max_ratio <= proven_bound * (1 + 1e-12); }
};

/// Random s-parabolic cubes at every scale near the set; kappa <= 0 means max theta.
GrowthReport growth_check(const CantorTree& tree, std::size_t trials, double kappa,
                          std::mt19937_64& rng);

/// Least j0 >= 0 with mu(3^(j0+1) Q) <= 3^(n+2) mu(3^j0 Q) and mu(3^j0 Q) > 0.
std::optional<int> doubling_search(const CantorTree& tree, const SPCube& q, int max_steps = 60);

struct SmallBoundaryResult {
  bool pass = true;
  bool vacuous = false;
  double worst_alpha = 0.0;
  double worst_ratio = 0.0;  // shell / (alpha mu(2Q))
};

/// mu({x in 2Q : dist(x, dQ) <= alpha l(Q)}). Exact for n = 1; for n >= 2 the
/// outer shell is taken in the sup norm, which can only overestimate.
double boundary_shell_mass(const CantorTree& tree, const SPCube& q, double alpha);

SmallBoundaryResult small_boundary_check(const CantorTree& tree, const SPCube& q, double A,
                                         std::span<const double> alphas);

}  // namespace spcap
