#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spcap/box_field.hpp"
#include "spcap/cantor.hpp"
#include "spcap/node_kernels.hpp"

namespace spcap {

/// Per-component n-vectors attached to the generation-k cubes (row-major).
struct CubeVector {
  int n = 1;
  std::vector<double> values;  // size() * n

  CubeVector() = default;
  CubeVector(std::size_t cubes, int dim, double fill = 0.0) : n(dim), values(cubes * dim, fill) {}
  std::size_t size() const { return values.size() / n; }
  double& at(std::size_t c, int i) { return values[c * n + i]; }
  double at(std::size_t c, int i) const { return values[c * n + i]; }
};

/// M[a][b] = (1/mu(Q_a)) int_{Q_a} int_{Q_b} grad P(x - y) dmu(y) dmu(x).
struct PairKernelMatrix {
  std::size_t N = 0;
  int n = 1;
  std::vector<double> data;  // N x N x n

  double at(std::size_t a, std::size_t b, int i) const { return data[(a * N + b) * n + i]; }
  /// Sum_b M[a][b] w_b; cube averages of the field of w.
  CubeVector apply(std::span<const double> w) const;
};

/// G[b][c] = int <F_b, F_c> dmu_k, F_b the field of mu_k restricted to Q_b:
/// the quadratic form of f -> P(f mu_k) on piecewise-constant f.
struct GramMatrix {
  std::size_t N = 0;
  std::vector<double> data;  // N x N, symmetric
  double at(std::size_t b, std::size_t c) const { return data[b * N + c]; }
};

struct OpNormResult {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Largest singular value of f -> (sum_b M[a][b] f_b)_a from L^2(mu) to
/// L^2(mu; R^n), by power iteration on A^T A with
/// A[(a,i), b] = sqrt(mu_a / mu_b) M_i[a][b]. Any iterate is a lower bound.
OpNormResult op_norm_lower(const PairKernelMatrix& M, std::span<const double> masses,
                           double rel_tol = 1e-8, int max_iter = 20000);

/// Norm of f -> P(f mu) on functions constant on each cube, from L^2(mu):
/// the square root of the top eigenvalue of D^(-1/2) G D^(-1/2), D = diag(mu_b),
/// by power iteration. Bounded below by the Rayleigh quotient at f = 1.
OpNormResult op_norm_piecewise(const GramMatrix& G, std::span<const double> masses,
                               double rel_tol = 1e-8, int max_iter = 20000);

struct EnergyResult {
  double l2_sq = 0.0;     // int |P f|^2 dmu_k
  CubeVector averages;    // generation-k cube averages of P f
  std::vector<double> per_cube_l2;
};

struct CancellationResult {
  std::vector<double> integral;  // int_R P chi_R dmu
  double abs_integral = 0.0;     // int_R |P chi_R| dmu
  double relative = 0.0;
};

struct SupNormResult {
  double value = 0.0;
  std::size_t samples = 0;
  SPoint argmax;
};

/// The singular operator f -> int grad P(x - y) f(y) dmu_k(y) on one tree.
class SingularOperator {
 public:
  SingularOperator(const CantorTree& tree, QuadratureSpec quad = {},
                   KernelMethod method = KernelMethod::Auto, int workers = 0);

  const CantorTree& tree() const { return tree_; }
  const BoxFieldEvaluator& evaluator() const { return eval_; }
  const QuadratureSpec& quad() const { return quad_; }
  std::size_t size() const { return tree_.leaves(); }
  int n() const { return tree_.n(); }
  /// mu_k density on each generation-k cube, 1 / |E_k|.
  double density() const { return leaves_.coef.empty() ? 0.0 : leaves_.coef[0]; }

  /// Field of piecewise-constant weights w (empty means f = 1) at p. For eps > 0
  /// the parabolic ball of radius eps around p is removed (n = 1 only).
  std::vector<double> field(std::span<const double> w, const SPoint& p, double eps = 0.0,
                            bool conjugate = false) const;
  /// Field of the indicator of the generation-j cube with the given index.
  std::vector<double> field_of_cube(int j, std::size_t index, const SPoint& p,
                                    bool conjugate = false) const;

  std::vector<double> pair_integral(std::size_t a, std::size_t b, bool conjugate = false) const;

  EnergyResult energy(std::span<const double> w = {}, bool conjugate = false) const;
  double l2_norm_sq(std::span<const double> w = {}, bool conjugate = false) const;
  PairKernelMatrix averaged_matrix(bool conjugate = false) const;
  GramMatrix gram_matrix(bool conjugate = false) const;

  /// Full pass with node values kept; used by the oscillation estimator.
  PassResult pass(std::span<const double> w, bool conjugate, bool want_matrix, bool want_nodes,
                  bool parallel = true, bool want_gram = false) const;
  PassResult pass_on(const BoxSet& targets, const BoxSet& sources, bool conjugate,
                     bool want_matrix, bool want_nodes, bool parallel = true,
                     bool want_gram = false) const;

  /// int_R P chi_R dmu_k against int_R |P chi_R| dmu_k for an arbitrary box.
  CancellationResult cancellation(const Box& R) const;

  /// Sampled max of |P 1|: cube centres, corner sub-cube centres, points above
  /// and below the set in time, and `budget` uniform points in 2 Q^0.
  SupNormResult sup_norm_estimate(std::size_t budget, std::uint64_t seed) const;

 private:
  CantorTree tree_;
  QuadratureSpec quad_;
  BoxFieldEvaluator eval_;
  BoxSet leaves_;
  int workers_;
};

}  // namespace spcap
