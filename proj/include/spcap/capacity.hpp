#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spcap/cantor.hpp"
#include "spcap/node_kernels.hpp"
#include "spcap/operator.hpp"

namespace spcap {

/// sigma_k = sum_{j <= k} theta_j^2.
double sigma_sum(const CantorTree& tree, int k);
/// sigma_k^(-1/2).
double theorem_bound(const CantorTree& tree, int k);

struct GammaAux {
  double opnorm_lower = 0.0;
  double value = 0.0;  // 1 / (scale * opnorm_lower)
  bool converged = false;
};

/// Auxiliary capacity of scale * mu_k from the norm of the operator on
/// generation-k piecewise-constant functions. Uses ||P_{a mu}|| = a ||P_mu||,
/// so the result is exactly 1/scale times the unscaled one. An upper
/// estimate: the restricted norm is below the true one.
GammaAux gamma_aux(const GramMatrix& G, double leaf_mass, double scale = 1.0);
GammaAux gamma_aux(const SingularOperator& op, double scale = 1.0);

struct GammaPlus {
  double supnorm = 0.0;        // sampled sup |P(scale mu_k)|
  double growth_ratio = 0.0;   // measured max scale mu_k(Q) / l(Q)^(n+1)
  double value = 0.0;          // scale / max(supnorm, growth_ratio)
  std::size_t samples = 0;
};

/// Mass of the admissible multiple of mu_k. Invariant under `scale`.
GammaPlus gamma_plus_lower(const SingularOperator& op, std::size_t budget, std::size_t growth_trials,
                           std::uint64_t seed, double scale = 1.0);

struct CornerResult {
  double value = 0.0;  // min |P chi_Q| / theta_k over the sample points
  double max_ratio = 0.0;
  std::size_t points = 0;
};

/// Points on a `per_axis`^(n+1) grid inside the upper-right sub-cube of every
/// generation-k cube (the lower-left one for the conjugate kernel).
CornerResult corner_constant(const SingularOperator& op, int per_axis = 3, bool conjugate = false);

/// Sampled oscillation functional sup_Q mu(rho Q)^(-1) int_Q |f - f_Q| dmu
/// for f known at the node rule of every leaf. Cubes: all tree cubes plus
/// `random_cubes` random s-parabolic cubes hitting the support.
double bmo_estimate(const CantorTree& tree, const QuadratureSpec& quad, const PassResult& pass,
                    std::size_t random_cubes, std::uint64_t seed, double rho = 3.0);

struct CapacityRow {
  std::string run_id;
  int n = 1;
  double s = 1.0;
  int d = 2;
  std::string lambda_spec;
  int k = 0;
  double sigma_k = 0.0, bound = 0.0;
  double l2_sq = 0.0, l2_ratio = 0.0;
  double opnorm_lower = 0.0, gamma_aux = 0.0;
  double supnorm = 0.0, gamma_plus_lower = 0.0;
  double corner_const = 0.0, bmo_est = 0.0;
  int quad_order = 0;
  double wall_time_s = 0.0;
  bool ok = true;
  std::string error;
};

struct SamplingSpec {
  std::size_t sup_budget = 2000;
  std::size_t growth_trials = 2000;
  std::size_t bmo_cubes = 200;
  int corner_per_axis = 3;
};

struct RunSpec {
  std::string run_id;
  SParams params;
  std::string lambda_spec;
  std::vector<double> lambdas;  // lambda_1..lambda_k
};

/// Everything for one generation; the seed is split per subsystem and per run id.
CapacityRow capacity_row(const RunSpec& run, const QuadratureSpec& quad, KernelMethod method,
                         const SamplingSpec& sampling, std::uint64_t seed, int workers);

/// One row per run; a failing row is recorded and the sweep continues.
std::vector<CapacityRow> ratio_report(const std::vector<RunSpec>& runs, const QuadratureSpec& quad,
                                      KernelMethod method, const SamplingSpec& sampling,
                                      std::uint64_t seed, int workers);

/// max/min of a positive column; 0 if any value is non-positive or not finite.
double spread(const std::vector<double>& v);

}  // namespace spcap
