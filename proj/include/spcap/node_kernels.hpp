#pragma once

#include <vector>

#include "spcap/box_field.hpp"
#include "spcap/quadrature.hpp"

namespace spcap {

struct QuadratureSpec {
  int base_order = 4;       // Gauss-Legendre nodes per panel of a target cube
  int grading_levels = 2;   // geometric panels next to each singular face
  double grading_ratio = 0.15;
  double target_rel_tol = 1e-4;

  void validate() const;
  /// Twice the order and twice the grading depth.
  QuadratureSpec doubled() const;
};

/// Node rules on [0, 1] for the spatial axes (graded at both faces) and the
/// time axis (graded at the face where the self field is singular).
struct TargetRule {
  Rule1D x, t;
};
TargetRule make_target_rule(const QuadratureSpec& q, bool conjugate);

struct PassRequest {
  const BoxFieldEvaluator* eval = nullptr;
  const BoxSet* targets = nullptr;  // coef = mu density on the target
  const BoxSet* sources = nullptr;  // coef = mu density times weight
  QuadratureSpec quad;
  bool conjugate = false;
  bool want_matrix = false;
  bool want_nodes = false;
  bool want_gram = false;
};

/// Per-target results of one sweep over the node rule.
struct PassResult {
  int n = 1;
  std::vector<double> avg;     // targets x n: cube averages of the field
  std::vector<double> l2;      // int_target |field|^2 dmu
  std::vector<double> l1;      // int_target |field| dmu
  std::vector<double> matrix;  // targets x sources x n: averages of single-source fields
  std::size_t nodes_per_target = 0;
  std::vector<double> node_values;  // targets x nodes x n, node order of the target rule
  std::vector<double> node_weights; // nodes, summing to one
  /// sources x sources: int <F_b, F_c> dmu over all targets, F_b the field of
  /// source b including its coefficient.
  std::vector<double> gram;
};

/// Reference implementation: plain loops, one target after another.
PassResult run_pass_serial(const PassRequest& req);
/// OpenMP over targets; every target is computed exactly as in the serial
/// version, so results are bit-identical for any worker count.
PassResult run_pass_parallel(const PassRequest& req, int workers = 0);

}  // namespace spcap
