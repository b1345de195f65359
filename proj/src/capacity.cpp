#include "spcap/capacity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spcap/random.hpp"

namespace spcap {

double sigma_sum(const CantorTree& tree, int k) {
  if (k < 0 || k > tree.k()) throw std::out_of_range("generation out of range");
  CompensatedSum acc;
  for (int j = 0; j <= k; ++j) acc.add(tree.theta(j) * tree.theta(j));
  return acc.value();
}

double theorem_bound(const CantorTree& tree, int k) { return 1.0 / std::sqrt(sigma_sum(tree, k)); }

GammaAux gamma_aux(const GramMatrix& G, double leaf_mass, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("measure scale must be positive");
  const std::vector<double> masses(G.N, leaf_mass);
  const OpNormResult r = op_norm_piecewise(G, masses);
  GammaAux g;
  g.opnorm_lower = scale * r.value;
  g.converged = r.converged;
  g.value = g.opnorm_lower > 0.0 ? 1.0 / g.opnorm_lower : std::numeric_limits<double>::infinity();
  return g;
}

GammaAux gamma_aux(const SingularOperator& op, double scale) {
  return gamma_aux(op.gram_matrix(), op.tree().leaf_mass(), scale);
}

GammaPlus gamma_plus_lower(const SingularOperator& op, std::size_t budget, std::size_t growth_trials,
                           std::uint64_t seed, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("measure scale must be positive");
  GammaPlus g;
  const SupNormResult sup = op.sup_norm_estimate(budget, seed);
  auto rng = make_stream(seed, "growth");
  const GrowthReport growth = growth_check(op.tree(), growth_trials, 0.0, rng);
  g.supnorm = scale * sup.value;
  g.growth_ratio = scale * growth.max_ratio;
  g.samples = sup.samples;
  g.value = scale / std::max(g.supnorm, g.growth_ratio);
  return g;
}

CornerResult corner_constant(const SingularOperator& op, int per_axis, bool conjugate) {
  if (per_axis < 1) throw std::invalid_argument("need at least one point per axis");
  const CantorTree& tree = op.tree();
  const int n = tree.n(), k = tree.k();
  const double theta = tree.theta(k);
  const std::size_t N = tree.leaves();
  std::size_t per_cube = 1;
  for (int i = 0; i <= n; ++i) per_cube *= per_axis;
  CornerResult res;
  res.value = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < N; ++b) {
    const SPCube q(SPoint(std::vector<double>(tree.leaf_x().begin() + b * n, tree.leaf_x().begin() + (b + 1) * n),
                          tree.leaf_t()[b]),
                   tree.ell(k), tree.s());
    const Box sub = corner_subcube(q, conjugate ? Corner::LowerLeft : Corner::UpperRight).box();
    for (std::size_t m = 0; m < per_cube; ++m) {
      std::size_t rem = m;
      SPoint p(std::vector<double>(n), 0.0);
      for (int i = 0; i <= n; ++i) {
        const double u = (static_cast<double>(rem % per_axis) + 0.5) / per_axis;
        rem /= per_axis;
        if (i < n)
          p.x[i] = sub.lo[i] + u * (sub.hi[i] - sub.lo[i]);
        else
          p.t = sub.tlo + u * (sub.thi - sub.tlo);
      }
      const auto f = op.field_of_cube(k, b, p, conjugate);
      double sq = 0.0;
      for (double v : f) sq += v * v;
      const double r = std::sqrt(sq) / theta;
      res.value = std::min(res.value, r);
      res.max_ratio = std::max(res.max_ratio, r);
      ++res.points;
    }
  }
  return res;
}

namespace {

// Node positions of one leaf in the node order of the pass.
void leaf_nodes(const CantorTree& tree, const TargetRule& rule, std::size_t b, std::vector<double>& xs,
                std::vector<double>& ts) {
  const int n = tree.n();
  const double side = tree.ell(tree.k()), ext = std::pow(side, 2.0 * tree.s());
  const std::size_t nx = rule.x.size();
  std::size_t nodes_x = 1;
  for (int i = 0; i < n; ++i) nodes_x *= nx;
  xs.assign(nodes_x * rule.t.size() * n, 0.0);
  ts.assign(nodes_x * rule.t.size(), 0.0);
  for (std::size_t it = 0; it < rule.t.size(); ++it)
    for (std::size_t ix = 0; ix < nodes_x; ++ix) {
      const std::size_t node = it * nodes_x + ix;
      ts[node] = tree.leaf_t()[b] + ext * rule.t.nodes[it];
      std::size_t rem = ix;
      for (int i = 0; i < n; ++i) {
        xs[node * n + i] = tree.leaf_x()[b * n + i] + side * rule.x.nodes[rem % nx];
        rem /= nx;
      }
    }
}

double oscillation(const PassResult& pass, int n, double leaf_mass, std::span<const std::size_t> leaves,
                   const std::vector<std::vector<char>>* inside) {
  const std::size_t P = pass.nodes_per_target;
  std::vector<double> mean(n, 0.0);
  double mass = 0.0;
  for (std::size_t li = 0; li < leaves.size(); ++li)
    for (std::size_t m = 0; m < P; ++m) {
      if (inside && !(*inside)[li][m]) continue;
      const double w = leaf_mass * pass.node_weights[m];
      const double* f = &pass.node_values[(leaves[li] * P + m) * n];
      for (int i = 0; i < n; ++i) mean[i] += w * f[i];
      mass += w;
    }
  if (mass <= 0.0) return 0.0;
  for (double& v : mean) v /= mass;
  CompensatedSum acc;
  for (std::size_t li = 0; li < leaves.size(); ++li)
    for (std::size_t m = 0; m < P; ++m) {
      if (inside && !(*inside)[li][m]) continue;
      const double* f = &pass.node_values[(leaves[li] * P + m) * n];
      double sq = 0.0;
      for (int i = 0; i < n; ++i) sq += (f[i] - mean[i]) * (f[i] - mean[i]);
      acc.add(leaf_mass * pass.node_weights[m] * std::sqrt(sq));
    }
  return acc.value();
}

}  // namespace

double bmo_estimate(const CantorTree& tree, const QuadratureSpec& quad, const PassResult& pass,
                    std::size_t random_cubes, std::uint64_t seed, double rho) {
  if (pass.node_values.empty()) throw std::invalid_argument("pass must keep node values");
  const int n = tree.n(), k = tree.k();
  const std::size_t N = tree.leaves();
  const double lm = tree.leaf_mass();
  double best = 0.0;
  std::vector<std::size_t> ids;
  for (int j = 0; j <= k; ++j) {
    const std::size_t span = N / tree.count(j);
    for (std::size_t q = 0; q < tree.count(j); ++q) {
      ids.resize(span);
      for (std::size_t i = 0; i < span; ++i) ids[i] = q * span + i;
      const double big = tree.mu_of_cube(sp_dilate(tree.cube_at(j, q), rho));
      best = std::max(best, oscillation(pass, n, lm, ids, nullptr) / big);
    }
  }
  const TargetRule rule = make_target_rule(quad, false);
  std::vector<std::vector<double>> xs(N), ts(N);
  for (std::size_t b = 0; b < N; ++b) leaf_nodes(tree, rule, b, xs[b], ts[b]);
  auto rng = make_stream(seed, "bmo");
  const double lk = tree.ell(k);
  for (std::size_t r = 0; r < random_cubes; ++r) {
    // A random cube through a random node, at a log-uniform scale in [l_k / 2, 2].
    const std::size_t b = uniform_index(rng, N);
    const std::size_t m = uniform_index(rng, pass.nodes_per_target);
    const double side = std::exp(uniform(rng, std::log(lk / 2), std::log(2.0)));
    const double ext = std::pow(side, 2.0 * tree.s());
    SPoint corner(std::vector<double>(n), ts[b][m] - ext * uniform01(rng));
    for (int i = 0; i < n; ++i) corner.x[i] = xs[b][m * n + i] - side * uniform01(rng);
    const SPCube q(corner, side, tree.s());
    const Box qb = q.box();
    ids.clear();
    std::vector<std::vector<char>> inside;
    for (std::size_t c = 0; c < N; ++c) {
      std::vector<char> in(pass.nodes_per_target, 0);
      bool any = false;
      for (std::size_t v = 0; v < pass.nodes_per_target; ++v) {
        bool ok = ts[c][v] >= qb.tlo && ts[c][v] <= qb.thi;
        for (int i = 0; i < n && ok; ++i) ok = xs[c][v * n + i] >= qb.lo[i] && xs[c][v * n + i] <= qb.hi[i];
        in[v] = ok;
        any = any || ok;
      }
      if (any) {
        ids.push_back(c);
        inside.push_back(std::move(in));
      }
    }
    const double big = tree.mu_of_cube(sp_dilate(q, rho));
    if (big > 0.0) best = std::max(best, oscillation(pass, n, lm, ids, &inside) / big);
  }
  return best;
}

namespace {

std::uint64_t run_seed(std::uint64_t seed, const std::string& run_id) {
  auto g = make_stream(seed, run_id);
  return g();
}

}  // namespace

CapacityRow capacity_row(const RunSpec& run, const QuadratureSpec& quad, KernelMethod method,
                         const SamplingSpec& sampling, std::uint64_t seed, int workers) {
  CapacityRow row;
  row.run_id = run.run_id;
  row.n = run.params.n;
  row.s = run.params.s;
  row.d = run.params.d;
  row.lambda_spec = run.lambda_spec;
  row.k = static_cast<int>(run.lambdas.size());
  row.quad_order = quad.base_order;
  const auto start = std::chrono::steady_clock::now();
  try {
    const CantorTree tree = CantorTree::build(run.params, run.lambdas);
    const SingularOperator op(tree, quad, method, workers);
    const std::uint64_t rs = run_seed(seed, run.run_id);
    row.sigma_k = sigma_sum(tree, row.k);
    row.bound = 1.0 / std::sqrt(row.sigma_k);
    const PassResult pass = op.pass({}, false, false, true, true, true);
    row.l2_sq = compensated_sum(pass.l2);
    row.l2_ratio = row.l2_sq / row.sigma_k;
    GramMatrix G;
    G.N = op.size();
    G.data = pass.gram;
    const GammaAux ga = gamma_aux(G, tree.leaf_mass());
    row.opnorm_lower = ga.opnorm_lower;
    row.gamma_aux = ga.value;
    const GammaPlus gp = gamma_plus_lower(op, sampling.sup_budget, sampling.growth_trials, rs);
    row.supnorm = gp.supnorm;
    row.gamma_plus_lower = gp.value;
    row.corner_const = corner_constant(op, sampling.corner_per_axis).value;
    row.bmo_est = bmo_estimate(tree, quad, pass, sampling.bmo_cubes, rs);
    for (double v : {row.l2_sq, row.opnorm_lower, row.supnorm, row.corner_const, row.bmo_est})
      if (!(v > 0.0) || !std::isfinite(v)) throw std::runtime_error("non-positive or non-finite estimate");
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::vector<CapacityRow> ratio_report(const std::vector<RunSpec>& runs, const QuadratureSpec& quad,
                                      KernelMethod method, const SamplingSpec& sampling,
                                      std::uint64_t seed, int workers) {
  std::vector<CapacityRow> rows;
  rows.reserve(runs.size());
  for (const auto& r : runs) rows.push_back(capacity_row(r, quad, method, sampling, seed, workers));
  return rows;
}

double spread(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double lo = INFINITY, hi = 0.0;
  for (double x : v) {
    if (!(x > 0.0) || !std::isfinite(x)) return 0.0;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return hi / lo;
}

}  // namespace spcap
