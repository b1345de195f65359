#include "spcap/node_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

#include <omp.h>

namespace spcap {

void QuadratureSpec::validate() const {
  if (base_order < 2) throw std::invalid_argument("base_order must be >= 2");
  if (grading_levels < 0) throw std::invalid_argument("grading_levels must be >= 0");
  if (!(grading_ratio > 0.0 && grading_ratio < 1.0))
    throw std::invalid_argument("grading_ratio must lie in (0, 1)");
  if (!(target_rel_tol > 0.0)) throw std::invalid_argument("target_rel_tol must be positive");
}

QuadratureSpec QuadratureSpec::doubled() const {
  QuadratureSpec q = *this;
  q.base_order *= 2;
  q.grading_levels = std::max(1, 2 * grading_levels);
  return q;
}

TargetRule make_target_rule(const QuadratureSpec& q, bool conjugate) {
  q.validate();
  TargetRule r;
  r.x = graded_rule(0.0, 1.0, q.base_order, q.grading_levels, Grading::Both, q.grading_ratio);
  r.t = graded_rule(0.0, 1.0, q.base_order, q.grading_levels,
                    conjugate ? Grading::Right : Grading::Left, q.grading_ratio);
  return r;
}

namespace {

struct TimeEdges {
  std::vector<double> values;
  std::vector<int> lo_idx, hi_idx;
};

TimeEdges collect_edges(const BoxSet& src) {
  TimeEdges e;
  e.values.insert(e.values.end(), src.tlo.begin(), src.tlo.end());
  e.values.insert(e.values.end(), src.thi.begin(), src.thi.end());
  std::sort(e.values.begin(), e.values.end());
  e.values.erase(std::unique(e.values.begin(), e.values.end()), e.values.end());
  auto find = [&](double v) {
    return static_cast<int>(std::lower_bound(e.values.begin(), e.values.end(), v) - e.values.begin());
  };
  for (std::size_t b = 0; b < src.size(); ++b) {
    e.lo_idx.push_back(find(src.tlo[b]));
    e.hi_idx.push_back(find(src.thi[b]));
  }
  return e;
}

void process_target(const PassRequest& req, const TargetRule& rule, const TimeEdges& edges,
                    std::size_t a, PassResult& out, double* gram) {
  const BoxSet& tg = *req.targets;
  const BoxSet& src = *req.sources;
  const BoxFieldEvaluator& ev = *req.eval;
  const int n = tg.n;
  const std::size_t S = src.size();
  const bool conj = req.conjugate;
  const double inv_alpha = 1.0 / (2.0 * ev.s());

  std::vector<double> f(n), fb(n), x(n);
  std::vector<double> vals;
  std::vector<std::size_t> nz;
  if (gram) {
    vals.assign(S * n, 0.0);
    std::fill(gram, gram + S * S, 0.0);
  }
  std::vector<double> T(edges.values.size()), Ta(edges.values.size());
  double* row = req.want_matrix ? out.matrix.data() + a * S * n : nullptr;
  double avg[8] = {0};
  if (n > 8) throw std::invalid_argument("spatial dimension above 8 is not supported");
  CompensatedSum l2, l1;

  const std::size_t nx = rule.x.size();
  std::size_t nodes_x = 1;
  for (int i = 0; i < n; ++i) nodes_x *= nx;

  for (std::size_t it = 0; it < rule.t.size(); ++it) {
    const double t = tg.tlo[a] + (tg.thi[a] - tg.tlo[a]) * rule.t.nodes[it];
    if (ev.analytic()) {
      for (std::size_t e = 0; e < edges.values.size(); ++e) {
        const double v = conj ? edges.values[e] - t : t - edges.values[e];
        T[e] = v;
        Ta[e] = v > 0.0 ? std::pow(v, inv_alpha) : 0.0;
      }
    }
    for (std::size_t ix = 0; ix < nodes_x; ++ix) {
      double w = rule.t.weights[it];
      std::size_t rem = ix;
      for (int i = 0; i < n; ++i) {
        const std::size_t k = rem % nx;
        rem /= nx;
        x[i] = tg.lo[a * n + i] + (tg.hi[a * n + i] - tg.lo[a * n + i]) * rule.x.nodes[k];
        w *= rule.x.weights[k];
      }
      std::fill(f.begin(), f.end(), 0.0);
      for (std::size_t b = 0; b < S; ++b) {
        if (ev.analytic()) {
          const int i2 = conj ? edges.hi_idx[b] : edges.lo_idx[b];
          const int i1 = conj ? edges.lo_idx[b] : edges.hi_idx[b];
          if (T[i2] <= 0.0) continue;
          const double za = x[0] - src.lo[b], zb = x[0] - src.hi[b];
          const double v = (ev.G(za, T[i2], Ta[i2]) - ev.G(za, T[i1], Ta[i1])) -
                           (ev.G(zb, T[i2], Ta[i2]) - ev.G(zb, T[i1], Ta[i1]));
          fb[0] = conj ? -v : v;
        } else {
          if (conj ? src.thi[b] <= t : src.tlo[b] >= t) continue;
          ev.field(&src.lo[b * n], &src.hi[b * n], src.tlo[b], src.thi[b], x.data(), t, conj, fb.data());
        }
        for (int i = 0; i < n; ++i) {
          const double c = src.coef[b] * fb[i];
          f[i] += c;
          if (row) row[b * n + i] += w * c;
          if (gram) vals[b * n + i] = c;
        }
        if (gram) nz.push_back(b);
      }
      if (gram) {
        // upper triangle of the node's rank-one contribution
        for (std::size_t p = 0; p < nz.size(); ++p) {
          const double* vb = &vals[nz[p] * n];
          double* g = gram + nz[p] * S;
          for (std::size_t q = p; q < nz.size(); ++q) {
            const double* vc = &vals[nz[q] * n];
            double dot = 0.0;
            for (int i = 0; i < n; ++i) dot += vb[i] * vc[i];
            g[nz[q]] += w * dot;
          }
        }
        for (std::size_t b : nz)
          for (int i = 0; i < n; ++i) vals[b * n + i] = 0.0;
        nz.clear();
      }
      if (req.want_nodes) {
        double* dst = out.node_values.data() + ((a * out.nodes_per_target) + it * nodes_x + ix) * n;
        for (int i = 0; i < n; ++i) dst[i] = f[i];
      }
      double sq = 0.0;
      for (int i = 0; i < n; ++i) {
        avg[i] += w * f[i];
        sq += f[i] * f[i];
      }
      l2.add(w * sq);
      l1.add(w * std::sqrt(sq));
    }
  }
  const double mass = tg.coef[a] * tg.volume(a);
  for (int i = 0; i < n; ++i) out.avg[a * n + i] = avg[i];
  out.l2[a] = mass * l2.value();
  out.l1[a] = mass * l1.value();
  if (gram)
    for (std::size_t i = 0; i < S * S; ++i) gram[i] *= mass;
}

// Adds one target's upper-triangle Gram block, mirrored.
void add_gram(PassResult& out, const double* local, std::size_t S) {
  for (std::size_t b = 0; b < S; ++b)
    for (std::size_t c = b; c < S; ++c) {
      out.gram[b * S + c] += local[b * S + c];
      if (c != b) out.gram[c * S + b] += local[b * S + c];
    }
}

PassResult allocate(const PassRequest& req) {
  if (!req.eval || !req.targets || !req.sources) throw std::invalid_argument("incomplete pass request");
  req.quad.validate();
  PassResult out;
  out.n = req.targets->n;
  const std::size_t A = req.targets->size();
  out.avg.assign(A * out.n, 0.0);
  out.l2.assign(A, 0.0);
  out.l1.assign(A, 0.0);
  if (req.want_matrix) out.matrix.assign(A * req.sources->size() * out.n, 0.0);
  if (req.want_gram) out.gram.assign(req.sources->size() * req.sources->size(), 0.0);
  const TargetRule rule = make_target_rule(req.quad, req.conjugate);
  std::size_t nodes_x = 1;
  for (int i = 0; i < out.n; ++i) nodes_x *= rule.x.size();
  out.nodes_per_target = nodes_x * rule.t.size();
  if (req.want_nodes) {
    out.node_values.assign(A * out.nodes_per_target * out.n, 0.0);
    out.node_weights.reserve(out.nodes_per_target);
    for (std::size_t it = 0; it < rule.t.size(); ++it)
      for (std::size_t ix = 0; ix < nodes_x; ++ix) {
        double w = rule.t.weights[it];
        std::size_t rem = ix;
        for (int i = 0; i < out.n; ++i) {
          w *= rule.x.weights[rem % rule.x.size()];
          rem /= rule.x.size();
        }
        out.node_weights.push_back(w);
      }
  }
  return out;
}

}  // namespace

PassResult run_pass_serial(const PassRequest& req) {
  PassResult out = allocate(req);
  const TargetRule rule = make_target_rule(req.quad, req.conjugate);
  const TimeEdges edges = collect_edges(*req.sources);
  const std::size_t S = req.sources->size();
  std::vector<double> local(req.want_gram ? S * S : 0);
  for (std::size_t a = 0; a < req.targets->size(); ++a) {
    process_target(req, rule, edges, a, out, req.want_gram ? local.data() : nullptr);
    if (req.want_gram) add_gram(out, local.data(), S);
  }
  return out;
}

PassResult run_pass_parallel(const PassRequest& req, int workers) {
  PassResult out = allocate(req);
  const TargetRule rule = make_target_rule(req.quad, req.conjugate);
  const TimeEdges edges = collect_edges(*req.sources);
  const long A = static_cast<long>(req.targets->size());
  const int threads = workers > 0 ? workers : omp_get_max_threads();
  const std::size_t S = req.sources->size();
  // With a Gram matrix the targets run in chunks whose blocks are summed in
  // target order, so the result does not depend on the thread count.
  const long chunk = req.want_gram ? std::max(1, threads) : A;
  std::vector<double> local(req.want_gram ? static_cast<std::size_t>(chunk) * S * S : 0);
  // Exceptions must not escape the parallel region.
  std::exception_ptr err;
  for (long a0 = 0; a0 < A && !err; a0 += std::max(1L, chunk)) {
    const long a1 = std::min(A, a0 + std::max(1L, chunk));
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (long a = a0; a < a1; ++a) {
      try {
        process_target(req, rule, edges, static_cast<std::size_t>(a), out,
                       req.want_gram ? local.data() + (a - a0) * S * S : nullptr);
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
    if (req.want_gram && !err)
      for (long a = a0; a < a1; ++a) add_gram(out, local.data() + (a - a0) * S * S, S);
  }
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace spcap
