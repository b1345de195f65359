#include "spcap/operator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <omp.h>

#include "spcap/random.hpp"

namespace spcap {

CubeVector PairKernelMatrix::apply(std::span<const double> w) const {
  if (w.size() != N) throw std::invalid_argument("weight vector has wrong length");
  CubeVector out(N, n);
  for (std::size_t a = 0; a < N; ++a)
    for (int i = 0; i < n; ++i) {
      CompensatedSum acc;
      for (std::size_t b = 0; b < N; ++b) acc.add(at(a, b, i) * w[b]);
      out.at(a, i) = acc.value();
    }
  return out;
}

namespace {

// Constant plus a fixed pseudo-random perturbation. The tree is symmetric, so
// an exactly constant start can miss the top singular direction entirely.
std::vector<double> power_start(std::size_t N) {
  auto rng = make_stream(0, "power-iteration");
  std::vector<double> v(N);
  for (double& x : v) x = 1.0 + 0.5 * uniform(rng, -1.0, 1.0);
  return v;
}

}  // namespace

OpNormResult op_norm_lower(const PairKernelMatrix& M, std::span<const double> masses,
                           double rel_tol, int max_iter) {
  const std::size_t N = M.N;
  const int n = M.n;
  if (masses.size() != N) throw std::invalid_argument("mass vector has wrong length");
  OpNormResult res;
  if (N == 0) return res;
  std::vector<double> sq(N);
  for (std::size_t a = 0; a < N; ++a) {
    if (!(masses[a] > 0.0)) throw std::invalid_argument("masses must be positive");
    sq[a] = std::sqrt(masses[a]);
  }
  auto A = [&](std::size_t a, std::size_t b, int i) { return sq[a] / sq[b] * M.at(a, b, i); };

  std::vector<double> v = power_start(N), u(N * n), w(N);
  double prev = -1.0;
  for (int iter = 1; iter <= max_iter; ++iter) {
    double vv = 0.0;
    for (double x : v) vv += x * x;
    const double vn = std::sqrt(vv);
    for (double& x : v) x /= vn;
    double uu = 0.0;
    for (std::size_t a = 0; a < N; ++a)
      for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t b = 0; b < N; ++b) acc += A(a, b, i) * v[b];
        u[a * n + i] = acc;
        uu += acc * acc;
      }
    const double sigma = std::sqrt(uu);  // ||A v|| with ||v|| = 1
    res.value = std::max(res.value, sigma);
    res.iterations = iter;
    if (sigma == 0.0) {
      res.converged = true;
      return res;
    }
    if (prev >= 0.0 && std::abs(sigma - prev) <= rel_tol * sigma) {
      res.converged = true;
      return res;
    }
    prev = sigma;
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t a = 0; a < N; ++a)
      for (int i = 0; i < n; ++i) {
        const double ua = u[a * n + i];
        for (std::size_t b = 0; b < N; ++b) w[b] += A(a, b, i) * ua;
      }
    v.swap(w);
  }
  return res;
}

OpNormResult op_norm_piecewise(const GramMatrix& G, std::span<const double> masses, double rel_tol,
                               int max_iter) {
  const std::size_t N = G.N;
  if (masses.size() != N) throw std::invalid_argument("mass vector has wrong length");
  OpNormResult res;
  if (N == 0) return res;
  std::vector<double> isq(N);
  for (std::size_t b = 0; b < N; ++b) {
    if (!(masses[b] > 0.0)) throw std::invalid_argument("masses must be positive");
    isq[b] = 1.0 / std::sqrt(masses[b]);
  }
  auto apply = [&](const std::vector<double>& v, std::vector<double>& u) {
    double rq = 0.0;
    for (std::size_t b = 0; b < N; ++b) {
      double acc = 0.0;
      for (std::size_t c = 0; c < N; ++c) acc += isq[b] * G.at(b, c) * isq[c] * v[c];
      u[b] = acc;
      rq += v[b] * acc;
    }
    return std::sqrt(std::max(rq, 0.0));
  };
  auto normalize = [](std::vector<double>& v) {
    double vv = 0.0;
    for (double x : v) vv += x * x;
    const double vn = std::sqrt(vv);
    if (vn > 0.0)
      for (double& x : v) x /= vn;
    return vn;
  };
  std::vector<double> v(N), u(N);
  // f = 1, i.e. v proportional to sqrt(mu): the Rayleigh quotient of the constant is a floor.
  for (std::size_t b = 0; b < N; ++b) v[b] = 1.0 / isq[b];
  normalize(v);
  res.value = apply(v, u);
  v = power_start(N);
  for (std::size_t b = 0; b < N; ++b) v[b] /= isq[b];
  double prev = -1.0;
  for (int iter = 1; iter <= max_iter; ++iter) {
    if (normalize(v) == 0.0) break;
    const double sigma = apply(v, u);
    res.value = std::max(res.value, sigma);
    res.iterations = iter;
    if (prev >= 0.0 && std::abs(sigma - prev) <= rel_tol * sigma) {
      res.converged = true;
      return res;
    }
    prev = sigma;
    v.swap(u);
  }
  return res;
}

SingularOperator::SingularOperator(const CantorTree& tree, QuadratureSpec quad, KernelMethod method,
                                   int workers)
    : tree_(tree), quad_(quad), eval_(tree.n(), tree.s(), method), workers_(workers) {
  quad_.validate();
  leaves_ = BoxSet::leaves(tree_);
}

std::vector<double> SingularOperator::field(std::span<const double> w, const SPoint& p, double eps,
                                            bool conjugate) const {
  const int n = this->n();
  if (static_cast<int>(p.dim()) != n) throw std::invalid_argument("dimension mismatch");
  if (!w.empty() && w.size() != size()) throw std::invalid_argument("weight vector has wrong length");
  if (eps < 0.0) throw std::invalid_argument("eps must be >= 0");
  if (eps > 0.0 && n != 1) throw std::invalid_argument("truncated fields are implemented for n = 1");
  Box ball;
  if (eps > 0.0) {
    const double et = std::pow(eps, 2.0 * tree_.s());
    ball.lo = {p.x[0] - eps};
    ball.hi = {p.x[0] + eps};
    ball.tlo = p.t - et;
    ball.thi = p.t + et;
  }
  std::vector<CompensatedSum> acc(n);
  std::vector<double> fb(n), fc(n);
  for (std::size_t b = 0; b < size(); ++b) {
    const double c = leaves_.coef[b] * (w.empty() ? 1.0 : w[b]);
    if (c == 0.0) continue;
    const Box box = leaves_.box(b);
    eval_.field(box, p, conjugate, fb);
    if (eps > 0.0) {
      const Box inner = intersect(box, ball);
      if (!inner.empty()) {
        eval_.field(inner, p, conjugate, fc);
        for (int i = 0; i < n; ++i) fb[i] -= fc[i];
      }
    }
    for (int i = 0; i < n; ++i) acc[i].add(c * fb[i]);
  }
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = acc[i].value();
  return out;
}

std::vector<double> SingularOperator::field_of_cube(int j, std::size_t index, const SPoint& p,
                                                    bool conjugate) const {
  const std::size_t span = tree_.count(tree_.k()) / tree_.count(j);
  if (index >= tree_.count(j)) throw std::out_of_range("cube index out of range");
  std::vector<double> w(size(), 0.0);
  std::fill(w.begin() + index * span, w.begin() + (index + 1) * span, 1.0);
  return field(w, p, 0.0, conjugate);
}

PassResult SingularOperator::pass_on(const BoxSet& targets, const BoxSet& sources, bool conjugate,
                                     bool want_matrix, bool want_nodes, bool parallel,
                                     bool want_gram) const {
  PassRequest req;
  req.eval = &eval_;
  req.targets = &targets;
  req.sources = &sources;
  req.quad = quad_;
  req.conjugate = conjugate;
  req.want_matrix = want_matrix;
  req.want_nodes = want_nodes;
  req.want_gram = want_gram;
  return parallel ? run_pass_parallel(req, workers_) : run_pass_serial(req);
}

PassResult SingularOperator::pass(std::span<const double> w, bool conjugate, bool want_matrix,
                                  bool want_nodes, bool parallel, bool want_gram) const {
  const BoxSet sources = BoxSet::leaves(tree_, w);
  return pass_on(leaves_, sources, conjugate, want_matrix, want_nodes, parallel, want_gram);
}

std::vector<double> SingularOperator::pair_integral(std::size_t a, std::size_t b, bool conjugate) const {
  if (a >= size() || b >= size()) throw std::out_of_range("cube index out of range");
  BoxSet ta, sb;
  ta.n = sb.n = n();
  ta.push(leaves_.box(a), leaves_.coef[a], a);
  sb.push(leaves_.box(b), leaves_.coef[b], b);
  const PassResult r = pass_on(ta, sb, conjugate, false, false, false);
  return std::vector<double>(r.avg.begin(), r.avg.end());
}

EnergyResult SingularOperator::energy(std::span<const double> w, bool conjugate) const {
  const PassResult r = pass(w, conjugate, false, false);
  EnergyResult e;
  e.averages.n = n();
  e.averages.values = r.avg;
  e.per_cube_l2 = r.l2;
  e.l2_sq = compensated_sum(r.l2);
  return e;
}

double SingularOperator::l2_norm_sq(std::span<const double> w, bool conjugate) const {
  return energy(w, conjugate).l2_sq;
}

PairKernelMatrix SingularOperator::averaged_matrix(bool conjugate) const {
  PassResult r = pass({}, conjugate, true, false);
  PairKernelMatrix M;
  M.N = size();
  M.n = n();
  M.data = std::move(r.matrix);
  return M;
}

GramMatrix SingularOperator::gram_matrix(bool conjugate) const {
  PassResult r = pass({}, conjugate, false, false, true, true);
  GramMatrix G;
  G.N = size();
  G.data = std::move(r.gram);
  return G;
}

CancellationResult SingularOperator::cancellation(const Box& R) const {
  const BoxSet part = BoxSet::clipped(tree_, R);
  CancellationResult res;
  res.integral.assign(n(), 0.0);
  if (part.size() == 0) return res;
  const PassResult r = pass_on(part, part, false, false, false);
  for (int i = 0; i < n(); ++i) {
    CompensatedSum acc;
    for (std::size_t a = 0; a < part.size(); ++a) acc.add(part.coef[a] * part.volume(a) * r.avg[a * n() + i]);
    res.integral[i] = acc.value();
  }
  res.abs_integral = compensated_sum(r.l1);
  double norm = 0.0;
  for (double v : res.integral) norm += v * v;
  res.relative = res.abs_integral > 0.0 ? std::sqrt(norm) / res.abs_integral : 0.0;
  return res;
}

SupNormResult SingularOperator::sup_norm_estimate(std::size_t budget, std::uint64_t seed) const {
  const int n = this->n();
  const double s = tree_.s();
  std::vector<SPoint> pts;
  const std::size_t N = size();
  const double side = tree_.ell(tree_.k()), ext = std::pow(side, 2 * s);
  for (std::size_t b = 0; b < N; ++b) {
    const SPCube q(SPoint(std::vector<double>(tree_.leaf_x().begin() + b * n,
                                              tree_.leaf_x().begin() + (b + 1) * n),
                          tree_.leaf_t()[b]),
                   side, s);
    pts.push_back(q.center());
    pts.push_back(corner_subcube(q, Corner::UpperRight).center());
    for (int m = -3; m <= 2; ++m) {
      SPoint above = q.center(), below = q.center();
      above.t = q.corner().t + ext + ext * std::pow(2.0, m);
      below.t = q.corner().t - ext * std::pow(2.0, m);
      pts.push_back(above);
      pts.push_back(below);
    }
  }
  auto rng = make_stream(seed, "sup_norm");
  const Box big = sp_dilate(tree_.root(), 2.0).box();
  for (std::size_t i = 0; i < budget; ++i) {
    SPoint p(std::vector<double>(n), 0.0);
    for (int d = 0; d < n; ++d) p.x[d] = uniform(rng, big.lo[d], big.hi[d]);
    p.t = uniform(rng, big.tlo, big.thi);
    pts.push_back(std::move(p));
  }
  std::vector<double> mag(pts.size());
  const long P = static_cast<long>(pts.size());
  const int threads = workers_ > 0 ? workers_ : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
  for (long i = 0; i < P; ++i) {
    const auto f = field({}, pts[i]);
    double sq = 0.0;
    for (double v : f) sq += v * v;
    mag[i] = std::sqrt(sq);
  }
  SupNormResult res;
  res.samples = pts.size();
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (mag[i] > res.value) {
      res.value = mag[i];
      res.argmax = pts[i];
    }
  return res;
}

}  // namespace spcap
