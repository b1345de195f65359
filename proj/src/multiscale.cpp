#include "spcap/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spcap/random.hpp"

namespace spcap {

double MartingaleDecomposition::mass(int j) const {
  return 1.0 / std::pow(static_cast<double>(branching), j);
}

MartingaleDecomposition project(const CantorTree& tree, const CubeVector& leaf_averages) {
  if (leaf_averages.size() != tree.leaves()) throw std::invalid_argument("need one value per generation-k cube");
  MartingaleDecomposition dec;
  dec.k = tree.k();
  dec.n = leaf_averages.n;
  dec.branching = tree.branching();
  const int n = dec.n;
  const std::size_t B = dec.branching;
  dec.S.resize(dec.k + 1);
  dec.S[dec.k] = leaf_averages;
  for (int j = dec.k - 1; j >= 0; --j) {
    const CubeVector& child = dec.S[j + 1];
    CubeVector parent(tree.count(j), n);
    for (std::size_t q = 0; q < parent.size(); ++q)
      for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < B; ++c) acc += child.at(q * B + c, i);
        parent.at(q, i) = acc / static_cast<double>(B);
      }
    dec.S[j] = std::move(parent);
  }
  dec.D.resize(dec.k);
  for (int j = 0; j < dec.k; ++j) {
    CubeVector d(tree.count(j + 1), n);
    for (std::size_t c = 0; c < d.size(); ++c)
      for (int i = 0; i < n; ++i) d.at(c, i) = dec.S[j + 1].at(c, i) - dec.S[j].at(c / B, i);
    dec.D[j] = std::move(d);
  }
  return dec;
}

namespace {

struct QRef {
  int j;
  std::size_t idx;
};

// <D_Q1 f, D_Q2 f> in L^2(mu_k).
double d_inner(const MartingaleDecomposition& dec, QRef a, QRef b) {
  if (a.j > b.j) std::swap(a, b);
  const std::size_t B = dec.branching;
  const int n = dec.n;
  // Ancestor of b at generation a.j.
  std::size_t anc = b.idx;
  for (int g = b.j; g > a.j; --g) anc /= B;
  if (anc != a.idx) return 0.0;  // disjoint supports
  double acc = 0.0;
  if (a.j == b.j) {
    for (std::size_t c = 0; c < B; ++c) {
      const std::size_t ch = a.idx * B + c;
      for (int i = 0; i < n; ++i) acc += dec.mass(a.j + 1) * dec.D[a.j].at(ch, i) * dec.D[a.j].at(ch, i);
    }
    return acc;
  }
  // D_{Q1} is constant on the child of Q1 containing Q2.
  std::size_t child = b.idx;
  for (int g = b.j; g > a.j + 1; --g) child /= B;
  for (std::size_t c = 0; c < B; ++c) {
    const std::size_t ch = b.idx * B + c;
    for (int i = 0; i < n; ++i) acc += dec.mass(b.j + 1) * dec.D[a.j].at(child, i) * dec.D[b.j].at(ch, i);
  }
  return acc;
}

}  // namespace

double orthogonality_check(const MartingaleDecomposition& dec, std::size_t max_pairs, std::uint64_t seed) {
  std::vector<QRef> cubes;
  for (int j = 0; j < dec.k; ++j)
    for (std::size_t q = 0; q < dec.S[j].size(); ++q) cubes.push_back({j, q});
  double norm = 0.0;
  const CubeVector& f = dec.S[dec.k];
  for (double v : f.values) norm += v * v;
  norm *= dec.mass(dec.k);
  if (norm == 0.0) return 0.0;
  const std::size_t M = cubes.size();
  const std::size_t pairs = M * (M - (M > 0 ? 1 : 0)) / 2;
  double worst = 0.0;
  if (pairs <= max_pairs) {
    for (std::size_t a = 0; a < M; ++a)
      for (std::size_t b = a + 1; b < M; ++b) worst = std::max(worst, std::abs(d_inner(dec, cubes[a], cubes[b])));
  } else {
    auto rng = make_stream(seed, "orthogonality");
    for (std::size_t t = 0; t < max_pairs; ++t) {
      const std::size_t a = uniform_index(rng, M);
      std::size_t b = uniform_index(rng, M);
      if (a == b) b = (b + 1) % M;
      worst = std::max(worst, std::abs(d_inner(dec, cubes[a], cubes[b])));
    }
  }
  return worst / norm;
}

double telescoping_error(const MartingaleDecomposition& dec) {
  const CubeVector& f = dec.S[dec.k];
  const std::size_t B = dec.branching;
  double worst = 0.0, scale = 0.0;
  for (std::size_t leaf = 0; leaf < f.size(); ++leaf)
    for (int i = 0; i < dec.n; ++i) {
      double v = dec.S[0].at(0, i);
      // Ancestors from the root downward.
      std::vector<std::size_t> chain(dec.k + 1);
      chain[dec.k] = leaf;
      for (int j = dec.k; j > 0; --j) chain[j - 1] = chain[j] / B;
      for (int j = 0; j < dec.k; ++j) v += dec.D[j].at(chain[j + 1], i);
      worst = std::max(worst, std::abs(v - f.at(leaf, i)));
      scale = std::max(scale, std::abs(f.at(leaf, i)));
    }
  return scale > 0.0 ? worst / scale : worst;
}

EnergyIdentity energy_identity_check(const MartingaleDecomposition& dec) {
  EnergyIdentity e;
  CompensatedSum lhs, rhs;
  for (double v : dec.S[dec.k].values) lhs.add(dec.mass(dec.k) * v * v);
  for (int j = 0; j < dec.k; ++j)
    for (double v : dec.D[j].values) rhs.add(dec.mass(j + 1) * v * v);
  e.lhs = lhs.value();
  e.rhs = rhs.value();
  for (int i = 0; i < dec.n; ++i) e.mean_sq += dec.S[0].at(0, i) * dec.S[0].at(0, i);
  if (e.lhs == 0.0) {
    e.degenerate = true;
    return e;
  }
  e.rel_diff = std::abs(e.lhs - e.rhs) / e.lhs;
  e.pythagoras_rel = std::abs(e.lhs - e.mean_sq - e.rhs) / e.lhs;
  e.allowed = std::max(1e-10, 2.0 * std::sqrt(e.mean_sq) * std::sqrt(e.lhs) / e.lhs);
  return e;
}

double p_of(const CantorTree& tree, int j) {
  double acc = 0.0;
  for (int r = 0; r <= j; ++r) acc += tree.theta(r) * tree.ell(j) / tree.ell(r);
  return acc;
}

std::vector<double> theta_from_lambdas(const std::vector<double>& lambdas, int n, int d) {
  std::vector<double> th{1.0};
  const double branch = (d + 1.0) * std::pow(d, n);
  for (double l : lambdas) th.push_back(th.back() / (branch * std::pow(l, n + 1)));
  return th;
}

double ScaleAnalysis::sigma_range(int a, int b) const {
  a = std::max(a, 0);
  b = std::min(b, k + 1);
  if (b <= a) return 0.0;
  return sigma[b - 1] - (a > 0 ? sigma[a - 1] : 0.0);
}

std::vector<int> stop_scales(const std::vector<double>& theta, double B, int k) {
  if (!(B > 1.0)) throw std::invalid_argument("B must exceed 1");
  if (k < 0 || static_cast<int>(theta.size()) < k + 1) throw std::invalid_argument("theta too short");
  std::vector<int> stop{0};
  while (stop.back() < k) {
    const int sj = stop.back();
    int i = sj + 1;
    while (!(i == k || theta[i] > B * theta[sj] || theta[i] < theta[sj] / B)) ++i;
    stop.push_back(i);
  }
  return stop;
}

ScaleAnalysis analyze_scales(std::vector<double> theta, std::vector<double> lambdas, double B, int N_L) {
  if (theta.empty()) throw std::invalid_argument("theta must be non-empty");
  ScaleAnalysis a;
  a.k = static_cast<int>(theta.size()) - 1;
  if (!lambdas.empty() && static_cast<int>(lambdas.size()) != a.k)
    throw std::invalid_argument("need k lambdas for k+1 thetas");
  a.theta = std::move(theta);
  a.lambdas = std::move(lambdas);
  a.B = B;
  a.N_L = N_L;
  double acc = 0.0;
  for (double t : a.theta) a.sigma.push_back(acc += t * t);
  a.good_scale.assign(a.k + 1, false);
  if (!a.lambdas.empty()) {
    // p_j = theta_j + lambda_j p_{j-1}
    a.p.resize(a.k + 1);
    a.p[0] = a.theta[0];
    for (int j = 1; j <= a.k; ++j) a.p[j] = a.theta[j] + a.lambdas[j - 1] * a.p[j - 1];
    for (int j = 0; j <= a.k; ++j) a.good_scale[j] = a.p[j] <= kGoodScaleFactor * a.theta[j];
  }
  a.stop = stop_scales(a.theta, B, a.k);
  for (std::size_t j = 0; j + 1 < a.stop.size(); ++j) {
    ScaleInterval I;
    I.start = a.stop[j];
    I.end = a.stop[j + 1];
    I.sigma = a.sigma_range(I.start, I.end);
    for (int i = I.start; i < I.end; ++i)
      if (a.good_scale[i]) I.sigma_good += a.theta[i] * a.theta[i];
    I.good = !a.p.empty() && I.sigma_good >= kGoodIntervalFraction * I.sigma;
    I.is_long = I.end - I.start >= N_L;
    a.intervals.push_back(I);
  }
  return a;
}

ScaleAnalysis analyze_scales(const CantorTree& tree, double B, int N_L) {
  std::vector<double> th;
  for (int j = 0; j <= tree.k(); ++j) th.push_back(tree.theta(j));
  return analyze_scales(th, tree.lambdas(), B, N_L);
}

std::vector<LemmaCheck> lemma_suite(const ScaleAnalysis& a, int d) {
  constexpr double slack = 1e-12;
  std::vector<LemmaCheck> out;
  const double total = a.sigma_range(0, a.k);  // sigma([0, k-1])

  LemmaCheck young;
  young.name = "young_bound";
  if (a.p.empty() || d < 2) {
    young.applicable = false;
    young.note = "theta not generated by a known lambda sequence";
  } else {
    bool admissible = true;
    for (double l : a.lambdas) admissible = admissible && l <= 1.0 / d;
    for (int j = 0; j <= a.k; ++j) {
      young.lhs += a.p[j] * a.p[j];
      young.rhs += a.theta[j] * a.theta[j];
    }
    young.rhs *= std::pow(d / (d - 1.0), 2);
    if (!admissible) {
      young.applicable = false;
      young.note = "some lambda exceeds 1/d";
    } else {
      young.pass = young.lhs <= young.rhs * (1 + slack);
    }
  }
  out.push_back(young);

  LemmaCheck bad;
  bad.name = "bad_scales";
  if (a.p.empty()) {
    bad.applicable = false;
  } else {
    for (int j = 0; j < a.k; ++j)
      if (!a.good_scale[j]) bad.lhs += a.theta[j] * a.theta[j];
    bad.rhs = total / 400.0;
    bad.pass = bad.lhs <= bad.rhs * (1 + slack) + slack * total;
  }
  out.push_back(bad);

  LemmaCheck recomb;
  recomb.name = "good_interval_recombination";
  if (a.p.empty()) {
    recomb.applicable = false;
  } else {
    double good = 0.0;
    for (const auto& I : a.intervals)
      if (I.good) good += I.sigma;
    recomb.lhs = total;
    recomb.rhs = 399.0 / 398.0 * good;
    recomb.pass = recomb.lhs <= recomb.rhs * (1 + slack);
  }
  out.push_back(recomb);

  LemmaCheck endpoint;
  endpoint.name = "good_interval_endpoint";
  if (a.p.empty()) {
    endpoint.applicable = false;
  } else {
    const double c = 400.0 * std::pow(a.B, 4);
    double worst = -INFINITY;
    for (const auto& I : a.intervals) {
      if (!I.good) continue;
      int j0 = I.start;
      while (j0 < I.end && !a.good_scale[j0]) ++j0;
      const double lhs = j0 - I.start, rhs = c / (c + 1.0) * (I.end - I.start);
      if (lhs - rhs > worst) {
        worst = lhs - rhs;
        endpoint.lhs = lhs;
        endpoint.rhs = rhs;
      }
      if (lhs > rhs * (1 + slack)) endpoint.pass = false;
    }
    if (worst == -INFINITY) endpoint.note = "no good interval";
  }
  out.push_back(endpoint);
  return out;
}

}  // namespace spcap
