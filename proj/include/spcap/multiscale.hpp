#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "spcap/cantor.hpp"
#include "spcap/operator.hpp"

namespace spcap {

/// Averages S_Q f for every cube of generations 0..k and the differences
/// D_Q f stored on the children: D[j] lives on generation j+1 and holds
/// S_P f - S_parent(P) f.
struct MartingaleDecomposition {
  int k = 0;
  int n = 1;
  std::size_t branching = 1;
  std::vector<CubeVector> S;  // S[j], j = 0..k
  std::vector<CubeVector> D;  // D[j], j = 0..k-1
  /// mu_k mass of one generation-j cube.
  double mass(int j) const;
};

/// Exact tree aggregation: every child carries the same mass.
MartingaleDecomposition project(const CantorTree& tree, const CubeVector& leaf_averages);

/// max |<D_Q1 f, D_Q2 f>| over distinct cubes of generations 0..k-1, divided
/// by ||f||^2. Exhaustive up to max_pairs pairs, random sample beyond.
double orthogonality_check(const MartingaleDecomposition& dec, std::size_t max_pairs = 10000,
                           std::uint64_t seed = 1);

/// max |S_0 + sum_j D_j - S_k| over the leaves, relative to max |S_k|.
double telescoping_error(const MartingaleDecomposition& dec);

struct EnergyIdentity {
  double lhs = 0.0;        // ||S_k f||^2
  double rhs = 0.0;        // sum_Q ||D_Q f||^2
  double mean_sq = 0.0;    // |mean f|^2
  double rel_diff = 0.0;   // |lhs - rhs| / lhs
  double pythagoras_rel = 0.0;  // |lhs - mean_sq - rhs| / lhs
  double allowed = 0.0;    // max(1e-10, 2 |mean f| ||f|| / lhs)
  bool degenerate = false;
  bool holds() const { return !degenerate && rel_diff <= allowed; }
};

EnergyIdentity energy_identity_check(const MartingaleDecomposition& dec);

/// Sum_{r <= j} theta_r l_j / l_r for a generation-j cube.
double p_of(const CantorTree& tree, int j);

struct ScaleInterval {
  int start = 0, end = 0;  // [start, end)
  double sigma = 0.0;
  double sigma_good = 0.0;
  bool good = false;
  bool is_long = false;
};

struct ScaleAnalysis {
  std::vector<double> theta;    // theta_0..theta_k
  std::vector<double> lambdas;  // lambda_1..lambda_k; empty if unknown
  std::vector<double> sigma;    // prefix sums of theta^2
  std::vector<double> p;        // empty if lambdas unknown
  double B = 100.0;
  int N_L = 10;
  int k = 0;
  std::vector<int> stop;
  std::vector<bool> good_scale;  // per scale 0..k; all false if p unknown
  std::vector<ScaleInterval> intervals;

  /// sigma(A) over the integer points of [a, b).
  double sigma_range(int a, int b) const;
};

constexpr double kGoodScaleFactor = 40.0;
constexpr double kGoodIntervalFraction = 1.0 / 400.0;

std::vector<int> stop_scales(const std::vector<double>& theta, double B, int k);
ScaleAnalysis analyze_scales(std::vector<double> theta, std::vector<double> lambdas, double B, int N_L);
ScaleAnalysis analyze_scales(const CantorTree& tree, double B, int N_L);

struct LemmaCheck {
  std::string name;
  double lhs = 0.0, rhs = 0.0;
  bool applicable = true;
  bool pass = true;
  std::string note;
};

/// Young bound, bad-scale bound, good-interval recombination and the
/// endpoint bound for each good interval; slack 1e-12 relative.
/// `d` enables the Young bound (needs lambda_j <= 1/d).
std::vector<LemmaCheck> lemma_suite(const ScaleAnalysis& a, int d);

/// Theta sequence generated by lambdas for (n, d).
std::vector<double> theta_from_lambdas(const std::vector<double>& lambdas, int n, int d);

}  // namespace spcap
