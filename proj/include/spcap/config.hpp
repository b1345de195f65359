#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "spcap/capacity.hpp"
#include "spcap/kernel.hpp"
#include "spcap/node_kernels.hpp"

namespace spcap {

/// How the ratios are given; `kind` selects the field that applies.
struct LambdaSpec {
  enum class Kind { Critical, Constant, List } kind = Kind::Critical;
  double value = 0.0;
  std::vector<double> list;
  std::string text() const;
};

struct ConstructionSpec {
  int n = 1;
  double s = 1.0;
  std::optional<int> d;
  std::optional<double> tau0;
  LambdaSpec lambda;
  std::vector<int> k;  // one run per entry

  SParams params() const;  // d and tau0 resolved
  std::vector<RunSpec> runs() const;
};

struct AnalysisParams {
  double B = 100.0;
  int N_L = 10;
  double A = 10.0;
  double kappa = 0.0;  // <= 0: use the max density
};

/// Which family of commands the document is validated for.
enum class Purpose { Construction, Capacity, Kernel };

struct RunConfig {
  std::vector<ConstructionSpec> constructions;  // the top level, or every sweep entry
  KernelSpec kernel;
  QuadratureSpec quad;
  AnalysisParams analysis;
  SamplingSpec sampling;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  bool csv = true, json = true;
  std::vector<SPoint> points;         // evaluation points for `field`
  std::vector<double> theta, lambdas; // raw sequences for `scales`
  std::string canonical;              // normalized document, hashed into reports

  std::vector<RunSpec> runs() const;
  std::uint64_t hash() const;
};

/// Every violation found, one per line.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

RunConfig parse_config(const std::string& text, Purpose purpose);
RunConfig load_config(const std::string& path, Purpose purpose);

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

}  // namespace spcap
