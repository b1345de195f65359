#include "spcap/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace spcap {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string LambdaSpec::text() const {
  switch (kind) {
    case Kind::Critical:
      return "critical";
    case Kind::Constant:
      return format_double(value);
    case Kind::List: {
      std::string out = "[";
      for (std::size_t i = 0; i < list.size(); ++i) out += (i ? ";" : "") + format_double(list[i]);
      return out + "]";
    }
  }
  return {};
}

SParams ConstructionSpec::params() const {
  SParams p;
  p.n = n;
  p.s = s;
  p.d = d ? *d : min_branching(s);
  p.tau0 = tau0 ? *tau0 : default_tau0(p.d);
  return p;
}

std::vector<RunSpec> ConstructionSpec::runs() const {
  const SParams p = params();
  std::vector<RunSpec> out;
  for (int kk : k) {
    RunSpec r;
    r.params = p;
    r.lambda_spec = lambda.text();
    switch (lambda.kind) {
      case LambdaSpec::Kind::Critical:
        r.lambdas.assign(kk, critical_ratio(p));
        break;
      case LambdaSpec::Kind::Constant:
        r.lambdas.assign(kk, lambda.value);
        break;
      case LambdaSpec::Kind::List:
        r.lambdas.assign(lambda.list.begin(), lambda.list.begin() + kk);
        break;
    }
    r.run_id = "n" + std::to_string(p.n) + "-s" + format_double(p.s) + "-d" + std::to_string(p.d) + "-lambda" +
               r.lambda_spec + "-k" + std::to_string(kk);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RunSpec> RunConfig::runs() const {
  std::vector<RunSpec> out;
  for (const auto& c : constructions)
    for (auto& r : c.runs()) out.push_back(std::move(r));
  return out;
}

std::uint64_t RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : "\n") + s;
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

namespace {

// Keys are already sorted; numbers are written as doubles so that 1 and 1.0 hash alike.
void canonicalize(json& j) {
  if (j.is_number()) j = j.get<double>();
  else if (j.is_structured())
    for (auto& v : j) canonicalize(v);
}

}  // namespace

namespace {

constexpr std::size_t kMaxCubes = 20000;

// Collects problems instead of stopping at the first one.
class Reader {
 public:
  std::vector<std::string> problems;

  void unknown_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!ok.count(it.key())) problems.push_back(where + ": unknown key '" + it.key() + "'");
  }

  std::optional<double> number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_number()) {
      problems.push_back(where + "." + key + ": expected a number");
      return std::nullopt;
    }
    return v.get<double>();
  }

  std::optional<long long> integer(const json& v, const std::string& where) {
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()) return static_cast<long long>(v.get<double>());
    problems.push_back(where + ": expected an integer");
    return std::nullopt;
  }

  std::optional<long long> integer(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) return std::nullopt;
    return integer(obj.at(key), where + "." + key);
  }

  std::vector<double> numbers(const json& obj, const char* key, const std::string& where) {
    std::vector<double> out;
    if (!obj.contains(key)) return out;
    const json& v = obj.at(key);
    if (!v.is_array()) {
      problems.push_back(where + "." + key + ": expected an array of numbers");
      return out;
    }
    for (const auto& e : v) {
      if (!e.is_number()) {
        problems.push_back(where + "." + key + ": expected an array of numbers");
        return {};
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  void construction(const json& obj, const std::string& where, Purpose purpose, ConstructionSpec& c) {
    unknown_keys(obj, where, {"n", "s", "d", "tau0", "lambda", "k"});
    if (auto v = integer(obj, "n", where)) c.n = static_cast<int>(*v);
    else if (!obj.contains("n")) problems.push_back(where + ".n: required");
    if (auto v = number(obj, "s", where)) c.s = *v;
    else if (!obj.contains("s")) problems.push_back(where + ".s: required");
    if (auto v = integer(obj, "d", where)) c.d = static_cast<int>(*v);
    if (auto v = number(obj, "tau0", where)) c.tau0 = *v;

    const bool s_ok = c.s > 0.5 && c.s <= 1.0;
    if (c.n < 1) problems.push_back(where + ".n: must be >= 1");
    if (!s_ok) {
      const char* why = purpose == Purpose::Capacity ? "capacity commands require s > 1/2 (s in (1/2, 1])"
                                                     : "the Cantor construction requires s > 1/2 (s in (1/2, 1])";
      problems.push_back(where + ".s = " + format_double(c.s) + ": " + why);
    }
    int d = 0;
    if (s_ok) {
      const int dmin = min_branching(c.s);
      d = c.d ? *c.d : dmin;
      if (d < dmin)
        problems.push_back(where + ".d = " + std::to_string(d) + ": below min_branching(s) = " + std::to_string(dmin) +
                           " (need d + 1 < d^(2s))");
    }
    const double tau0 = d > 0 ? (c.tau0 ? *c.tau0 : default_tau0(d)) : 0.0;
    if (d > 0 && !(tau0 > 0.0 && tau0 < 1.0 / d)) problems.push_back(where + ".tau0: must lie in (0, 1/d)");

    auto check_lambda = [&](double l, const std::string& at) {
      if (d <= 0) return;
      if (!(l > 0.0)) problems.push_back(at + " = " + format_double(l) + ": must be positive");
      else if (l >= 1.0 / d) problems.push_back(at + " = " + format_double(l) + ": must be < 1/d = " + format_double(1.0 / d));
      else if (l > tau0) problems.push_back(at + " = " + format_double(l) + ": exceeds tau0 = " + format_double(tau0));
    };

    if (!obj.contains("lambda")) {
      problems.push_back(where + ".lambda: required");
    } else {
      const json& l = obj.at("lambda");
      if (l.is_string()) {
        if (l.get<std::string>() != "critical")
          problems.push_back(where + ".lambda: the only string value is \"critical\"");
        c.lambda.kind = LambdaSpec::Kind::Critical;
        if (d > 0 && c.n >= 1) {
          SParams p;
          p.n = c.n;
          p.d = d;
          check_lambda(critical_ratio(p), where + ".lambda (critical)");
        }
      } else if (l.is_number()) {
        c.lambda.kind = LambdaSpec::Kind::Constant;
        c.lambda.value = l.get<double>();
        check_lambda(c.lambda.value, where + ".lambda");
      } else if (l.is_array()) {
        c.lambda.kind = LambdaSpec::Kind::List;
        c.lambda.list = numbers(obj, "lambda", where);
        for (std::size_t i = 0; i < c.lambda.list.size(); ++i)
          check_lambda(c.lambda.list[i], where + ".lambda[" + std::to_string(i) + "]");
      } else {
        problems.push_back(where + ".lambda: expected \"critical\", a number or an array");
      }
    }

    if (obj.contains("k")) {
      const json& k = obj.at("k");
      if (k.is_array()) {
        for (std::size_t i = 0; i < k.size(); ++i)
          if (auto v = integer(k[i], where + ".k[" + std::to_string(i) + "]")) c.k.push_back(static_cast<int>(*v));
      } else if (auto v = integer(k, where + ".k")) {
        c.k.push_back(static_cast<int>(*v));
      }
    } else if (c.lambda.kind == LambdaSpec::Kind::List) {
      c.k.push_back(static_cast<int>(c.lambda.list.size()));
    } else {
      problems.push_back(where + ".k: required unless lambda is an explicit list");
    }
    for (int kk : c.k) {
      if (kk < 0) problems.push_back(where + ".k = " + std::to_string(kk) + ": must be >= 0");
      if (c.lambda.kind == LambdaSpec::Kind::List && kk > static_cast<int>(c.lambda.list.size()))
        problems.push_back(where + ".k = " + std::to_string(kk) + ": longer than the lambda list");
      if (d > 0 && kk >= 0) {
        const double cubes = std::pow((d + 1.0) * std::pow(d, c.n), kk);
        if (cubes > kMaxCubes)
          problems.push_back(where + ".k = " + std::to_string(kk) + ": " + format_double(cubes) +
                             " cubes exceed the limit of " + std::to_string(kMaxCubes));
      }
    }
  }
};

}  // namespace

RunConfig parse_config(const std::string& text, Purpose purpose) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("malformed document: ") + e.what()});
  }
  if (!doc.is_object()) throw ConfigError({"malformed document: top level must be an object"});

  Reader rd;
  RunConfig cfg;
  rd.unknown_keys(doc, "config", {"n", "s", "d", "tau0", "lambda", "k", "sweep", "kernel", "quadrature", "analysis",
                                  "sampling", "seed", "output", "points", "theta", "lambdas"});

  const bool top = doc.contains("lambda") || doc.contains("k") || doc.contains("d") || doc.contains("tau0");
  if (doc.contains("sweep")) {
    if (top) rd.problems.push_back("config: give either a top-level construction or a sweep, not both");
    const json& sw = doc.at("sweep");
    if (!sw.is_array() || sw.empty()) {
      rd.problems.push_back("config.sweep: expected a non-empty array of constructions");
    } else {
      for (std::size_t i = 0; i < sw.size(); ++i) {
        const std::string where = "config.sweep[" + std::to_string(i) + "]";
        if (!sw[i].is_object()) {
          rd.problems.push_back(where + ": expected an object");
          continue;
        }
        ConstructionSpec c;
        rd.construction(sw[i], where, purpose, c);
        cfg.constructions.push_back(c);
      }
    }
  } else if (purpose == Purpose::Kernel) {
    json sub = json::object();
    for (const char* key : {"n", "s"})
      if (doc.contains(key)) sub[key] = doc[key];
    if (auto v = rd.integer(sub, "n", "config")) cfg.kernel.n = static_cast<int>(*v);
    else if (!sub.contains("n")) rd.problems.push_back("config.n: required");
    if (auto v = rd.number(sub, "s", "config")) cfg.kernel.s = *v;
    else if (!sub.contains("s")) rd.problems.push_back("config.s: required");
    if (cfg.kernel.n < 1 || cfg.kernel.n > 2)
      rd.problems.push_back("config.n: the kernel audit supports n in {1, 2}");
    if (!(cfg.kernel.s >= 0.2 && cfg.kernel.s <= 1.0))
      rd.problems.push_back("config.s = " + format_double(cfg.kernel.s) + ": kernel evaluation supports s in [0.2, 1]");
  } else if (doc.contains("theta") && !top) {
    // raw sequences for the scale analysis
  } else {
    ConstructionSpec c;
    json sub = json::object();
    for (const char* key : {"n", "s", "d", "tau0", "lambda", "k"})
      if (doc.contains(key)) sub[key] = doc[key];
    rd.construction(sub, "config", purpose, c);
    cfg.constructions.push_back(c);
  }
  if (!cfg.constructions.empty()) {
    cfg.kernel.n = cfg.constructions.front().n;
    cfg.kernel.s = cfg.constructions.front().s;
  }

  if (doc.contains("kernel")) {
    const json& k = doc.at("kernel");
    rd.unknown_keys(k, "config.kernel", {"method", "quad_tol"});
    if (k.contains("method")) {
      try {
        cfg.kernel.method = kernel_method_from_string(k.at("method").get<std::string>());
      } catch (const std::exception&) {
        rd.problems.push_back("config.kernel.method: expected one of auto/closed_form/radial_quadrature");
      }
    }
    if (auto v = rd.number(k, "quad_tol", "config.kernel")) {
      cfg.kernel.quad_tol = *v;
      if (!(*v > 0.0 && *v < 1.0)) rd.problems.push_back("config.kernel.quad_tol: must lie in (0, 1)");
    }
  }
  if (doc.contains("quadrature")) {
    const json& q = doc.at("quadrature");
    rd.unknown_keys(q, "config.quadrature", {"base_order", "grading_levels", "grading_ratio", "target_rel_tol"});
    if (auto v = rd.integer(q, "base_order", "config.quadrature")) cfg.quad.base_order = static_cast<int>(*v);
    if (auto v = rd.integer(q, "grading_levels", "config.quadrature")) cfg.quad.grading_levels = static_cast<int>(*v);
    if (auto v = rd.number(q, "grading_ratio", "config.quadrature")) cfg.quad.grading_ratio = *v;
    if (auto v = rd.number(q, "target_rel_tol", "config.quadrature")) cfg.quad.target_rel_tol = *v;
    try {
      cfg.quad.validate();
    } catch (const std::exception& e) {
      rd.problems.push_back(std::string("config.quadrature: ") + e.what());
    }
  }
  if (doc.contains("analysis")) {
    const json& a = doc.at("analysis");
    rd.unknown_keys(a, "config.analysis", {"B", "N_L", "A", "kappa"});
    if (auto v = rd.number(a, "B", "config.analysis")) cfg.analysis.B = *v;
    if (auto v = rd.integer(a, "N_L", "config.analysis")) cfg.analysis.N_L = static_cast<int>(*v);
    if (auto v = rd.number(a, "A", "config.analysis")) cfg.analysis.A = *v;
    if (auto v = rd.number(a, "kappa", "config.analysis")) cfg.analysis.kappa = *v;
    if (!(cfg.analysis.B > 1.0)) rd.problems.push_back("config.analysis.B: must exceed 1");
    if (cfg.analysis.N_L < 1) rd.problems.push_back("config.analysis.N_L: must be >= 1");
    if (!(cfg.analysis.A > 0.0)) rd.problems.push_back("config.analysis.A: must be positive");
  }
  if (doc.contains("sampling")) {
    const json& s = doc.at("sampling");
    rd.unknown_keys(s, "config.sampling", {"sup_budget", "growth_trials", "bmo_cubes", "corner_per_axis"});
    auto count = [&](const char* key, auto& dst) {
      if (auto v = rd.integer(s, key, "config.sampling")) {
        if (*v < 0) rd.problems.push_back(std::string("config.sampling.") + key + ": must be >= 0");
        else dst = static_cast<std::remove_reference_t<decltype(dst)>>(*v);
      }
    };
    count("sup_budget", cfg.sampling.sup_budget);
    count("growth_trials", cfg.sampling.growth_trials);
    count("bmo_cubes", cfg.sampling.bmo_cubes);
    count("corner_per_axis", cfg.sampling.corner_per_axis);
    if (cfg.sampling.corner_per_axis < 1) rd.problems.push_back("config.sampling.corner_per_axis: must be >= 1");
  }
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (s.is_number_unsigned()) cfg.seed = s.get<std::uint64_t>();
    else if (s.is_number_integer() && s.get<long long>() >= 0) cfg.seed = static_cast<std::uint64_t>(s.get<long long>());
    else rd.problems.push_back("config.seed: expected a non-negative 64-bit integer");
  }
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    rd.unknown_keys(o, "config.output", {"dir", "formats"});
    if (o.contains("dir")) {
      if (o.at("dir").is_string()) cfg.out_dir = o.at("dir").get<std::string>();
      else rd.problems.push_back("config.output.dir: expected a string");
    }
    if (o.contains("formats")) {
      cfg.csv = cfg.json = false;
      if (!o.at("formats").is_array()) rd.problems.push_back("config.output.formats: expected an array");
      else
        for (const auto& f : o.at("formats")) {
          const std::string v = f.is_string() ? f.get<std::string>() : "";
          if (v == "csv") cfg.csv = true;
          else if (v == "json") cfg.json = true;
          else rd.problems.push_back("config.output.formats: entries must be \"csv\" or \"json\"");
        }
    }
  }
  if (doc.contains("points")) {
    const json& p = doc.at("points");
    const int n = cfg.kernel.n;
    if (!p.is_array()) rd.problems.push_back("config.points: expected an array of [x_1, ..., x_n, t]");
    else
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (!p[i].is_array() || static_cast<int>(p[i].size()) != n + 1) {
          rd.problems.push_back("config.points[" + std::to_string(i) + "]: expected " + std::to_string(n + 1) + " numbers");
          continue;
        }
        SPoint q(std::vector<double>(n), 0.0);
        bool ok = true;
        for (int j = 0; j <= n; ++j) {
          if (!p[i][j].is_number()) ok = false;
          else if (j < n) q.x[j] = p[i][j].get<double>();
          else q.t = p[i][j].get<double>();
        }
        if (ok) cfg.points.push_back(q);
        else rd.problems.push_back("config.points[" + std::to_string(i) + "]: expected numbers");
      }
  }
  cfg.theta = rd.numbers(doc, "theta", "config");
  cfg.lambdas = rd.numbers(doc, "lambdas", "config");
  for (double t : cfg.theta)
    if (!(t > 0.0)) {
      rd.problems.push_back("config.theta: entries must be positive");
      break;
    }
  if (!cfg.lambdas.empty() && cfg.lambdas.size() + 1 != cfg.theta.size())
    rd.problems.push_back("config.lambdas: need one entry fewer than theta");

  if (!rd.problems.empty()) throw ConfigError(rd.problems);
  canonicalize(doc);
  cfg.canonical = doc.dump();
  return cfg;
}

RunConfig load_config(const std::string& path, Purpose purpose) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read config file '" + path + "'"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), purpose);
}

}  // namespace spcap
