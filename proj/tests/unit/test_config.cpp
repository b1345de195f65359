#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "spcap/commands.hpp"
#include "spcap/config.hpp"
#include "spcap/report.hpp"

using namespace spcap;
namespace fs = std::filesystem;

namespace {

bool mentions(const ConfigError& e, const std::string& needle) {
  for (const auto& p : e.problems())
    if (p.find(needle) != std::string::npos) return true;
  return false;
}

std::vector<std::string> problems_of(const std::string& text, Purpose purpose) {
  try {
    parse_config(text, purpose);
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "spcap_unit" / name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("minimal construction resolves the branching") {
  const RunConfig c = parse_config(R"({"n": 1, "s": 1, "lambda": 0.3, "k": 2})", Purpose::Construction);
  REQUIRE(c.constructions.size() == 1);
  CHECK(c.constructions[0].params().d == 2);
  CHECK(c.constructions[0].params().tau0 == doctest::Approx(default_tau0(2)));
  const auto runs = c.runs();
  REQUIRE(runs.size() == 1);
  CHECK(runs[0].lambdas == std::vector<double>{0.3, 0.3});
  CHECK(runs[0].run_id == "n1-s1-d2-lambda0.3-k2");
  const RunConfig m = parse_config(R"({"n": 1, "s": 0.75, "lambda": "critical", "k": [1, 2], "tau0": 0.3})",
                                   Purpose::Construction);
  CHECK(m.constructions[0].params().d == 3);
  CHECK(m.runs().size() == 2);
}

TEST_CASE("every violation is reported") {
  CHECK_THROWS_AS(parse_config(R"({"n": 1, "s": 1, "lambda": 0.6, "k": 1})", Purpose::Construction), ConfigError);
  const auto p = problems_of(R"({"n": 1, "s": 1, "lambda": [0.6, -1], "k": 4, "colour": 1, "d": 1})",
                             Purpose::Construction);
  CHECK(p.size() >= 3);
  try {
    parse_config(R"({"n": 1, "s": 0.5, "lambda": 0.3, "k": 1})", Purpose::Capacity);
    FAIL("accepted s = 1/2");
  } catch (const ConfigError& e) {
    CHECK(mentions(e, "s > 1/2"));
  }
  try {
    parse_config(R"({"n": 1, "s": 1, "lambda": 0.3, "k": 1, "typo": true})", Purpose::Construction);
    FAIL("accepted an unknown key");
  } catch (const ConfigError& e) {
    CHECK(mentions(e, "typo"));
  }
  CHECK_FALSE(problems_of(R"({"n": 2, "s": 1, "lambda": 0.3, "k": 9})", Purpose::Construction).empty());
  CHECK_FALSE(problems_of("not json", Purpose::Construction).empty());
  CHECK_FALSE(problems_of(R"({"n": 3, "s": 0.9})", Purpose::Kernel).empty());
  CHECK_FALSE(problems_of(R"({"n": 1, "s": 0.1})", Purpose::Kernel).empty());
  CHECK(problems_of(R"({"n": 1, "s": 0.5})", Purpose::Kernel).empty());
}

TEST_CASE("hash and number formatting") {
  const char* a = R"({"n": 1, "s": 1, "lambda": 0.3, "k": 1})";
  const char* b = R"({"k": 1, "lambda": 0.3, "s": 1.0, "n": 1})";
  CHECK(parse_config(a, Purpose::Construction).hash() == parse_config(b, Purpose::Construction).hash());
  CHECK(parse_config(a, Purpose::Construction).hash() !=
        parse_config(R"({"n": 1, "s": 1, "lambda": 0.31, "k": 1})", Purpose::Construction).hash());
  for (double v : {0.1, 1.0 / 3, 1e-300, 123456.789, -2.5})
    CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(0.3) == "0.3");
}

TEST_CASE("csv tables and sidecars") {
  CsvTable t;
  t.header = {"a", "b"};
  t.add({"1", "x"});
  CHECK(t.str() == "a,b\n1,x\n");
  CHECK_THROWS(t.add({"1"}));
  CHECK(hex64(255) == "00000000000000ff");
}

TEST_CASE("commands write their tables") {
  const fs::path dir = scratch("gen");
  CommandOptions o;
  o.config_text = R"({"n": 1, "s": 1, "lambda": 0.3, "k": 1})";
  o.out_dir = dir.string();
  const CommandResult r = run_command("gen", o);
  CHECK(r.exit_code == 0);
  CHECK(line_count(dir / "cubes.csv") == 7);
  CHECK(fs::exists(dir / "cubes.csv.meta.json"));

  o.config_text = R"({"n": 1, "s": 1, "lambda": 0.6, "k": 1})";
  CHECK(run_command("gen", o).exit_code == 2);
  CHECK(run_command("frobnicate", o).exit_code == 2);

  const fs::path sc = scratch("scales");
  CommandOptions so;
  so.config_text = R"({"n": 1, "s": 1, "theta": [1, 1, 9, 1], "analysis": {"B": 3}})";
  so.out_dir = sc.string();
  CHECK(run_command("scales", so).exit_code == 0);
  CHECK(fs::exists(sc / "intervals.csv"));
  CHECK(line_count(sc / "intervals.csv") == 3);
}

}  // TEST_SUITE
