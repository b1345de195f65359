#include <iostream>

#include <CLI11.hpp>

#include "spcap/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Capacity estimates for s-parabolic Cantor sets"};
  app.require_subcommand(1);
  spcap::CommandOptions opts;
  std::string out, format;
  std::uint64_t seed = 0;

  const char* commands[][2] = {
      {"gen", "build a construction and list its generation-k cubes"},
      {"kernel-audit", "check the kernel bounds on a grid"},
      {"field", "evaluate the field of mu_k at points"},
      {"l2norm", "L2(mu_k) energy of the field with per-cube averages"},
      {"matrix", "cube-averaged kernel matrix and operator norm estimates"},
      {"scales", "stopping scales with the inequality checks"},
      {"capacity-sweep", "capacity report over a sweep of constructions"},
  };
  for (auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config_path, "JSON configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "64-bit seed (overrides config.seed)");
    sub->add_option("--workers", opts.workers, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
    sub->add_option("--format", format, "output format (csv/json/both)")->check(CLI::IsMember({"csv", "json", "both"}));
    sub->add_flag("--timing", opts.timing, "write wall times into the CSV (breaks byte-identical reruns)");
    sub->add_flag("--conjugate", opts.conjugate, "use the conjugate kernel (field, l2norm, matrix)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--out")) opts.out_dir = out;
  if (sub->count("--seed")) opts.seed = seed;
  if (sub->count("--format")) opts.format = format;

  const spcap::CommandResult r = spcap::run_command(sub->get_name(), opts);
  std::cout << r.summary.dump() << std::endl;
  if (r.exit_code == 2)
    for (const auto& e : r.summary["errors"]) std::cerr << "config error: " << e.get<std::string>() << "\n";
  else if (r.exit_code == 1 && r.summary.contains("errors"))
    for (const auto& e : r.summary["errors"]) std::cerr << "error: " << e.get<std::string>() << "\n";
  return r.exit_code;
}
