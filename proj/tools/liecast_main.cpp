#include <cstdint>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "liecast/report.hpp"
#include "liecast/scenario.hpp"

namespace {

struct CommonFlags {
  std::string scenario;
  std::string out = "out";
  std::uint64_t seed = 0;
  int threads = 0;
  bool seed_set = false;
  bool threads_set = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--scenario", f.scenario, "scenario file to run")
      ->required();
  cmd->add_option("--out", f.out, "output directory for report and CSVs");
  cmd->add_option("--seed", f.seed, "override the scenario seed");
  cmd->add_option("--threads", f.threads, "override the scenario threads");
}

int run(const std::string& command, const CLI::App* cmd,
        const CommonFlags& f) {
  liecast::Scenario sc;
  try {
    sc = liecast::parse_scenario_file(f.scenario);
    if (sc.command != command)
      throw liecast::ParseError("scenario declares command '" + sc.command +
                                "' but was invoked as '" + command + "'");
  } catch (const liecast::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  }

  if (cmd->count("--seed") > 0) sc.seed = f.seed;
  if (cmd->count("--threads") > 0) {
    if (f.threads < 1) {
      std::cerr << "parse error: --threads must be at least 1\n";
      return 2;
    }
    sc.threads = f.threads;
  }

  std::string out_dir = f.out;
  if (const char* env = std::getenv("LIECAST_OUT_DIR"); env && *env)
    out_dir = env;

  try {
    liecast::RunResults r = liecast::run_scenario(sc);
    liecast::emit_report(r, out_dir);
    return r.pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ensemble Lie algebra toolkit"};
  app.require_subcommand(1);

  static const char* kCommands[] = {"verify",     "closure", "simulate",
                                    "synthesize", "observe", "sphere"};
  CommonFlags flags[6];
  CLI::App* cmds[6];
  for (int i = 0; i < 6; ++i) {
    cmds[i] = app.add_subcommand(kCommands[i]);
    add_common(cmds[i], flags[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  for (int i = 0; i < 6; ++i)
    if (cmds[i]->parsed()) return run(kCommands[i], cmds[i], flags[i]);
  return 2;
}
