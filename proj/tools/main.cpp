#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "obsdual.h"

namespace {

struct CommonArgs {
  std::string config;
  std::string out;
  long long seed = -1;
  bool quiet = false;
};

void attach(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config, "run configuration file")->required();
  cmd->add_option("-o,--out", args.out, "output directory (overrides [output] dir)");
  cmd->add_option("-s,--seed", args.seed, "seed for randomized checks");
  cmd->add_flag("-q,--quiet", args.quiet, "suppress the summary line");
}

int status_exit(od_status st) {
  switch (st) {
    case OD_ECONFIG:
    case OD_EIO:
    case OD_EINVAL:
    case OD_EINFEASIBLE:
    case OD_EHEIGHT:
      return 2;
    default:
      return 3;
  }
}

void print_error(od_status st) {
  const char* msg = od_last_error();
  if (msg && *msg)
    std::fprintf(stderr, "error: %s\n", msg);
  else
    std::fprintf(stderr, "error: %s\n", od_status_name(st));
}

int dispatch(od_status (*fn)(const od_config*, od_run**), const CommonArgs& args) {
  od_config* cfg = nullptr;
  od_status st = od_config_load(args.config.c_str(), &cfg);
  if (st != OD_OK) {
    print_error(st);
    return 2;
  }
  if (!args.out.empty()) st = od_config_set(cfg, "output.dir", args.out.c_str());
  if (st == OD_OK && args.seed >= 0)
    st = od_config_set(cfg, "run.seed", std::to_string(args.seed).c_str());
  if (st != OD_OK) {
    print_error(st);
    od_config_free(cfg);
    return 2;
  }

  od_run* run = nullptr;
  st = fn(cfg, &run);
  od_config_free(cfg);
  if (st != OD_OK) {
    print_error(st);
    return status_exit(st);
  }
  int code = od_run_exit_code(run);
  if (!args.quiet) {
    std::FILE* sink = code == 0 ? stdout : stderr;
    std::fprintf(sink, "%s\n", od_run_summary(run));
  }
  od_run_free(run);
  return code;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"obstacle-problem solver with convex-duality certificates"};
  app.set_version_flag("--version", od_version());
  app.require_subcommand(1);

  CommonArgs solve_args, verify_args, conj_args, ladder_args, sweep_args;
  attach(app.add_subcommand("solve", "minimize the energy and extract the dual field"),
         solve_args);
  attach(app.add_subcommand("verify", "re-run all certificates on solve outputs"),
         verify_args);
  attach(app.add_subcommand("conjugate", "tabulate the profile, its conjugate, and "
                            "Fenchel-gap samples"),
         conj_args);
  attach(app.add_subcommand("ladder", "build the approximation ladder and check its "
                            "invariants"),
         ladder_args);
  attach(app.add_subcommand("sweep", "mesh-refinement and ladder convergence study"),
         sweep_args);

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("solve")) return dispatch(od_run_solve, solve_args);
  if (app.got_subcommand("verify")) return dispatch(od_run_verify, verify_args);
  if (app.got_subcommand("conjugate")) return dispatch(od_run_conjugate, conj_args);
  if (app.got_subcommand("ladder")) return dispatch(od_run_ladder, ladder_args);
  if (app.got_subcommand("sweep")) return dispatch(od_run_sweep, sweep_args);
  return 2;
}
