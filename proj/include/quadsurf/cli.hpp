// Configuration-driven entry points behind the command-line tool. Kept as a
// library so tests can drive the exact same code paths and assert on exit
// codes without spawning processes.
#pragma once

#include <string>

namespace quadsurf::cli {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;          // overrides outputs.dir when nonempty
  std::string format = "json";  // check: json | csv
  bool g_squared = false;       // solve-bilap: use the squared-datum form
};

// Exit codes: 0 converged, 2 max_iters, 3 constrained_at_hull (solve) or
// no sufficient certificate (check), 1 config/IO/solver errors.
int run_solve_qs(const CommonArgs& args);
int run_solve_bilap(const CommonArgs& args);
int run_check(const CommonArgs& args);

}  // namespace quadsurf::cli
