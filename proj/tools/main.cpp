// Command-line front end: shape solves, certificate checks, and the radial
// reference oracle.
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "quadsurf/cli.hpp"
#include "quadsurf/radial.hpp"

int main(int argc, char** argv) {
  CLI::App app{"2-D level-set solver for overdetermined free-boundary "
               "problems with an inequality certificate engine"};
  app.require_subcommand(1);

  quadsurf::cli::CommonArgs args;

  CLI::App* solve_qs = app.add_subcommand("solve-qs",
                                          "gradient descent on the "
                                          "second-order problem");
  solve_qs->add_option("--config", args.config_path, "JSON config")
      ->required();
  solve_qs->add_option("--out", args.out_dir, "output directory override");

  CLI::App* solve_bilap =
      app.add_subcommand("solve-bilap", "gradient descent on the "
                                        "fourth-order cascade problem");
  solve_bilap->add_option("--config", args.config_path, "JSON config")
      ->required();
  solve_bilap->add_option("--out", args.out_dir, "output directory override");
  solve_bilap->add_flag("--g-squared", args.g_squared,
                        "use the squared-datum form of the functional");

  CLI::App* check = app.add_subcommand("check",
                                       "evaluate all certificates on the "
                                       "source hull");
  check->add_option("--config", args.config_path, "JSON config")->required();
  check->add_option("--out", args.out_dir, "output directory override");
  check->add_option("--format", args.format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}));

  CLI::App* oracle = app.add_subcommand("oracle", "radial reference values");
  oracle->require_subcommand(1);
  double c = 0, a = 0, k = 0, R = 0;

  CLI::App* radial_qs = oracle->add_subcommand(
      "radial-qs", "flux-balance radius for a constant datum");
  radial_qs->add_option("--c", c, "source value")->required();
  radial_qs->add_option("--a", a, "source radius")->required();
  radial_qs->add_option("--k", k, "constant datum")->required();

  CLI::App* radial_poisson = oracle->add_subcommand(
      "radial-poisson", "radial profile of the disk solve");
  radial_poisson->add_option("--c", c, "source value")->required();
  radial_poisson->add_option("--a", a, "source radius")->required();
  radial_poisson->add_option("--R", R, "domain radius")->required();

  CLI::App* radial_bilap = oracle->add_subcommand(
      "radial-bilap", "cascade boundary datum |u'(R) v'(R)|");
  radial_bilap->add_option("--c", c, "source value")->required();
  radial_bilap->add_option("--a", a, "source radius")->required();
  radial_bilap->add_option("--R", R, "domain radius")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (solve_qs->parsed()) return quadsurf::cli::run_solve_qs(args);
    if (solve_bilap->parsed()) return quadsurf::cli::run_solve_bilap(args);
    if (check->parsed()) return quadsurf::cli::run_check(args);

    nlohmann::json out;
    if (radial_qs->parsed()) {
      auto res = quadsurf::radial_qs_radius(c, a, k);
      out["R"] = res.R;
      out["valid"] = res.valid;
    } else if (radial_poisson->parsed()) {
      auto prof = quadsurf::radial_poisson(c, a, R);
      out["u0"] = prof.u0();
      out["du_R"] = prof.du_R();
    } else if (radial_bilap->parsed()) {
      out["g_star"] = quadsurf::radial_bilap_g(c, a, R);
    }
    std::cout << out.dump() << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
