#include "quadsurf/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "quadsurf/certificates.hpp"
#include "quadsurf/io.hpp"
#include "quadsurf/shape_opt.hpp"

namespace quadsurf::cli {
namespace {

using json = nlohmann::json;
using Vec = Vec2<double>;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unknown keys are configuration errors: a typo must not silently fall back
// to a default.
void require_keys(const json& obj, const std::string& ctx,
                  std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(ctx + ": expected an object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError(ctx + ": unknown key \"" + item.key() + "\"");
  }
}

Vec parse_point(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.size() != 2)
    throw ConfigError(ctx + ": expected [x, y]");
  return Vec(j[0].get<double>(), j[1].get<double>());
}

struct ParsedConfig {
  Grid<double> grid;
  SourceSpec<double> f;
  GSpec<double> g;
  json init;  // resolved init block
  DescentParams descent;
  std::string out_dir;
  Index snapshot_every = 0;
  std::optional<SuperharmonicSpec<double>> phi;
  json resolved;  // full config with defaults filled in

  ParsedConfig(Grid<double> grid_, SourceSpec<double> f_, GSpec<double> g_)
      : grid(std::move(grid_)), f(std::move(f_)), g(std::move(g_)) {}
};

Shape<double> parse_shape(const json& j, const std::string& ctx,
                          bool with_value, double* value) {
  const std::string kind = j.at("shape").get<std::string>();
  if (kind == "disk") {
    require_keys(j, ctx,
                 with_value
                     ? std::initializer_list<const char*>{"shape", "center",
                                                          "radius", "value"}
                     : std::initializer_list<const char*>{"shape", "center",
                                                          "radius"});
    if (with_value) *value = j.at("value").get<double>();
    return Disk<double>{parse_point(j.at("center"), ctx + ".center"),
                        j.at("radius").get<double>()};
  }
  if (kind == "polygon") {
    require_keys(j, ctx,
                 with_value
                     ? std::initializer_list<const char*>{"shape", "vertices",
                                                          "value"}
                     : std::initializer_list<const char*>{"shape", "vertices"});
    if (with_value) *value = j.at("value").get<double>();
    ConvexPolygon<double> poly;
    for (const auto& v : j.at("vertices"))
      poly.vertices.push_back(parse_point(v, ctx + ".vertices"));
    if (poly.vertices.size() < 3)
      throw ConfigError(ctx + ": polygon needs at least 3 vertices");
    if (poly.area() <= 0)
      throw ConfigError(ctx + ": polygon must be counterclockwise");
    return poly;
  }
  throw ConfigError(ctx + ": unknown shape \"" + kind + "\"");
}

json shape_to_json(const Shape<double>& s) {
  json out;
  if (const auto* d = std::get_if<Disk<double>>(&s)) {
    out["shape"] = "disk";
    out["center"] = {d->center.x(), d->center.y()};
    out["radius"] = d->radius;
  } else {
    const auto& poly = std::get<ConvexPolygon<double>>(s);
    out["shape"] = "polygon";
    out["vertices"] = json::array();
    for (const auto& v : poly.vertices)
      out["vertices"].push_back({v.x(), v.y()});
  }
  return out;
}

ParsedConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  require_keys(root, "config",
               {"grid", "f", "g", "init", "descent", "outputs",
                "superharmonic"});

  // grid
  const json& jg = root.at("grid");
  require_keys(jg, "grid", {"box", "n"});
  const auto box = jg.at("box").get<std::vector<double>>();
  if (box.size() != 4) throw ConfigError("grid.box: expected [x0,y0,x1,y1]");
  Index nx, ny;
  if (jg.at("n").is_array()) {
    nx = jg.at("n")[0].get<Index>();
    ny = jg.at("n")[1].get<Index>();
  } else {
    nx = ny = jg.at("n").get<Index>();
  }
  Grid<double> grid(Vec(box[0], box[1]), Vec(box[2], box[3]), nx, ny);

  // f
  const json& jf = root.at("f");
  require_keys(jf, "f", {"pieces"});
  std::vector<SourcePiece<double>> pieces;
  for (const auto& piece : jf.at("pieces")) {
    double value = 0;
    Shape<double> shape = parse_shape(piece, "f.pieces[]", true, &value);
    pieces.push_back({std::move(shape), value});
  }
  SourceSpec<double> f(std::move(pieces));

  // g
  const json& jgg = root.at("g");
  const std::string kind = jgg.at("kind").get<std::string>();
  GSpec<double> g;
  if (kind == "constant") {
    require_keys(jgg, "g", {"kind", "k"});
    g = GSpec<double>::constant(jgg.at("k").get<double>());
  } else if (kind == "radial_power") {
    require_keys(jgg, "g", {"kind", "k", "alpha"});
    g = GSpec<double>::radial_power(jgg.at("k").get<double>(),
                                    jgg.at("alpha").get<double>());
  } else if (kind == "table") {
    require_keys(jgg, "g", {"kind", "field"});
    g = GSpec<double>::tabulated(read_field(jgg.at("field").get<std::string>()));
  } else {
    throw ConfigError("g.kind: unknown kind \"" + kind + "\"");
  }

  ParsedConfig cfg(std::move(grid), std::move(f), std::move(g));

  // init (default: hull dilated by 4 cells)
  if (root.contains("init")) {
    const json& ji = root.at("init");
    if (ji.at("shape").get<std::string>() == "hull_margin") {
      require_keys(ji, "init", {"shape", "margin_cells"});
      cfg.init = {{"shape", "hull_margin"},
                  {"margin_cells", ji.value("margin_cells", 4.0)}};
    } else {
      double unused = 0;
      Shape<double> s = parse_shape(ji, "init", false, &unused);
      cfg.init = shape_to_json(s);
    }
  } else {
    cfg.init = {{"shape", "hull_margin"}, {"margin_cells", 4.0}};
  }

  // descent
  if (root.contains("descent")) {
    const json& jd = root.at("descent");
    require_keys(jd, "descent",
                 {"cfl", "max_iters", "tol_residual", "reinit_every",
                  "backtrack_max", "velocity_smoothing"});
    cfg.descent.cfl = jd.value("cfl", cfg.descent.cfl);
    cfg.descent.max_iters = jd.value("max_iters", cfg.descent.max_iters);
    cfg.descent.tol_residual =
        jd.value("tol_residual", cfg.descent.tol_residual);
    cfg.descent.reinit_every =
        jd.value("reinit_every", cfg.descent.reinit_every);
    cfg.descent.backtrack_max =
        jd.value("backtrack_max", cfg.descent.backtrack_max);
    cfg.descent.velocity_smoothing =
        jd.value("velocity_smoothing", cfg.descent.velocity_smoothing);
  }
  if (!(cfg.descent.cfl > 0 && cfg.descent.cfl <= 1))
    throw ConfigError("descent.cfl must be in (0, 1]");
  if (!(cfg.descent.tol_residual > 0))
    throw ConfigError("descent.tol_residual must be > 0");

  // outputs
  cfg.out_dir = "out";
  if (root.contains("outputs")) {
    const json& jo = root.at("outputs");
    require_keys(jo, "outputs", {"dir", "snapshot_every"});
    cfg.out_dir = jo.value("dir", cfg.out_dir);
    cfg.snapshot_every = jo.value("snapshot_every", Index(0));
  }

  if (root.contains("superharmonic")) {
    const json& jp = root.at("superharmonic");
    require_keys(jp, "superharmonic", {"a", "b", "center"});
    SuperharmonicSpec<double> phi;
    phi.a = jp.at("a").get<double>();
    phi.b = jp.at("b").get<double>();
    phi.center = parse_point(jp.at("center"), "superharmonic.center");
    cfg.phi = phi;
  }

  // Echo of everything actually in effect.
  json resolved;
  resolved["grid"] = {{"box", box}, {"n", {nx, ny}}};
  resolved["f"]["pieces"] = json::array();
  for (const auto& piece : cfg.f.pieces) {
    json jp = shape_to_json(piece.shape);
    jp["value"] = piece.value;
    resolved["f"]["pieces"].push_back(std::move(jp));
  }
  resolved["g"] = jgg;
  resolved["init"] = cfg.init;
  resolved["descent"] = {{"cfl", cfg.descent.cfl},
                         {"max_iters", cfg.descent.max_iters},
                         {"tol_residual", cfg.descent.tol_residual},
                         {"reinit_every", cfg.descent.reinit_every},
                         {"backtrack_max", cfg.descent.backtrack_max},
                         {"velocity_smoothing",
                          cfg.descent.velocity_smoothing}};
  resolved["outputs"] = {{"dir", cfg.out_dir},
                         {"snapshot_every", cfg.snapshot_every}};
  if (cfg.phi)
    resolved["superharmonic"] = {
        {"a", cfg.phi->a},
        {"b", cfg.phi->b},
        {"center", {cfg.phi->center.x(), cfg.phi->center.y()}}};
  cfg.resolved = std::move(resolved);
  return cfg;
}

LevelSet<double> build_init(const ParsedConfig& cfg) {
  if (cfg.init.at("shape") == "hull_margin")
    return hull_margin_init(cfg.f, cfg.grid,
                            cfg.init.at("margin_cells").get<double>());
  double unused = 0;
  Shape<double> s = parse_shape(cfg.init, "init", false, &unused);
  return signed_distance(s, cfg.grid);
}

json certificate_to_json(const CertificateReport<double>& rep) {
  return {{"id", rep.id},          {"lhs", rep.lhs},
          {"rhs", rep.rhs},        {"margin", rep.margin},
          {"verdict", to_string(rep.verdict)},
          {"provenance", rep.provenance}};
}

json history_to_json(const SolveReport<double>& rep) {
  json h;
  auto column = [&](const char* name, auto getter) {
    json arr = json::array();
    for (const auto& it : rep.history) arr.push_back(getter(it));
    h[name] = std::move(arr);
  };
  column("J", [](const auto& it) { return it.J; });
  column("area", [](const auto& it) { return it.area; });
  column("perimeter", [](const auto& it) { return it.perimeter; });
  column("residual_inf", [](const auto& it) { return it.residual_inf; });
  column("residual_l2", [](const auto& it) { return it.residual_l2; });
  column("containment_violation",
         [](const auto& it) { return it.containment_violation; });
  column("cg_iterations", [](const auto& it) { return it.cg_iterations; });
  column("dt", [](const auto& it) { return it.dt; });
  column("backtracks", [](const auto& it) { return it.backtracks; });
  return h;
}

void radius_stats(const BoundaryTrace<double>& trace, double& mean,
                  double& stddev) {
  mean = 0;
  for (Index k = 0; k < trace.vertex_count(); ++k)
    mean += trace.positions.col(k).norm();
  mean /= double(trace.vertex_count());
  stddev = 0;
  for (Index k = 0; k < trace.vertex_count(); ++k) {
    const double d = trace.positions.col(k).norm() - mean;
    stddev += d * d;
  }
  stddev = std::sqrt(stddev / double(trace.vertex_count()));
}

int exit_code_of(const SolveReport<double>& rep) {
  if (!rep.solver_error.empty()) return 1;
  switch (rep.status) {
    case SolveStatus::kConverged: return 0;
    case SolveStatus::kMaxIters: return 2;
    default: return 3;
  }
}

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << j.dump(2) << "\n";
}

int run_solve(const CommonArgs& args, bool bilap) {
  ParsedConfig cfg = parse_config(args.config_path);
  if (!args.out_dir.empty()) {
    cfg.out_dir = args.out_dir;
    cfg.resolved["outputs"]["dir"] = args.out_dir;
  }
  if (bilap) cfg.resolved["g_squared"] = args.g_squared;
  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  write_json(cfg.resolved, dir / "resolved_config.json");

  const CertificateReport<double> cert =
      bilap ? cert_bilap_sufficient(cfg.f, cfg.g, cfg.grid)
            : cert_qs_sufficient(cfg.f, cfg.g);

  TraceObserver<double> observer;
  if (cfg.snapshot_every > 0) {
    observer = [&](Index iter, const BoundaryTrace<double>& trace) {
      if (iter % cfg.snapshot_every != 0) return;
      std::ostringstream name;
      name << "boundary_" << std::setw(4) << std::setfill('0') << iter
           << ".csv";
      write_trace_csv(trace, (dir / name.str()).string());
    };
  }

  LevelSet<double> init = build_init(cfg);
  SolveReport<double> rep =
      bilap ? solve_bilap(cfg.f, cfg.g, init, cfg.descent, args.g_squared,
                          observer)
            : solve_qs(cfg.f, cfg.g, init, cfg.descent, observer);

  json report;
  report["problem"] = bilap ? "bilap" : "qs";
  report["status"] = to_string(rep.status);
  report["certificate"] = certificate_to_json(cert);
  report["iterations"] = rep.accepted_steps;
  report["residual_inf"] = rep.residual_inf;
  report["flagged_vertices"] = rep.flagged_vertices;
  report["history"] = history_to_json(rep);
  if (!rep.solver_error.empty()) report["solver_error"] = rep.solver_error;

  if (rep.final_trace.vertex_count() > 0) {
    double mean = 0, stddev = 0;
    radius_stats(rep.final_trace, mean, stddev);
    report["final"] = {{"area", domain_area(rep.final_ls)},
                       {"perimeter", rep.final_trace.total_length()},
                       {"mean_boundary_radius", mean},
                       {"radius_std", stddev}};
    write_trace_csv(rep.final_trace, (dir / "boundary_final.csv").string());

    // Final fields and the per-solve numbers, recomputed on the final domain.
    auto levels = solve_cascade(rep.final_ls, cfg.f, bilap ? 2 : 1);
    write_field(levels[0].u, (dir / "u_final").string());
    if (bilap) write_field(levels[1].u, (dir / "v_final").string());
    write_field(rep.final_ls.as_field(), (dir / "phi_final").string());
    report["final_solve"] = {{"iterations", levels[0].iterations},
                             {"linear_residual", levels[0].linear_residual},
                             {"flagged_vertices", rep.flagged_vertices}};
  }

  const int code = exit_code_of(rep);
  report["exit_code"] = code;
  write_json(report, dir / "report.json");
  if (!rep.solver_error.empty())
    std::cerr << "solver failure: " << rep.solver_error << "\n";
  return code;
}

}  // namespace

int run_solve_qs(const CommonArgs& args) {
  try {
    return run_solve(args, false);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_solve_bilap(const CommonArgs& args) {
  try {
    return run_solve(args, true);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_check(const CommonArgs& args) {
  try {
    ParsedConfig cfg = parse_config(args.config_path);
    if (!args.out_dir.empty()) {
      cfg.out_dir = args.out_dir;
      cfg.resolved["outputs"]["dir"] = args.out_dir;
    }
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    write_json(cfg.resolved, dir / "resolved_config.json");

    CertificateOptions<double> opts;
    opts.phi = cfg.phi;
    const auto reports = evaluate_certificates(cfg.f, cfg.g, cfg.grid, opts);

    json arr = json::array();
    for (const auto& rep : reports) arr.push_back(certificate_to_json(rep));
    write_json(arr, dir / "certificates.json");

    if (args.format == "csv") {
      std::cout << "id,lhs,rhs,margin,verdict\n";
      std::cout << std::setprecision(17);
      for (const auto& rep : reports)
        std::cout << rep.id << ',' << rep.lhs << ',' << rep.rhs << ','
                  << rep.margin << ',' << to_string(rep.verdict) << "\n";
    } else if (args.format == "json") {
      std::cout << arr.dump(2) << "\n";
    } else {
      std::cerr << "error: unknown format \"" << args.format << "\"\n";
      return 1;
    }
    return any_sufficient_fires(reports) ? 0 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace quadsurf::cli
