// Numerical evaluation of the existence conditions, Cauchy-Schwarz
// dichotomies, eigenvalue bounds, and integral identities that are
// computable from the source hull, the datum g, and fixed-domain solves.
// Every certificate reports the two sides of its inequality; "fires" means
// the sufficient condition holds with margin, "equality_case" signals the
// dichotomy branch where the inequality is tight (e.g. "the hull is a
// ball").
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "quadsurf/gspec.hpp"
#include "quadsurf/integrate.hpp"
#include "quadsurf/poisson.hpp"
#include "quadsurf/shapes.hpp"

namespace quadsurf {

enum class Verdict { kFires, kFails, kEqualityCase };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kFires: return "fires";
    case Verdict::kFails: return "fails";
    default: return "equality_case";
  }
}

template <class Scalar>
struct CertificateReport {
  std::string id;
  Scalar lhs = 0;
  Scalar rhs = 0;
  Scalar margin = 0;  // (rhs - lhs) / |rhs|
  Verdict verdict = Verdict::kFails;
  std::vector<std::string> provenance;
};

constexpr double kEqualityTolerance = 0.02;

template <class Scalar>
CertificateReport<Scalar> classify(std::string id, Scalar lhs, Scalar rhs,
                                   Scalar tol_eq          = Scalar(kEqualityTolerance),
                                   std::vector<std::string> provenance = {}) {
  CertificateReport<Scalar> rep;
  rep.id = std::move(id);
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.margin = (rhs - lhs) / std::abs(rhs);
  rep.verdict = std::abs(rep.margin) <= tol_eq
                    ? Verdict::kEqualityCase
                    : (rep.margin > 0 ? Verdict::kFires : Verdict::kFails);
  rep.provenance = std::move(provenance);
  return rep;
}

// Composite trapezoid quadrature of h over the polygon boundary, edges
// subdivided to roughly perimeter/2048.
template <class Scalar, class F>
Scalar polygon_boundary_integral(const ConvexPolygon<Scalar>& poly, F&& h) {
  const Scalar target = poly.perimeter() / Scalar(2048);
  Scalar total = 0;
  const Index n = Index(poly.vertices.size());
  for (Index e = 0; e < n; ++e) {
    const Vec2<Scalar>& a = poly.vertices[e];
    const Vec2<Scalar>& b = poly.vertices[(e + 1) % n];
    const Scalar len = (b - a).norm();
    const Index m = std::max<Index>(1, Index(std::ceil(len / target)));
    const Scalar dl = len / Scalar(m);
    for (Index k = 0; k < m; ++k) {
      const Vec2<Scalar> p = a + (Scalar(k) / Scalar(m)) * (b - a);
      const Vec2<Scalar> q = a + (Scalar(k + 1) / Scalar(m)) * (b - a);
      total += dl * (h(p) + h(q)) / 2;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Sufficient conditions

// Boundary flux bound: Phi_g(bnd C_f) < T(C_f, f).
template <class Scalar>
CertificateReport<Scalar> cert_qs_sufficient(
    const SourceSpec<Scalar>& f, const GSpec<Scalar>& g,
    Scalar tol_eq = Scalar(kEqualityTolerance)) {
  const Scalar lhs = polygon_boundary_integral(
      f.hull, [&](const Vec2<Scalar>& p) { return g.eval(p); });
  const Scalar rhs = f.total_mass();
  return classify<Scalar>("qs_sufficient", lhs, rhs, tol_eq,
                          {"hull boundary quadrature", "analytic piece areas"});
}

// Psi bound: [Phi_sqrt(g)]^2 / T(C, u_C) < T(C_f, f).
template <class Scalar>
CertificateReport<Scalar> cert_bilap_sufficient(
    const SourceSpec<Scalar>& f, const GSpec<Scalar>& g,
    const Grid<Scalar>& grid, Scalar tol_eq = Scalar(kEqualityTolerance)) {
  const LevelSet<Scalar> hull_ls = signed_distance(f.hull, grid);
  const PoissonSolution<Scalar> sol = solve_poisson(hull_ls, f);
  const Scalar flux_sqrt = polygon_boundary_integral(
      f.hull, [&](const Vec2<Scalar>& p) { return std::sqrt(g.eval(p)); });
  const Scalar t_u = volume_integral(hull_ls, sol.u);
  const Scalar lhs = flux_sqrt * flux_sqrt / t_u;
  const Scalar rhs = f.total_mass();
  return classify<Scalar>(
      "bilap_sufficient", lhs, rhs, tol_eq,
      {"hull boundary quadrature", "poisson solve on hull",
       "analytic piece areas"});
}

// ---------------------------------------------------------------------------
// Means chain

template <class Scalar>
struct MeansChain {
  Scalar min, harmonic, geometric, arithmetic, quadratic, max;

  // Chain inequality up to floating-point roundoff (exp/log round trips can
  // perturb exact ties by an ulp).
  bool ordered(Scalar rel_eps = Scalar(1e-12)) const {
    auto le = [rel_eps](Scalar a, Scalar b) { return a <= b * (1 + rel_eps); };
    return le(min, harmonic) && le(harmonic, geometric) &&
           le(geometric, arithmetic) && le(arithmetic, std::sqrt(quadratic)) &&
           le(std::sqrt(quadratic), max);
  }
};

template <class Scalar>
MeansChain<Scalar> means_chain(const std::vector<Scalar>& values) {
  if (values.empty())
    throw std::invalid_argument("means_chain: need at least one value");
  MeansChain<Scalar> m;
  m.min = values[0];
  m.max = values[0];
  Scalar inv_sum = 0, log_sum = 0, sum = 0, sq_sum = 0;
  for (Scalar v : values) {
    if (!(v > 0)) throw std::invalid_argument("means_chain: values must be > 0");
    m.min = std::min(m.min, v);
    m.max = std::max(m.max, v);
    inv_sum += 1 / v;
    log_sum += std::log(v);
    sum += v;
    sq_sum += v * v;
  }
  const Scalar n = Scalar(values.size());
  m.harmonic = n / inv_sum;
  m.geometric = std::exp(log_sum / n);
  m.arithmetic = sum / n;
  m.quadratic = sq_sum / n;
  return m;
}

// The chain as certificate rows: one per adjacent inequality, in the order
// solvability propagates (a solution for the smaller source implies one for
// the larger).
template <class Scalar>
std::vector<CertificateReport<Scalar>> means_chain_reports(
    const std::vector<Scalar>& values,
    Scalar tol_eq = Scalar(kEqualityTolerance)) {
  const MeansChain<Scalar> m = means_chain(values);
  std::vector<CertificateReport<Scalar>> out;
  out.push_back(classify<Scalar>("means_min_le_harmonic", m.min, m.harmonic,
                                 tol_eq, {"direct arithmetic"}));
  out.push_back(classify<Scalar>("means_harmonic_le_geometric", m.harmonic,
                                 m.geometric, tol_eq, {"direct arithmetic"}));
  out.push_back(classify<Scalar>("means_geometric_le_arithmetic", m.geometric,
                                 m.arithmetic, tol_eq, {"direct arithmetic"}));
  out.push_back(classify<Scalar>("means_arithmetic_le_rms", m.arithmetic,
                                 std::sqrt(m.quadratic), tol_eq,
                                 {"direct arithmetic"}));
  out.push_back(classify<Scalar>("means_rms_le_max", std::sqrt(m.quadratic),
                                 m.max, tol_eq, {"direct arithmetic"}));
  return out;
}

// ---------------------------------------------------------------------------
// Cauchy-Schwarz family on the hull

// Radially symmetric quadratic test function a - b|x - x0|^2 with b >= 0,
// so its Laplacian -4b is nonpositive.
template <class Scalar>
struct SuperharmonicSpec {
  Scalar a = 1;
  Scalar b = 0.25;
  Vec2<Scalar> center = Vec2<Scalar>::Zero();

  Scalar eval(const Vec2<Scalar>& p) const {
    return a - b * (p - center).squaredNorm();
  }
  Scalar laplacian() const { return -4 * b; }

  static SuperharmonicSpec for_hull(const ConvexPolygon<Scalar>& hull) {
    SuperharmonicSpec s;
    s.center = hull.centroid();
    s.b = Scalar(0.25);
    Scalar far2 = 0;
    for (const auto& v : hull.vertices)
      far2 = std::max(far2, (v - s.center).squaredNorm());
    s.a = 1 + s.b * far2;
    return s;
  }
};

template <class Scalar>
struct CsFamilyInputs {
  LevelSet<Scalar> hull_ls;
  BoundaryTrace<Scalar> trace;
  PoissonSolution<Scalar> u_f;   // P(C, f)
  PoissonSolution<Scalar> v_f;   // P(C, u_f)
  PoissonSolution<Scalar> u_1;   // P(C, 1)
  PoissonSolution<Scalar> v_1;   // P(C, u_1)
  BoundaryGradient<Scalar> grad_u_f, grad_u_1, grad_v_1;

  CsFamilyInputs(const SourceSpec<Scalar>& f, const Grid<Scalar>& grid)
      : hull_ls(signed_distance(f.hull, grid)) {
    trace = extract_boundary(hull_ls);
    auto cascade_f = solve_cascade(hull_ls, f, 2);
    u_f = std::move(cascade_f[0]);
    v_f = std::move(cascade_f[1]);
    auto cascade_1 = solve_cascade(
        hull_ls, [](const Vec2<Scalar>&) { return Scalar(1); }, 2);
    u_1 = std::move(cascade_1[0]);
    v_1 = std::move(cascade_1[1]);
    grad_u_f = boundary_gradient(u_f, trace);
    grad_u_1 = boundary_gradient(u_1, trace);
    grad_v_1 = boundary_gradient(v_1, trace);
  }

  // Trapezoid sum over unflagged trace vertices.
  template <class F>
  Scalar trace_integral(const BoundaryGradient<Scalar>& bg, F&& h) const {
    Scalar total = 0;
    for (Index k = 0; k < trace.vertex_count(); ++k)
      if (!bg.flagged[k])
        total += trace.weights[k] *
                 h(Vec2<Scalar>(trace.positions.col(k)), bg.magnitude[k]);
    return total;
  }
};

template <class Scalar>
std::vector<CertificateReport<Scalar>> cert_cs_family(
    const SourceSpec<Scalar>& f, const GSpec<Scalar>& g,
    const Grid<Scalar>& grid,
    std::optional<SuperharmonicSpec<Scalar>> phi = std::nullopt,
    Scalar tol_eq = Scalar(kEqualityTolerance)) {
  const CsFamilyInputs<Scalar> in(f, grid);
  std::vector<CertificateReport<Scalar>> out;

  const Scalar flux_sqrt_g = polygon_boundary_integral(
      f.hull, [&](const Vec2<Scalar>& p) { return std::sqrt(g.eval(p)); });
  const Scalar hull_perimeter = f.hull.perimeter();
  const Scalar hull_area = f.hull.area();

  // Green's identity with a superharmonic weight:
  // int_bnd |grad u| phi <= int f phi.
  {
    SuperharmonicSpec<Scalar> ph =
        phi.value_or(SuperharmonicSpec<Scalar>::for_hull(f.hull));
    if (ph.laplacian() > 0)
      throw std::invalid_argument("cert_cs_family: test function must be superharmonic");
    for (const auto& v : f.hull.vertices)
      if (!(ph.eval(v) > 0))
        throw std::invalid_argument("cert_cs_family: test function must be positive on the hull");
    const Scalar lhs = in.trace_integral(
        in.grad_u_f,
        [&](const Vec2<Scalar>& p, Scalar m) { return m * ph.eval(p); });
    const Scalar rhs = volume_integral(in.hull_ls, [&](const Vec2<Scalar>& p) {
      return f.eval(p) * ph.eval(p);
    });
    out.push_back(classify<Scalar>(
        "cs_weighted_flux", lhs, rhs, tol_eq,
        {"poisson solve on hull", "boundary gradient trace",
         "quadratic superharmonic weight"}));
  }

  // Phi_sqrt(g) < int sqrt(f u_C).
  {
    const Scalar rhs = volume_integral(in.hull_ls, [&](const Vec2<Scalar>& p) {
      const Scalar fu = f.eval(p) * std::max(in.u_f.u.sample(p), Scalar(0));
      return std::sqrt(fu);
    });
    out.push_back(classify<Scalar>("cs_sqrt_fu", flux_sqrt_g, rhs, tol_eq,
                                   {"poisson solve on hull"}));
  }

  // [Phi_sqrt(g)]^2 <= |bnd C| int f.
  out.push_back(classify<Scalar>(
      "cs_perimeter_mass", flux_sqrt_g * flux_sqrt_g,
      hull_perimeter * f.total_mass(), tol_eq, {"analytic piece areas"}));

  // [Phi_sqrt(g)]^2 <= |bnd C| int u_C.
  {
    const Scalar t_u = volume_integral(in.hull_ls, in.u_f.u);
    out.push_back(classify<Scalar>("cs_perimeter_torsion",
                                   flux_sqrt_g * flux_sqrt_g,
                                   hull_perimeter * t_u, tol_eq,
                                   {"poisson solve on hull"}));
  }

  // Phi_g <= sqrt(int u v) sqrt(int u / v)  (u/v stays bounded: both vanish
  // linearly at the boundary).
  {
    const Scalar flux_g = polygon_boundary_integral(
        f.hull, [&](const Vec2<Scalar>& p) { return g.eval(p); });
    const Scalar t_uv = volume_integral(in.hull_ls, [&](const Vec2<Scalar>& p) {
      return in.u_f.u.sample(p) * in.v_f.u.sample(p);
    });
    const Scalar t_u_over_v =
        volume_integral(in.hull_ls, [&](const Vec2<Scalar>& p) {
          const Scalar uv = in.u_f.u.sample(p);
          const Scalar vv = in.v_f.u.sample(p);
          return vv > Scalar(0) ? std::max(uv, Scalar(0)) / vv : Scalar(0);
        });
    out.push_back(classify<Scalar>("cs_product_split", flux_g,
                                   std::sqrt(std::max(t_uv * t_u_over_v,
                                                      Scalar(0))),
                                   tol_eq,
                                   {"depth-2 cascade on hull"}));
  }

  // |bnd C|^2 <= int u_1 * int_bnd 1/|grad v_1|; tight iff |grad v_1| is
  // constant, the "hull is a ball" branch.
  {
    const Scalar t_u1 = volume_integral(in.hull_ls, in.u_1.u);
    const Scalar inv_flux = in.trace_integral(
        in.grad_v_1, [&](const Vec2<Scalar>&, Scalar m) {
          return m > Scalar(1e-12) ? 1 / m : Scalar(0);
        });
    out.push_back(classify<Scalar>("cs_ball_dichotomy_v",
                                   hull_perimeter * hull_perimeter,
                                   t_u1 * inv_flux, tol_eq,
                                   {"depth-2 cascade on hull, unit source",
                                    "boundary gradient trace"}));
  }

  // [Phi_sqrt(g)]^2 <= |C| int u_1; tight iff |grad v_1| = c |grad u_1|.
  {
    const Scalar t_u1 = volume_integral(in.hull_ls, in.u_1.u);
    out.push_back(classify<Scalar>("cs_ball_dichotomy_uv",
                                   flux_sqrt_g * flux_sqrt_g,
                                   hull_area * t_u1, tol_eq,
                                   {"poisson solve on hull, unit source"}));
  }

  return out;
}

// ---------------------------------------------------------------------------
// Eigenvalue bound

template <class Scalar>
struct Lambda1Certificates {
  CertificateReport<Scalar> domain_bound;   // lambda_1 int u_C  vs  |C|
  CertificateReport<Scalar> induced_datum;  // Phi_g  vs  (1/lambda_1) int 1/u_C
  Scalar lambda1 = 0;
};

template <class Scalar>
Lambda1Certificates<Scalar> cert_lambda1(
    const SourceSpec<Scalar>& f, const GSpec<Scalar>& g,
    const Grid<Scalar>& grid, Scalar tol_eq = Scalar(kEqualityTolerance)) {
  const LevelSet<Scalar> hull_ls = signed_distance(f.hull, grid);
  const Scalar lambda = first_eigenvalue(hull_ls);
  const PoissonSolution<Scalar> u1 =
      solve_poisson(hull_ls, [](const Vec2<Scalar>&) { return Scalar(1); });

  Lambda1Certificates<Scalar> out;
  out.lambda1 = lambda;
  const Scalar t_u = volume_integral(hull_ls, u1.u);
  out.domain_bound = classify<Scalar>(
      "lambda1_domain_bound", lambda * t_u, f.hull.area(), tol_eq,
      {"inverse power iteration", "poisson solve on hull, unit source"});

  // 1/u_C blows up linearly at the boundary; integrate over the 2h-eroded
  // hull and report the truncation band.
  const Scalar band = 2 * grid.hmax();
  LevelSet<Scalar> eroded = hull_ls;
  eroded.phi = hull_ls.phi + band;
  const Scalar inv_u = volume_integral(eroded, [&](const Vec2<Scalar>& p) {
    const Scalar uv = u1.u.sample(p);
    return uv > Scalar(0) ? 1 / uv : Scalar(0);
  });
  const Scalar flux_g = polygon_boundary_integral(
      f.hull, [&](const Vec2<Scalar>& p) { return g.eval(p); });
  out.induced_datum = classify<Scalar>(
      "lambda1_induced_datum", flux_g, inv_u / lambda, tol_eq,
      {"inverse power iteration",
       "1/u integrated over the 2h-eroded hull (truncation band reported)"});
  return out;
}

// ---------------------------------------------------------------------------
// Integral identity check

// int_bnd |grad u|^2 x.n  =  4 int u  for the unit source in 2-D. Holds for
// any smooth domain; a warning is attached when x.n <= 0 somewhere (the
// domain is not star-shaped with respect to the origin).
template <class Scalar>
CertificateReport<Scalar> pohozaev_check(
    const PoissonSolution<Scalar>& sol,
    Scalar tol_eq = Scalar(kEqualityTolerance)) {
  const BoundaryGradient<Scalar> bg = boundary_gradient(sol);
  Scalar lhs = 0;
  bool star_shaped = true;
  for (Index k = 0; k < bg.trace.vertex_count(); ++k) {
    if (bg.flagged[k]) continue;
    const Vec2<Scalar> p = bg.trace.positions.col(k);
    const Scalar xn = p.dot(Vec2<Scalar>(bg.trace.normals.col(k)));
    if (xn <= 0) star_shaped = false;
    lhs += bg.trace.weights[k] * bg.magnitude[k] * bg.magnitude[k] * xn;
  }
  const Scalar rhs = 4 * volume_integral(sol.ls, sol.u);
  std::vector<std::string> prov = {"boundary gradient trace"};
  if (!star_shaped) prov.push_back("warning: not star-shaped (x.n <= 0 at some vertex)");
  return classify<Scalar>("pohozaev_identity", lhs, rhs, tol_eq,
                          std::move(prov));
}

// ---------------------------------------------------------------------------
// Registry

template <class Scalar>
struct CertificateOptions {
  Scalar tol_eq = Scalar(kEqualityTolerance);
  std::optional<SuperharmonicSpec<Scalar>> phi;
};

// Every certificate computable from (C_f, f, g) and hull solves, in a fixed
// deterministic order. The sufficient conditions come first.
template <class Scalar>
std::vector<CertificateReport<Scalar>> evaluate_certificates(
    const SourceSpec<Scalar>& f, const GSpec<Scalar>& g,
    const Grid<Scalar>& grid, const CertificateOptions<Scalar>& opts = {}) {
  std::vector<CertificateReport<Scalar>> out;
  out.push_back(cert_qs_sufficient(f, g, opts.tol_eq));
  out.push_back(cert_bilap_sufficient(f, g, grid, opts.tol_eq));

  auto cs = cert_cs_family(f, g, grid, opts.phi, opts.tol_eq);
  out.insert(out.end(), cs.begin(), cs.end());

  auto lam = cert_lambda1(f, g, grid, opts.tol_eq);
  out.push_back(lam.domain_bound);
  out.push_back(lam.induced_datum);

  {
    const LevelSet<Scalar> hull_ls = signed_distance(f.hull, grid);
    const PoissonSolution<Scalar> u1 =
        solve_poisson(hull_ls, [](const Vec2<Scalar>&) { return Scalar(1); });
    out.push_back(pohozaev_check(u1, opts.tol_eq));
  }

  std::vector<Scalar> piece_values;
  for (const auto& piece : f.pieces) piece_values.push_back(piece.value);
  auto means = means_chain_reports(piece_values, opts.tol_eq);
  out.insert(out.end(), means.begin(), means.end());
  return out;
}

// True when a certificate that guarantees existence fires.
template <class Scalar>
bool any_sufficient_fires(const std::vector<CertificateReport<Scalar>>& reps) {
  for (const auto& r : reps)
    if ((r.id == "qs_sufficient" || r.id == "bilap_sufficient") &&
        r.verdict == Verdict::kFires)
      return true;
  return false;
}

}  // namespace quadsurf
