#include "qma/problem_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qma/errors.hpp"
#include "qma/qmaf.hpp"

namespace qma {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

TrigPoly parse_trig(const json& j, std::size_t dim) {
  TrigPoly p;
  if (j.is_null()) return p;
  for (const auto& term : j.at("trig")) {
    TrigTerm t;
    t.k = term.at("k").get<std::vector<int>>();
    if (t.k.size() != dim) throw FormatError("trig term frequency must have 4n entries");
    t.cos = term.value("cos", 0.0);
    t.sin = term.value("sin", 0.0);
    p.add(std::move(t));
  }
  return p;
}

ordered_json trig_json(const TrigPoly& p) {
  ordered_json terms = ordered_json::array();
  for (const auto& t : p.terms()) {
    ordered_json o;
    o["k"] = t.k;
    o["cos"] = t.cos;
    o["sin"] = t.sin;
    terms.push_back(o);
  }
  ordered_json out;
  out["trig"] = terms;
  return out;
}

SolverConfig parse_solver(const json& j, const Grid& g) {
  SolverConfig c;
  if (!j.is_null()) {
    c.tol_residual = j.value("tol", c.tol_residual);
    c.stage_tol = j.value("stage_tol", c.stage_tol);
    c.max_newton = j.value("max_newton", c.max_newton);
    c.continuity_steps = j.value("continuity_steps", c.continuity_steps);
    c.eps_pos = j.value("eps_pos", c.eps_pos);
    c.cg_tol = j.value("cg_tol", c.cg_tol);
    c.cg_max = j.value("cg_max", c.cg_max);
    if (j.contains("scheme")) c.scheme = parse_scheme(j.at("scheme").get<std::string>());
  }
  if (!c.scheme) c.scheme = default_scheme(g);
  c.validate();
  return c;
}

HyperHermitian parse_c0(const json& g0, std::size_t n) {
  const std::string kind = g0.value("C", std::string("identity-scaled"));
  if (kind != "identity-scaled") throw FormatError("G0.C must be \"identity-scaled\"");
  const double c = g0.value("c", 1.0);
  if (!(c > 0.0)) throw FormatError("G0.c must be positive");
  return HyperHermitian::identity(n, c);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (!out) throw FormatError("write failed for " + path.string());
}

ordered_json grid_json(const Grid& g) {
  ordered_json j;
  j["n"] = g.n();
  j["sizes"] = std::vector<int>(g.sizes().begin(), g.sizes().end());
  j["periods"] = std::vector<double>(g.periods().begin(), g.periods().end());
  return j;
}

ordered_json g0_json(double c, const TrigPoly& rho) {
  ordered_json j;
  j["C"] = "identity-scaled";
  j["c"] = c;
  j["rho"] = trig_json(rho);
  return j;
}

ordered_json solver_json(Scheme s) {
  ordered_json j;
  j["tol"] = 1e-9;
  j["max_newton"] = 30;
  j["continuity_steps"] = 8;
  j["eps_pos"] = 1e-6;
  j["scheme"] = to_string(s);
  return j;
}

// The usual constant c = 1.5 |min mineig Hess rho| + 1 on the grid.
double shift_for(const TrigPoly& rho, const Grid& g, Scheme s) {
  double c = 0.0;
  positive_hessian_field(sample_trigpoly(rho, g), Differentiator(g, s), &c);
  return c;
}

TrigPoly single_cos(std::size_t dim, std::size_t axis, double amp) {
  TrigTerm t;
  t.k.assign(dim, 0);
  t.k[axis] = 1;
  t.cos = amp;
  return TrigPoly({t});
}

}  // namespace

std::string trig_to_json(const TrigPoly& p) { return trig_json(p).dump(); }

ScalarField manufactured_f(const Grid& g, const HyperHermitian& c0, const TrigPoly& rho0,
                           const TrigPoly& phi_star, Scheme scheme, bool continuum) {
  ScalarField f(g);
  if (continuum) {
    std::vector<double> x(g.dim());
    for (std::size_t p = 0; p < g.points(); ++p) {
      g.coords(p, x);
      HyperHermitian g0 = quaternionic_hessian(rho0.hessian(x, g.periods()), g.n());
      g0 += c0;
      const HyperHermitian u = g0 + quaternionic_hessian(phi_star.hessian(x, g.periods()), g.n());
      f[p] = std::log(moore_det_fast(u) / moore_det_fast(g0));
    }
    return f;
  }
  const Differentiator d(g, scheme);
  HermitianField g0 = hess_H(sample_trigpoly(rho0, g), d);
  g0 += HermitianField(g, c0);
  HermitianField u = hess_H(sample_trigpoly(phi_star, g), d);
  u += g0;
  const ScalarField du = moore_det_field(u), d0 = moore_det_field(g0);
  for (std::size_t p = 0; p < g.points(); ++p) {
    if (!(du[p] > 0.0)) throw PointError("manufactured solution is not admissible", p);
    f[p] = std::log(du[p] / d0[p]);
  }
  return f;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    const auto n = j.at("n").get<std::size_t>();
    if (n == 0) throw FormatError("n must be positive");
    const auto sizes = j.at("sizes").get<std::vector<int>>();
    std::vector<double> periods(4 * n, 1.0);
    if (j.contains("periods")) periods = j.at("periods").get<std::vector<double>>();
    if (sizes.size() != 4 * n || periods.size() != 4 * n) {
      throw FormatError("sizes and periods must have 4n entries");
    }
    const Grid g(n, sizes, periods);
    SolverConfig solver = parse_solver(j.value("solver", json()), g);
    const Scheme scheme = *solver.scheme;

    const json g0 = j.value("G0", json::object());
    const HyperHermitian c0 = parse_c0(g0, n);
    const TrigPoly rho0 = parse_trig(g0.value("rho", json()), g.dim());

    RunConfig out{Problem{ScalarField(g), HermitianField(g), scheme}, solver, std::nullopt};
    const json fj = j.value("f", json::object());
    ScalarField f(g);
    if (fj.contains("trig")) {
      f = sample_trigpoly(parse_trig(fj, g.dim()), g);
    } else if (fj.contains("file")) {
      f = qmaf::read_scalar(base_dir / fj.at("file").get<std::string>());
      if (!(f.grid() == g)) throw FormatError("f file grid does not match the config grid");
    } else if (fj.contains("manufactured")) {
      const json& m = fj.at("manufactured");
      TrigPoly phi = parse_trig(m.at("phi"), g.dim());
      f = manufactured_f(g, c0, rho0, phi, scheme, m.value("continuum", false));
      out.phi_star = std::move(phi);
    } else if (!fj.empty()) {
      throw FormatError("f must hold one of trig, file, manufactured");
    }
    out.problem = build_problem(std::move(f), c0, rho0, scheme);
    return out;
  } catch (const json::exception& e) {
    throw FormatError(std::string("config schema error: ") + e.what());
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::filesystem::path make_problem_files(const std::string& kind, std::uint64_t seed,
                                         const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw FormatError("cannot create " + out_dir.string() + ": " + ec.message());
  const auto config_path = out_dir / "config.json";

  if (kind == "poisson1") {
    const Grid g(1, {16, 16, 16, 16});
    const std::vector<std::size_t> axes{0, 1, 2, 3};
    const TrigPoly rho = TrigPoly::random(4, axes, 1, 3, 0.004, seed);
    const TrigPoly f = single_cos(4, 0, 0.3);
    const Scheme s = default_scheme(g);
    const double c = shift_for(rho, g, s);
    ordered_json j = grid_json(g);
    j["f"] = trig_json(f);
    j["G0"] = g0_json(c, rho);
    j["solver"] = solver_json(s);
    write_text(config_path, j.dump(2) + "\n");
    // Oracle: Lap phi = A e^f g - g solved in frequency space.
    const Problem p = build_problem(sample_trigpoly(f, g), HyperHermitian::identity(1, c), rho, s);
    const ScalarField gfield = p.G0.component(0);
    const double A = compute_A(p.f, p.G0, 1.0);
    ScalarField rhs(g);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = A * std::exp(p.f[i]) * gfield[i] - gfield[i];
    ScalarField phi = Spectral(g).inverse_laplacian(rhs);
    project_weighted_mean(phi, gfield);
    qmaf::write(out_dir / "phi_oracle.qmaf", phi);
    return config_path;
  }
  if (kind == "manufactured2") {
    const Grid g(2, {8, 8, 1, 1, 8, 8, 1, 1});
    const std::vector<std::size_t> axes{0, 1, 4, 5};
    const Scheme s = default_scheme(g);
    const TrigPoly rho = TrigPoly::random(8, axes, 1, 4, 0.005, seed);
    const double c = shift_for(rho, g, s);
    TrigPoly phi = TrigPoly::random(8, axes, 1, 4, 0.004, seed + 1);
    const HyperHermitian c0 = HyperHermitian::identity(2, c);
    const ScalarField f = manufactured_f(g, c0, rho, phi, s, false);
    ordered_json j = grid_json(g);
    j["f"] = {{"file", "f.qmaf"}};
    j["G0"] = g0_json(c, rho);
    j["solver"] = solver_json(s);
    write_text(config_path, j.dump(2) + "\n");
    qmaf::write(out_dir / "f.qmaf", f);
    qmaf::write(out_dir / "phi_star.qmaf", sample_trigpoly(phi, g));
    write_text(out_dir / "phi_star.json", trig_json(phi).dump(2) + "\n");
    return config_path;
  }
  if (kind == "slice2d" || kind == "random") {
    const bool slice = kind == "slice2d";
    const Grid g = slice ? Grid(2, {32, 1, 1, 1, 32, 1, 1, 1}) : Grid(2, {16, 16, 1, 1, 16, 16, 1, 1});
    const std::vector<std::size_t> axes =
        slice ? std::vector<std::size_t>{0, 4} : std::vector<std::size_t>{0, 1, 4, 5};
    const Scheme s = default_scheme(g);
    const TrigPoly rho = TrigPoly::random(8, axes, 1, 4, slice ? 0.01 : 0.004, seed);
    const TrigPoly f = TrigPoly::random(8, axes, 1, 3, 0.1, seed + 1);
    const double c = shift_for(rho, g, s);
    ordered_json j = grid_json(g);
    j["f"] = trig_json(f);
    j["G0"] = g0_json(c, rho);
    j["solver"] = solver_json(s);
    write_text(config_path, j.dump(2) + "\n");
    return config_path;
  }
  throw FormatError("unknown problem kind '" + kind + "'");
}

}  // namespace qma
