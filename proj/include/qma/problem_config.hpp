#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "qma/solver.hpp"

namespace qma {

/// A parsed solve configuration.
///
/// Schema:
///   {"n": int, "sizes": [4n ints], "periods": [4n reals] (default 1.0),
///    "f": {"trig": [{"k": [...], "cos": a, "sin": b}, ...]}
///       | {"file": "f.qmaf"}
///       | {"manufactured": {"phi": {"trig": [...]}, "continuum": bool}},
///    "G0": {"C": "identity-scaled", "c": real, "rho": {"trig": [...]}},
///    "solver": {"tol", "stage_tol", "max_newton", "continuity_steps",
///               "eps_pos", "cg_tol", "cg_max", "scheme"}}
///
/// Relative file paths resolve against the config file's directory.
struct RunConfig {
  Problem problem;
  SolverConfig solver;
  /// Set when f was manufactured from a known solution.
  std::optional<TrigPoly> phi_star;
};

/// Throws FormatError (malformed JSON or schema) or other qma errors.
RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// log(det(G0 + Hess phi*) / det G0) with the problem's scheme, or with exact
/// derivatives when `continuum` is set.
ScalarField manufactured_f(const Grid& g, const HyperHermitian& c0, const TrigPoly& rho0,
                           const TrigPoly& phi_star, Scheme scheme, bool continuum);

/// Writes a standard problem into `out_dir`: config.json plus oracle fields.
/// Kinds: poisson1, manufactured2, slice2d, random. Returns the config path.
std::filesystem::path make_problem_files(const std::string& kind, std::uint64_t seed,
                                         const std::filesystem::path& out_dir);

/// Serializes a trigonometric polynomial as {"trig": [...]}.
std::string trig_to_json(const TrigPoly& p);

}  // namespace qma
