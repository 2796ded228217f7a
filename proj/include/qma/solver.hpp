#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qma/calculus.hpp"
#include "qma/deriv.hpp"
#include "qma/grid.hpp"
#include "qma/hherm.hpp"
#include "qma/trigpoly.hpp"

namespace qma {

/// det(G0 + Hess phi) = A e^{t f} det G0 on a flat torus.
struct Problem {
  ScalarField f;
  /// C0 + Hess rho0, discretized with `scheme`.
  HermitianField G0;
  Scheme scheme = Scheme::spectral;

  const Grid& grid() const { return f.grid(); }
  /// Throws unless the grids match, f is finite and G0 is positive definite.
  void validate() const;
};

/// G0 := C0 + Hess_H(rho0) sampled on the grid of f.
Problem build_problem(ScalarField f, const HyperHermitian& c0, const TrigPoly& rho0,
                      Scheme scheme);

struct SolverConfig {
  double tol_residual = 1e-9;   ///< final stage, relative to sup |A e^{tf} det G0|
  double stage_tol = 1e-6;      ///< intermediate stages (never below tol_residual)
  int max_newton = 30;
  int continuity_steps = 8;
  double eps_pos = 1e-6;
  double cg_tol = 1e-12;
  int cg_max = 500;
  int gmres_restart = 60;
  std::optional<Scheme> scheme;  ///< overrides Problem::scheme when set
  double damping = 0.5;
  double min_step = 1.0 / (1 << 20);

  void validate() const;
};

struct SolverState {
  ScalarField phi;
  double A = 1.0;
  double t = 0.0;
};

/// One line of the iteration log.
struct IterationRecord {
  int stage = 0;
  double t = 0.0;
  int newton_iter = 0;
  double residual_linf = 0.0;
  double A = 1.0;
  double min_eig = 0.0;
  double pogorelov_sup = 0.0;
  double alpha = 0.0;
};

struct StageRecord {
  int stage = 0;
  double t = 0.0;
  int iterations = 0;
  double residual_linf = 0.0;
  double A = 1.0;
  double min_eig = 0.0;
  double pogorelov_sup = 0.0;
  bool converged = false;
};

enum class SolveStatus { converged, positivity_lost, no_convergence, stalled };
std::string to_string(SolveStatus s);

struct SolverReport {
  std::vector<IterationRecord> iterations;
  std::vector<StageRecord> stages;
  SolveStatus status = SolveStatus::converged;
  std::string message;

  bool ok() const { return status == SolveStatus::converged; }
  /// Largest pogorelov_sup over accepted stages.
  double pogorelov_max() const;
  /// Header "stage,t,newton_iter,residual_linf,A,min_eig,pogorelov_sup,alpha",
  /// floats with 17 significant digits.
  void write_csv(std::ostream& os) const;
};

/// A = int det G0 / int e^{t f} det G0.
double compute_A(const ScalarField& f, const HermitianField& G0, double t);

/// U = G0 + Hess_H phi with the problem's scheme.
HermitianField current_U(const SolverState& s, const Problem& p);

/// det(G0 + Hess phi) - A e^{t f} det G0. Throws PositivityLost where
/// G0 + Hess phi is not positive definite.
ScalarField residual(const SolverState& s, const Problem& p);

/// det U Tr(U^{-1} Hess psi), in divergence form by default.
ScalarField linearized_apply(const SolverState& s, const Problem& p, const ScalarField& psi,
                             DForm form = DForm::divergence);

/// sup over the grid of 2 sqrt(Tr U) - phi (reference metric G = Id).
double pogorelov_sup(const HermitianField& U, const ScalarField& phi);

struct NewtonResult {
  int iterations = 0;
  double residual_linf = 0.0;
  double min_eig = 0.0;
};

/// Damped Newton at fixed t. `tol_abs` is the sup-norm target for the
/// residual. Accepted iterates are appended to `report` when given.
/// Throws PositivityLost or ConvergenceError.
NewtonResult newton_solve(SolverState& s, const Problem& p, const SolverConfig& cfg,
                          double tol_abs, SolverReport* report = nullptr, int stage = 0);

struct SolveResult {
  SolverState state;
  SolverReport report;
};

/// Continuation in t from 0 to 1. Failures are reported through
/// report.status rather than thrown.
SolveResult continuity_solve(const Problem& p, const SolverConfig& cfg,
                             const std::optional<ScalarField>& initial_phi = std::nullopt);

/// Subtracts the det G0 weighted mean.
void project_weighted_mean(ScalarField& phi, const ScalarField& weight);

}  // namespace qma
