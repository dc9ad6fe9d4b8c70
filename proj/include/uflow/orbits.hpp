#pragma once

// Double-bracket gradient flows on adjoint orbits (rows U1P / U1KP):
// isospectral conjugation recursions, subgroup-restricted variants, and
// the non-isospectral Euler comparison step.

#include "uflow/flows.hpp"
#include "uflow/liealg.hpp"
#include "uflow/matcore.hpp"

#include <optional>
#include <vector>

namespace uflow::orbits {

/// Point on the unitary orbit of an initial matrix A, carrying the sorted
/// reference spectrum for isospectrality checks.
struct OrbitPoint {
  ComplexMatrix X;
  ComplexVector reference_spectrum; // eigenvalues of A, sorted

  Eigen::Index dim() const { return X.rows(); }
};

/// Eigenvalues sorted lexicographically by (Re, Im).
ComplexVector sorted_spectrum(const ComplexMatrix& m);

OrbitPoint make_orbit_point(const ComplexMatrix& a);

/// Max per-eigenvalue deviation of X's spectrum from the reference.
double spectrum_drift(const OrbitPoint& p);

/// X_{k+1} = e^{-alpha [X,C^dag]_S} X e^{+alpha [X,C^dag]_S}; spectrum
/// preserved by construction, checked against the integrity tolerance.
OrbitPoint db_step(const OrbitPoint& x, const ComplexMatrix& c, double alpha);

/// Restricted variant conjugating by exp of -alpha P_k([X,C^dag]).
OrbitPoint db_step_restricted(const OrbitPoint& x, const ComplexMatrix& c,
                              double alpha, const lie::SubalgebraBasis& p);

/// Plain Euler update X + alpha [X,[X,C^dag]_S]; deliberately returns a raw
/// matrix because it leaves the orbit.
ComplexMatrix euler_db_step(const ComplexMatrix& x, const ComplexMatrix& c,
                            double alpha);

struct OrbitTraceRecord {
  int k = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  double alpha = 0.0;
  double unitarity_defect = 0.0; // defect of the step's conjugator
  double spectrum_drift = 0.0;
};

struct OrbitFlowOptions {
  double tol = 0.0; // <=0: default 1e-9 * ||A|| * ||C||
  int max_iter = 100000;
  bool record_trace = false;
  double drift_budget = 1e-6;
};

struct OrbitFlowResult {
  OrbitPoint X;
  double f = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<OrbitTraceRecord> trace;
  double final_grad_norm = 0.0;
  double max_spectrum_drift = 0.0;
  bool monotone = true;
  std::uint64_t restart_seed = 0;
};

/// Ascent of f(X) = Re tr(C^dag X) over the orbit of A via the
/// double-bracket recursion, from X0 = W0 A W0^dag (W0 defaults to 1).
OrbitFlowResult run_double_bracket(
    const ComplexMatrix& a, const ComplexMatrix& c,
    const flows::StepSizeRule& rule, const OrbitFlowOptions& opts = {},
    const std::optional<lie::SubalgebraBasis>& restriction = std::nullopt,
    const std::optional<UnitaryMatrix>& init_w = std::nullopt);

struct OrbitRestartOptions {
  int restarts = 20;
  std::uint64_t seed = 0;
  int jobs = 1;
  OrbitFlowOptions flow;
  flows::StepSizeRule rule = flows::StepSizeRule::armijo();
};

std::vector<OrbitFlowResult> run_all_restarts(
    const ComplexMatrix& a, const ComplexMatrix& c,
    const OrbitRestartOptions& opts,
    const std::optional<lie::SubalgebraBasis>& restriction = std::nullopt);

OrbitFlowResult run_best_of(
    const ComplexMatrix& a, const ComplexMatrix& c,
    const OrbitRestartOptions& opts,
    const std::optional<lie::SubalgebraBasis>& restriction = std::nullopt);

} // namespace uflow::orbits
