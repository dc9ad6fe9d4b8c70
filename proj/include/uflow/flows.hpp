#pragma once

// Quality functions on the unitary group and their Riemannian gradients,
// step-size rules, the geodesic-step integrator, and restricted, coupled
// and penalty-constrained flows (Table rows U1..U3, U1K..U3K, U1C..U3C).

#include "uflow/liealg.hpp"
#include "uflow/matcore.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace uflow::flows {

enum class QfKind { U1, U2, U3, U1C, U2C, U3C };

const char* kind_name(QfKind k);

/// Problem datum selecting a flow. The restriction basis turns U1/U2/U3
/// into their subgroup-restricted variants U1K/U2K/U3K.
struct QualityFunction {
  QfKind kind = QfKind::U1;
  ComplexMatrix A;
  ComplexMatrix C;
  std::optional<ComplexMatrix> D; // U3C contrast target
  std::optional<ComplexMatrix> E; // U2C invariance constraint
  double lambda0 = 1.0;           // initial penalty weight
  std::optional<lie::SubalgebraBasis> restriction;

  bool two_sided() const { return kind == QfKind::U3; }
  bool constrained() const {
    return kind == QfKind::U1C || kind == QfKind::U2C || kind == QfKind::U3C;
  }
  Eigen::Index dim() const { return A.rows(); }
  void validate() const;
};

struct StepSizeRule {
  enum class Kind { Fixed, ArmijoHalving, AnalyticLocal };
  Kind kind = Kind::ArmijoHalving;
  double alpha = 0.1;     // Fixed: absolute step. Armijo: trial is alpha/||grad||.
  double shrink = 0.5;
  int max_halvings = 40;

  static StepSizeRule fixed(double a) { return {Kind::Fixed, a, 0.5, 0}; }
  static StepSizeRule armijo(double a0 = 0.1, int halvings = 40) {
    return {Kind::ArmijoHalving, a0, 0.5, halvings};
  }
  static StepSizeRule analytic_local() {
    return {Kind::AnalyticLocal, 0.1, 0.5, 40};
  }
};

struct TraceRecord {
  int k = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  double alpha = 0.0;
  double unitarity_defect = 0.0;
};

using FlowTrace = std::vector<TraceRecord>;

struct FlowOptions {
  double grad_tol = 0.0;  // <=0: default 1e-9 * ||A|| * ||C||
  int max_iter = 100000;
  bool record_trace = false;
  int penalty_epoch = 200;      // lambda doubles every this many iterations
  double penalty_cap = 1e6;
};

struct FlowResult {
  UnitaryMatrix U;
  std::optional<UnitaryMatrix> V; // second factor for coupled kinds
  double f = 0.0;
  bool converged = false;
  int iterations = 0;
  FlowTrace trace;
  double final_grad_norm = 0.0;
  double max_unitarity_defect = 0.0;
  bool monotone = true;
  double final_lambda = 0.0;             // constrained kinds
  double constraint_residual = 0.0;      // U2C: |tr(E^dag UEU^dag) - ||E||^2|
  std::uint64_t restart_seed = 0;
};

/// f(U) (or f(U,V)) per the kind's formula; penalty kinds use lambda.
double value(const QualityFunction& qf, const UnitaryMatrix& u,
             const UnitaryMatrix* v = nullptr, double lambda = 0.0);

struct GradientDirection {
  AlgebraElement omega_u;
  std::optional<AlgebraElement> omega_v;
  double norm() const;
};

/// Ascent direction Omega with Riemannian gradient Omega*U (pullback to
/// the algebra by right translation); projected onto the restriction when
/// one is set.
GradientDirection gradient_direction(const QualityFunction& qf,
                                     const UnitaryMatrix& u,
                                     const UnitaryMatrix* v = nullptr,
                                     double lambda = 0.0);

/// Geodesic step exp(alpha*Omega) U.
UnitaryMatrix step(const UnitaryMatrix& u, const AlgebraElement& omega,
                   double alpha);

/// The analytic step size for the restricted flow on f(U)=Re tr(C^dag UAU^dag):
///   ||P([C^dag,A_U])||^2 / (||[C^dag,P(.)]|| * ||[P(.),A_U]||).
/// Returns nullopt when the projected gradient vanishes (convergence).
std::optional<double> analytic_step_u1k(const UnitaryMatrix& u,
                                        const ComplexMatrix& a,
                                        const ComplexMatrix& c,
                                        const lie::SubalgebraBasis& p);

/// Discrete gradient ascent U_{k+1} = exp(alpha_k Omega(U_k)) U_k with the
/// chosen step rule until the gradient norm falls below grad_tol.
FlowResult run_flow(const QualityFunction& qf, const StepSizeRule& rule,
                    const UnitaryMatrix& init_u,
                    const UnitaryMatrix* init_v = nullptr,
                    const FlowOptions& opts = {});

struct RestartOptions {
  int restarts = 20;
  std::uint64_t seed = 0;
  int jobs = 1;
  FlowOptions flow;
  StepSizeRule rule = StepSizeRule::armijo();
};

/// Haar-restart sweep; returns the best-f result (per-restart seeds are
/// derived deterministically from the base seed).
FlowResult run_best_of(const QualityFunction& qf, const RestartOptions& opts);

/// All restart results in index order (for census-style experiments).
std::vector<FlowResult> run_all_restarts(const QualityFunction& qf,
                                         const RestartOptions& opts);

/// Hessian of f(U)=Re tr(C^dag UAU^dag) restricted to span(P) at U, as the
/// real symmetric matrix S_ij = Hess(h_i U, h_j U) in the orthonormal basis:
///   S(U)Om = 1/2 P([C^dag,[Om,A_U]] + [A_U,[Om,C^dag]]).
RealMatrix hessian_local(const UnitaryMatrix& u, const ComplexMatrix& a,
                         const ComplexMatrix& c,
                         const lie::SubalgebraBasis& p);

enum class CriticalType { Maximum, Minimum, Saddle, Degenerate };

const char* critical_type_name(CriticalType t);

/// Classify a critical point of a U1-family quality function by the sign
/// pattern of the restricted Hessian spectrum (zero tolerance 1e-7*||S||).
CriticalType classify_critical(const UnitaryMatrix& u,
                               const QualityFunction& qf, double grad_tol);

} // namespace uflow::flows
