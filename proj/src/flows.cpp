#include "uflow/flows.hpp"

#include "uflow/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace uflow::flows {

namespace {

Complex transfer_trace(const ComplexMatrix& c, const ComplexMatrix& a_tilde) {
  return hs_inner(c, a_tilde); // tr(C^dag A_U)
}

// Restriction-aware projection: P when a basis is set, otherwise the
// skew-Hermitian part (the orthogonal projection onto u(N)).
AlgebraElement project_dir(const QualityFunction& qf, const ComplexMatrix& g) {
  if (qf.restriction) return lie::project(*qf.restriction, g);
  return skew_part(g);
}

double lambda_at(const QualityFunction& qf, const FlowOptions& opts, int k) {
  if (!qf.constrained()) return 0.0;
  const double l =
      qf.lambda0 * std::ldexp(1.0, k / std::max(1, opts.penalty_epoch));
  return std::min(l, opts.penalty_cap);
}

} // namespace

const char* kind_name(QfKind k) {
  switch (k) {
    case QfKind::U1: return "U1";
    case QfKind::U2: return "U2";
    case QfKind::U3: return "U3";
    case QfKind::U1C: return "U1C";
    case QfKind::U2C: return "U2C";
    case QfKind::U3C: return "U3C";
  }
  return "?";
}

void QualityFunction::validate() const {
  require_square(A, "QualityFunction");
  require_same_shape(A, C, "QualityFunction");
  if (kind == QfKind::U2C) {
    if (!E) throw std::invalid_argument("QualityFunction: U2C requires E");
    require_same_shape(A, *E, "QualityFunction(E)");
  }
  if (kind == QfKind::U3C) {
    if (!D) throw std::invalid_argument("QualityFunction: U3C requires D");
    require_same_shape(A, *D, "QualityFunction(D)");
  }
  if (constrained()) {
    if (lambda0 < 0.0)
      throw std::invalid_argument("QualityFunction: lambda0 must be >= 0");
    if (restriction)
      throw std::invalid_argument(
          "QualityFunction: constrained kinds take no restriction");
  }
  if (restriction && restriction->dim_n != A.rows())
    throw std::invalid_argument("QualityFunction: restriction dimension mismatch");
}

double value(const QualityFunction& qf, const UnitaryMatrix& u,
             const UnitaryMatrix* v, double lambda) {
  if (qf.two_sided() && v == nullptr)
    throw std::invalid_argument("value: U3 requires the second factor V");
  require_same_shape(qf.A, u, "value");
  switch (qf.kind) {
    case QfKind::U1:
      return std::real(transfer_trace(qf.C, u * qf.A * u.adjoint()));
    case QfKind::U2: {
      const Complex z = transfer_trace(qf.C, u * qf.A * u.adjoint());
      return std::norm(z);
    }
    case QfKind::U3:
      return std::real(hs_inner(qf.C, u * qf.A * (*v)));
    case QfKind::U1C: {
      const Complex z = transfer_trace(qf.C, u * qf.A * u.adjoint());
      return std::real(z) - lambda * std::imag(z) * std::imag(z);
    }
    case QfKind::U2C: {
      // Penalty reading of the invariance constraint: Re tr(E^dag UEU^dag)
      // never exceeds ||E||^2, with equality exactly on the stabilizer of
      // E, so lambda * (Re f_E - ||E||^2) <= 0 penalises any violation.
      const ComplexMatrix a_t = u * qf.A * u.adjoint();
      const Complex z = transfer_trace(qf.C, a_t);
      const Complex we = hs_inner(*qf.E, u * (*qf.E) * u.adjoint());
      const double e2 = qf.E->squaredNorm();
      return std::norm(z) + lambda * (std::real(we) - e2);
    }
    case QfKind::U3C: {
      const ComplexMatrix a_t = u * qf.A * u.adjoint();
      const Complex zc = transfer_trace(qf.C, a_t);
      const Complex zd = transfer_trace(*qf.D, a_t);
      return std::norm(zc) - lambda * std::norm(zd);
    }
  }
  throw std::logic_error("value: unknown kind");
}

double GradientDirection::norm() const {
  double s = omega_u.squaredNorm();
  if (omega_v) s += omega_v->squaredNorm();
  return std::sqrt(s);
}

GradientDirection gradient_direction(const QualityFunction& qf,
                                     const UnitaryMatrix& u,
                                     const UnitaryMatrix* v, double lambda) {
  if (qf.two_sided() && v == nullptr)
    throw std::invalid_argument("gradient_direction: U3 requires V");
  require_same_shape(qf.A, u, "gradient_direction");

  GradientDirection dir;
  switch (qf.kind) {
    case QfKind::U1: {
      const ComplexMatrix a_t = u * qf.A * u.adjoint();
      dir.omega_u = project_dir(qf, commutator(qf.C.adjoint(), a_t));
      return dir;
    }
    case QfKind::U2: {
      const ComplexMatrix a_t = u * qf.A * u.adjoint();
      const Complex z = transfer_trace(qf.C, a_t);
      dir.omega_u =
          project_dir(qf, 2.0 * std::conj(z) * commutator(qf.C.adjoint(), a_t));
      return dir;
    }
    case QfKind::U3: {
      dir.omega_u = project_dir(qf, -(u * qf.A * (*v) * qf.C.adjoint()));
      dir.omega_v = project_dir(qf, -((*v) * qf.C.adjoint() * u * qf.A));
      return dir;
    }
    case QfKind::U1C: {
      const ComplexMatrix a_t = u * qf.A * u.adjoint();
      const ComplexMatrix g = commutator(qf.C.adjoint(), a_t);
      const Complex z = transfer_trace(qf.C, a_t);
      dir.omega_u = skew_part(g) +
                    (2.0 * lambda * std::imag(z)) * (Complex(0, 1) * herm_part(g));
      return dir;
    }
    case QfKind::U2C: {
      const ComplexMatrix a_t = u * qf.A * u.adjoint();
      const ComplexMatrix e_t = u * (*qf.E) * u.adjoint();
      const Complex z = transfer_trace(qf.C, a_t);
      dir.omega_u =
          skew_part(2.0 * std::conj(z) * commutator(qf.C.adjoint(), a_t)) -
          lambda * skew_part(commutator(e_t, qf.E->adjoint()));
      return dir;
    }
    case QfKind::U3C: {
      const ComplexMatrix a_t = u * qf.A * u.adjoint();
      const Complex zc = transfer_trace(qf.C, a_t);
      const Complex zd = transfer_trace(*qf.D, a_t);
      dir.omega_u =
          skew_part(2.0 * std::conj(zc) * commutator(qf.C.adjoint(), a_t)) -
          skew_part(2.0 * lambda * std::conj(zd) *
                    commutator(qf.D->adjoint(), a_t));
      return dir;
    }
  }
  throw std::logic_error("gradient_direction: unknown kind");
}

UnitaryMatrix step(const UnitaryMatrix& u, const AlgebraElement& omega,
                   double alpha) {
  require_same_shape(u, omega, "step");
  if (alpha == 0.0) return u;
  return expm_skew(alpha * omega) * u;
}

std::optional<double> analytic_step_u1k(const UnitaryMatrix& u,
                                        const ComplexMatrix& a,
                                        const ComplexMatrix& c,
                                        const lie::SubalgebraBasis& p) {
  const ComplexMatrix a_t = u * a * u.adjoint();
  const AlgebraElement g = lie::project(p, commutator(c.adjoint(), a_t));
  const double gn2 = g.squaredNorm();
  if (gn2 == 0.0) return std::nullopt;
  const double d1 = commutator(c.adjoint(), g).norm();
  const double d2 = commutator(g, a_t).norm();
  const double denom = d1 * d2;
  if (denom <= 1e-300) return std::nullopt;
  return gn2 / denom;
}

namespace {

struct State {
  UnitaryMatrix u;
  std::optional<UnitaryMatrix> v;
};

double eval(const QualityFunction& qf, const State& s, double lambda) {
  return value(qf, s.u, s.v ? &*s.v : nullptr, lambda);
}

State advance(const State& s, const GradientDirection& dir, double alpha) {
  State out;
  out.u = step(s.u, dir.omega_u, alpha);
  if (s.v) out.v = step(*s.v, *dir.omega_v, alpha);
  return out;
}

} // namespace

FlowResult run_flow(const QualityFunction& qf, const StepSizeRule& rule,
                    const UnitaryMatrix& init_u, const UnitaryMatrix* init_v,
                    const FlowOptions& opts) {
  qf.validate();
  if (qf.two_sided() && init_v == nullptr)
    throw std::invalid_argument("run_flow: U3 requires a second initial factor");
  if (rule.kind == StepSizeRule::Kind::AnalyticLocal &&
      (qf.kind != QfKind::U1 || !qf.restriction))
    throw std::invalid_argument(
        "run_flow: the analytic step rule applies to restricted U1 flows only");

  const Eigen::Index n = qf.dim();
  const double grad_tol = opts.grad_tol > 0.0
                              ? opts.grad_tol
                              : 1e-9 * qf.A.norm() * qf.C.norm();
  const double defect_budget = 1e-9 * double(n);

  State s{init_u, std::nullopt};
  if (init_v) s.v = *init_v;

  FlowResult res;
  res.restart_seed = 0;
  double lambda = lambda_at(qf, opts, 0);
  double f = eval(qf, s, lambda);
  double defect = unitarity_defect(s.u);
  res.max_unitarity_defect = defect;

  int k = 0;
  bool converged = false;
  double grad_norm = 0.0;

  while (k < opts.max_iter) {
    const double lambda_k = lambda_at(qf, opts, k);
    if (lambda_k != lambda) {
      lambda = lambda_k;
      f = eval(qf, s, lambda);
    }
    const GradientDirection dir =
        gradient_direction(qf, s.u, s.v ? &*s.v : nullptr, lambda);
    grad_norm = dir.norm();

    if (grad_norm <= grad_tol) {
      if (qf.constrained() && lambda < opts.penalty_cap) {
        // Converged at the current penalty weight: fast-forward the
        // schedule to the next epoch boundary instead of idling.
        k = ((k / opts.penalty_epoch) + 1) * opts.penalty_epoch;
        continue;
      }
      converged = true;
      break;
    }

    double alpha = 0.0;
    double f_next = f;
    State next;
    bool accepted = false;
    switch (rule.kind) {
      case StepSizeRule::Kind::Fixed: {
        alpha = rule.alpha;
        next = advance(s, dir, alpha);
        f_next = eval(qf, next, lambda);
        accepted = true;
        break;
      }
      case StepSizeRule::Kind::AnalyticLocal: {
        const auto a = analytic_step_u1k(s.u, qf.A, qf.C, *qf.restriction);
        if (!a) {
          converged = true;
          break;
        }
        alpha = *a;
        next = advance(s, dir, alpha);
        f_next = eval(qf, next, lambda);
        accepted = true;
        break;
      }
      case StepSizeRule::Kind::ArmijoHalving: {
        alpha = rule.alpha / grad_norm;
        const double slope = grad_norm * grad_norm;
        for (int h = 0; h <= rule.max_halvings; ++h) {
          next = advance(s, dir, alpha);
          f_next = eval(qf, next, lambda);
          if (f_next >= f + 1e-4 * alpha * slope) {
            accepted = true;
            break;
          }
          alpha *= rule.shrink;
        }
        break;
      }
    }
    if (converged) break; // analytic rule signalled a vanished gradient
    if (!accepted) {
      // Halvings exhausted with no certifiable increase. A constrained run
      // that has not yet reached the penalty cap moves to the next lambda
      // epoch, which changes the objective and re-kicks the flow.
      if (qf.constrained() && lambda < opts.penalty_cap) {
        k = ((k / opts.penalty_epoch) + 1) * opts.penalty_epoch;
        continue;
      }
      break;
    }

    if (opts.record_trace)
      res.trace.push_back({k, f, grad_norm, alpha, defect});
    if (f_next < f - 1e-12 * std::max(1.0, std::abs(f))) res.monotone = false;

    s = std::move(next);
    f = f_next;
    defect = unitarity_defect(s.u);
    res.max_unitarity_defect = std::max(res.max_unitarity_defect, defect);
    if (defect > defect_budget)
      throw std::runtime_error("run_flow: iterate left the unitary manifold");
    ++k;
  }

  if (opts.record_trace)
    res.trace.push_back({k, f, grad_norm, 0.0, defect});

  res.U = s.u;
  res.V = s.v;
  res.f = f;
  res.converged = converged;
  res.iterations = k;
  res.final_grad_norm = grad_norm;
  res.final_lambda = lambda;
  if (qf.kind == QfKind::U2C) {
    const Complex we = hs_inner(*qf.E, s.u * (*qf.E) * s.u.adjoint());
    res.constraint_residual = std::abs(we - Complex(qf.E->squaredNorm(), 0.0));
  }
  return res;
}

std::vector<FlowResult> run_all_restarts(const QualityFunction& qf,
                                         const RestartOptions& opts) {
  const Eigen::Index n = qf.dim();
  const int count = std::max(1, opts.restarts);
  std::vector<FlowResult> results(count);
  parallel_for_index(static_cast<std::size_t>(count), opts.jobs,
                     [&](std::size_t i) {
                       const std::uint64_t s =
                           derive_seed(opts.seed, static_cast<std::uint64_t>(i));
                       std::mt19937_64 rng(s);
                       auto draw = [&]() {
                         return qf.restriction
                                    ? lie::random_subgroup_element(*qf.restriction, rng)
                                    : haar_random_unitary(n, rng);
                       };
                       const UnitaryMatrix u0 = draw();
                       if (qf.two_sided()) {
                         const UnitaryMatrix v0 = draw();
                         results[i] = run_flow(qf, opts.rule, u0, &v0, opts.flow);
                       } else {
                         results[i] = run_flow(qf, opts.rule, u0, nullptr, opts.flow);
                       }
                       results[i].restart_seed = s;
                     });
  return results;
}

FlowResult run_best_of(const QualityFunction& qf, const RestartOptions& opts) {
  auto results = run_all_restarts(qf, opts);
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].f > results[best].f) best = i;
  return results[best];
}

RealMatrix hessian_local(const UnitaryMatrix& u, const ComplexMatrix& a,
                         const ComplexMatrix& c,
                         const lie::SubalgebraBasis& p) {
  if (u.rows() != p.dim_n)
    throw std::invalid_argument("hessian_local: dimension mismatch");
  const ComplexMatrix a_t = u * a * u.adjoint();
  const Eigen::Index m = p.size();
  RealMatrix s(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const AlgebraElement& hj = p.elements[j];
    const ComplexMatrix mj =
        0.5 * (commutator(c.adjoint(), commutator(hj, a_t)) +
               commutator(a_t, commutator(hj, c.adjoint())));
    for (Eigen::Index i = 0; i < m; ++i)
      s(i, j) = hs_inner_re(p.elements[i], mj);
  }
  return s;
}

const char* critical_type_name(CriticalType t) {
  switch (t) {
    case CriticalType::Maximum: return "max";
    case CriticalType::Minimum: return "min";
    case CriticalType::Saddle: return "saddle";
    case CriticalType::Degenerate: return "degenerate";
  }
  return "?";
}

CriticalType classify_critical(const UnitaryMatrix& u,
                               const QualityFunction& qf, double grad_tol) {
  if (qf.kind != QfKind::U1)
    throw std::invalid_argument(
        "classify_critical: Hessian classification covers the U1 family");
  const GradientDirection dir = gradient_direction(qf, u);
  if (dir.norm() > grad_tol)
    throw std::invalid_argument("classify_critical: point is not critical");
  const lie::SubalgebraBasis basis =
      qf.restriction ? *qf.restriction : lie::full_su_basis(qf.dim());
  RealMatrix s = hessian_local(u, qf.A, qf.C, basis);
  s = 0.5 * (s + s.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(s);
  const RealVector& ev = es.eigenvalues();
  const double tol = 1e-7 * std::max(s.norm(), 1e-300);
  int pos = 0, neg = 0;
  for (Eigen::Index j = 0; j < ev.size(); ++j) {
    if (ev(j) > tol) ++pos;
    if (ev(j) < -tol) ++neg;
  }
  if (pos > 0 && neg > 0) return CriticalType::Saddle;
  if (neg > 0) return CriticalType::Maximum;
  if (pos > 0) return CriticalType::Minimum;
  return CriticalType::Degenerate;
}

} // namespace uflow::flows
