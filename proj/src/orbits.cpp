#include "uflow/orbits.hpp"

#include "uflow/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace uflow::orbits {

namespace {

constexpr double kDriftError = 1e-6;

// Spectrum check cadence: every iterate up to N=16, every 100th above.
bool check_now(Eigen::Index n, int k) { return n <= 16 || k % 100 == 0; }

OrbitPoint conjugate_step(const OrbitPoint& x, const AlgebraElement& omega,
                          double alpha, double* defect_out) {
  if (alpha < 0.0) throw std::invalid_argument("db_step: alpha must be >= 0");
  OrbitPoint out;
  out.reference_spectrum = x.reference_spectrum;
  if (alpha == 0.0 || omega.norm() == 0.0) {
    out.X = x.X;
    if (defect_out) *defect_out = 0.0;
    return out;
  }
  const UnitaryMatrix e = expm_skew(-alpha * omega);
  if (defect_out) *defect_out = unitarity_defect(e);
  out.X = e * x.X * e.adjoint();
  return out;
}

} // namespace

ComplexVector sorted_spectrum(const ComplexMatrix& m) {
  Eigen::ComplexEigenSolver<ComplexMatrix> es(m, false);
  ComplexVector ev = es.eigenvalues();
  std::vector<Complex> v(ev.data(), ev.data() + ev.size());
  std::sort(v.begin(), v.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return Eigen::Map<ComplexVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

OrbitPoint make_orbit_point(const ComplexMatrix& a) {
  require_square(a, "make_orbit_point");
  return {a, sorted_spectrum(a)};
}

double spectrum_drift(const OrbitPoint& p) {
  const ComplexVector s = sorted_spectrum(p.X);
  return (s - p.reference_spectrum).cwiseAbs().maxCoeff();
}

OrbitPoint db_step(const OrbitPoint& x, const ComplexMatrix& c, double alpha) {
  const AlgebraElement omega = skew_part(commutator(x.X, c.adjoint()));
  OrbitPoint out = conjugate_step(x, omega, alpha, nullptr);
  if (spectrum_drift(out) > kDriftError)
    throw std::runtime_error("db_step: spectrum drift beyond tolerance");
  return out;
}

OrbitPoint db_step_restricted(const OrbitPoint& x, const ComplexMatrix& c,
                              double alpha, const lie::SubalgebraBasis& p) {
  const AlgebraElement omega = lie::project(p, commutator(x.X, c.adjoint()));
  OrbitPoint out = conjugate_step(x, omega, alpha, nullptr);
  if (spectrum_drift(out) > kDriftError)
    throw std::runtime_error("db_step_restricted: spectrum drift beyond tolerance");
  return out;
}

ComplexMatrix euler_db_step(const ComplexMatrix& x, const ComplexMatrix& c,
                            double alpha) {
  if (alpha < 0.0)
    throw std::invalid_argument("euler_db_step: alpha must be >= 0");
  return x + alpha * commutator(x, skew_part(commutator(x, c.adjoint())));
}

OrbitFlowResult run_double_bracket(
    const ComplexMatrix& a, const ComplexMatrix& c,
    const flows::StepSizeRule& rule, const OrbitFlowOptions& opts,
    const std::optional<lie::SubalgebraBasis>& restriction,
    const std::optional<UnitaryMatrix>& init_w) {
  require_square(a, "run_double_bracket");
  require_same_shape(a, c, "run_double_bracket");
  if (rule.kind == flows::StepSizeRule::Kind::AnalyticLocal)
    throw std::invalid_argument(
        "run_double_bracket: analytic rule is a group-level U1K rule");

  const Eigen::Index n = a.rows();
  const double tol =
      opts.tol > 0.0 ? opts.tol : 1e-9 * a.norm() * c.norm();

  OrbitPoint p = make_orbit_point(a);
  if (init_w) p.X = (*init_w) * a * init_w->adjoint();

  auto direction = [&](const ComplexMatrix& x) {
    const ComplexMatrix w = commutator(x, c.adjoint());
    return restriction ? lie::project(*restriction, w) : skew_part(w);
  };
  auto fval = [&](const ComplexMatrix& x) { return hs_inner_re(c, x); };

  OrbitFlowResult res;
  double f = fval(p.X);
  double drift = spectrum_drift(p);
  res.max_spectrum_drift = drift;

  int k = 0;
  bool converged = false;
  double grad_norm = 0.0;

  while (k < opts.max_iter) {
    const AlgebraElement omega = direction(p.X);
    grad_norm = omega.norm();
    if (grad_norm <= tol) {
      converged = true;
      break;
    }

    double alpha = 0.0;
    double defect = 0.0;
    double f_next = f;
    OrbitPoint next;
    bool accepted = false;
    if (rule.kind == flows::StepSizeRule::Kind::Fixed) {
      alpha = rule.alpha;
      next = conjugate_step(p, omega, alpha, &defect);
      f_next = fval(next.X);
      accepted = true;
    } else {
      alpha = rule.alpha / grad_norm;
      const double slope = grad_norm * grad_norm;
      for (int h = 0; h <= rule.max_halvings; ++h) {
        next = conjugate_step(p, omega, alpha, &defect);
        f_next = fval(next.X);
        if (f_next >= f + 1e-4 * alpha * slope) {
          accepted = true;
          break;
        }
        alpha *= rule.shrink;
      }
    }
    if (!accepted) break;

    if (check_now(n, k)) {
      drift = spectrum_drift(next);
      res.max_spectrum_drift = std::max(res.max_spectrum_drift, drift);
      if (drift > opts.drift_budget)
        throw std::runtime_error("run_double_bracket: spectrum drift integrity error");
    }
    if (opts.record_trace)
      res.trace.push_back({k, f, grad_norm, alpha, defect, drift});
    if (f_next < f - 1e-12 * std::max(1.0, std::abs(f))) res.monotone = false;

    p = std::move(next);
    f = f_next;
    ++k;
  }

  drift = spectrum_drift(p);
  res.max_spectrum_drift = std::max(res.max_spectrum_drift, drift);
  if (opts.record_trace) res.trace.push_back({k, f, grad_norm, 0.0, 0.0, drift});

  res.X = std::move(p);
  res.f = f;
  res.converged = converged;
  res.iterations = k;
  res.final_grad_norm = grad_norm;
  return res;
}

std::vector<OrbitFlowResult> run_all_restarts(
    const ComplexMatrix& a, const ComplexMatrix& c,
    const OrbitRestartOptions& opts,
    const std::optional<lie::SubalgebraBasis>& restriction) {
  const int count = std::max(1, opts.restarts);
  std::vector<OrbitFlowResult> results(count);
  parallel_for_index(static_cast<std::size_t>(count), opts.jobs,
                     [&](std::size_t i) {
                       const std::uint64_t s =
                           derive_seed(opts.seed, static_cast<std::uint64_t>(i));
                       std::mt19937_64 rng(s);
                       const UnitaryMatrix w0 =
                           restriction
                               ? lie::random_subgroup_element(*restriction, rng)
                               : haar_random_unitary(a.rows(), rng);
                       results[i] = run_double_bracket(a, c, opts.rule, opts.flow,
                                                       restriction, w0);
                       results[i].restart_seed = s;
                     });
  return results;
}

OrbitFlowResult run_best_of(
    const ComplexMatrix& a, const ComplexMatrix& c,
    const OrbitRestartOptions& opts,
    const std::optional<lie::SubalgebraBasis>& restriction) {
  auto results = run_all_restarts(a, c, opts, restriction);
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].f > results[best].f) best = i;
  return results[best];
}

} // namespace uflow::orbits
