#include "uflow/orbits.hpp"

#include "oracles.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace uflow;
using namespace uflow::orbits;
using testsup::random_matrix;
using testsup::random_vector;

namespace {

ComplexMatrix diag3(double a, double b, double c) {
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  m.diagonal() << a, b, c;
  return m;
}

// Reduced single-qubit density matrices of a two-qubit operator.
ComplexMatrix ptrace_second(const ComplexMatrix& x) {
  ComplexMatrix r = ComplexMatrix::Zero(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) r(i, j) += x(2 * i + k, 2 * j + k);
  return r;
}

ComplexMatrix ptrace_first(const ComplexMatrix& x) {
  ComplexMatrix r = ComplexMatrix::Zero(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) r(i, j) += x(2 * k + i, 2 * k + j);
  return r;
}

double purity(const ComplexMatrix& rho) {
  return std::real((rho * rho).trace());
}

} // namespace

TEST_CASE("db_step: equilibria stay put") {
  // Commuting diagonal data: [X, C^dag]_S = 0, the orbit point is critical.
  OrbitPoint x = make_orbit_point(diag3(1, 2, 3));
  const ComplexMatrix c = diag3(2, 1, 0);
  const OrbitPoint next = db_step(x, c, 0.3);
  CHECK((next.X - x.X).norm() <= 1e-14);

  CHECK_THROWS_AS(db_step(x, c, -0.1), std::invalid_argument);
}

TEST_CASE("db_step preserves the spectrum over a thousand iterations") {
  const ComplexMatrix a = herm_part(random_matrix(4, 7));
  const ComplexMatrix c = herm_part(random_matrix(4, 8));
  OrbitPoint x = make_orbit_point(a);
  for (int k = 0; k < 1000; ++k) x = db_step(x, c, 0.05);
  CHECK(spectrum_drift(x) <= 1e-8);
}

TEST_CASE("db_step flags a broken orbit invariant") {
  OrbitPoint corrupted = make_orbit_point(diag3(1, 2, 3));
  corrupted.reference_spectrum(0) += 1e-3; // stale reference
  CHECK_THROWS_AS(db_step(corrupted, herm_part(random_matrix(3, 9)), 0.1),
                  std::runtime_error);
}

TEST_CASE("db_step_restricted with the skew projector equals db_step") {
  const ComplexMatrix a = herm_part(random_matrix(4, 11));
  const ComplexMatrix c = herm_part(random_matrix(4, 12));
  const lie::SubalgebraBasis full_u = lie::full_u_basis(4);
  OrbitPoint x = make_orbit_point(a);
  const OrbitPoint plain = db_step(x, c, 0.07);
  const OrbitPoint restricted = db_step_restricted(x, c, 0.07, full_u);
  CHECK((plain.X - restricted.X).norm() <= 1e-11 * plain.X.norm());
}

TEST_CASE("locally restricted steps keep product states product") {
  ComplexVector a = random_vector(2, 21);
  ComplexVector b = random_vector(2, 22);
  a /= a.norm();
  b /= b.norm();
  const ComplexVector x = kron(a, b).col(0);
  OrbitPoint p = make_orbit_point(x * x.adjoint());

  ComplexMatrix c = ComplexMatrix::Zero(4, 4); // Z1 + 0.5 Z2, local diagonal
  c.diagonal() << 1.5, 0.5, -0.5, -1.5;
  const lie::SubalgebraBasis loc = lie::local_subalgebra_basis(2);
  for (int k = 0; k < 50; ++k) p = db_step_restricted(p, c, 0.1, loc);

  CHECK(purity(ptrace_first(p.X)) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(purity(ptrace_second(p.X)) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(spectrum_drift(p) <= 1e-8);
}

TEST_CASE("euler_db_step: zero step, second-order gap, eventual drift") {
  const ComplexMatrix a = herm_part(random_matrix(3, 31));
  const ComplexMatrix c = herm_part(random_matrix(3, 32));
  const OrbitPoint x = make_orbit_point(a);
  CHECK((euler_db_step(x.X, c, 0.0) - x.X).norm() == 0.0);

  // ||euler - conjugation|| = O(alpha^2): halving alpha gives slope ~ 2.
  auto gap = [&](double alpha) {
    return (euler_db_step(x.X, c, alpha) - db_step(x, c, alpha).X).norm();
  };
  const double slope = std::log2(gap(2e-2) / gap(1e-2));
  CHECK(slope == doctest::Approx(2.0).epsilon(0.05));

  // The Euler variant is deliberately not isospectral.
  ComplexMatrix y = x.X;
  for (int k = 0; k < 200; ++k) y = euler_db_step(y, c, 0.05);
  const ComplexVector drifted = sorted_spectrum(y);
  CHECK((drifted - x.reference_spectrum).cwiseAbs().maxCoeff() > 1e-10);
}

TEST_CASE("run_double_bracket converges to the sorted-spectrum optimum") {
  const ComplexMatrix a = herm_part(random_matrix(4, 41));
  const ComplexMatrix c = diag3(3, 2, 1); // placeholder, resized below
  ComplexMatrix c4 = ComplexMatrix::Zero(4, 4);
  c4.diagonal() << 4, 3, 2, 1;
  const double target = oracles::sorted_spectrum_bound(a, c4);

  OrbitRestartOptions ro;
  ro.restarts = 40;
  ro.seed = 5;
  int hits = 0;
  for (const auto& r : run_all_restarts(a, c4, ro)) {
    CHECK(r.f <= target + 1e-8);
    CHECK(r.monotone);
    CHECK(r.max_spectrum_drift <= 1e-8);
    if (std::abs(r.f - target) <= 1e-6) ++hits;
  }
  CHECK(hits >= 38); // >= 95% of Haar starts
}

TEST_CASE("run_double_bracket: sorted diagonal input is already critical") {
  ComplexMatrix a = ComplexMatrix::Zero(3, 3), c = ComplexMatrix::Zero(3, 3);
  a.diagonal() << 5, 3, 1;
  c.diagonal() << 3, 2, 1;
  const OrbitFlowResult r =
      run_double_bracket(a, c, flows::StepSizeRule::armijo());
  CHECK(r.converged);
  CHECK(r.iterations == 0);
}

TEST_CASE("orbit flow agrees with the group-level transfer flow") {
  const ComplexMatrix a = herm_part(random_matrix(3, 51));
  const ComplexMatrix c = herm_part(random_matrix(3, 52));
  const UnitaryMatrix u0 = haar_random_unitary(3, std::uint64_t(53));

  flows::QualityFunction qf;
  qf.kind = flows::QfKind::U1;
  qf.A = a;
  qf.C = c;
  const auto group = flows::run_flow(qf, flows::StepSizeRule::armijo(), u0);
  const auto orbit = run_double_bracket(a, c, flows::StepSizeRule::armijo(), {},
                                        std::nullopt, u0);
  CHECK(std::abs(group.f - orbit.f) <= 1e-6);
  const double f_of_ad =
      hs_inner_re(c, group.U * a * group.U.adjoint());
  CHECK(std::abs(f_of_ad - orbit.f) <= 1e-6);
}

TEST_CASE("U1P and U1 value trajectories coincide for matched seeds") {
  const ComplexMatrix a = herm_part(random_matrix(3, 61));
  const ComplexMatrix c = herm_part(random_matrix(3, 62));
  const UnitaryMatrix u0 = haar_random_unitary(3, std::uint64_t(63));

  flows::QualityFunction qf;
  qf.kind = flows::QfKind::U1;
  qf.A = a;
  qf.C = c;
  flows::FlowOptions fo;
  fo.record_trace = true;
  fo.max_iter = 60;
  const auto group = flows::run_flow(qf, flows::StepSizeRule::armijo(), u0,
                                     nullptr, fo);
  OrbitFlowOptions oo;
  oo.record_trace = true;
  oo.max_iter = 60;
  const auto orbit = run_double_bracket(a, c, flows::StepSizeRule::armijo(), oo,
                                        std::nullopt, u0);
  const std::size_t common = std::min(group.trace.size(), orbit.trace.size());
  REQUIRE(common > 10);
  for (std::size_t k = 0; k < common; ++k)
    CHECK(std::abs(group.trace[k].f - orbit.trace[k].f) <= 1e-8);
}

TEST_CASE("critical census: at most N! limits with permutation-sum values") {
  // Gaps >= 0.1 on both spectra; fixed safe step so runs reach grad 1e-10.
  ComplexMatrix a0 = diag3(2.8, 1.7, 0.6);
  ComplexMatrix c = diag3(3.0, 2.0, 1.0);
  std::mt19937_64 mix(77);
  const UnitaryMatrix w = haar_random_unitary(3, mix);
  const ComplexMatrix a = w * a0 * w.adjoint(); // generic dense Hermitian

  const double alpha = 1.0 / (8.0 * a.norm() * c.norm());
  OrbitRestartOptions ro;
  ro.restarts = 60;
  ro.seed = 99;
  ro.rule = flows::StepSizeRule::fixed(alpha);
  ro.flow.tol = 1e-10;
  ro.flow.max_iter = 60000;

  std::vector<ComplexMatrix> limits;
  std::vector<double> values;
  for (const auto& r : run_all_restarts(a, c, ro)) {
    CHECK(r.converged);
    bool known = false;
    for (const auto& l : limits)
      if ((l - r.X.X).norm() <= 1e-5) known = true;
    if (!known) {
      limits.push_back(r.X.X);
      values.push_back(r.f);
    }
  }
  CHECK(limits.size() <= 6);

  // The critical values are exactly the 6 permutation sums.
  std::vector<double> lam{2.8, 1.7, 0.6};
  std::vector<double> perm_sums;
  std::vector<int> idx{0, 1, 2};
  do {
    perm_sums.push_back(3.0 * lam[idx[0]] + 2.0 * lam[idx[1]] +
                        1.0 * lam[idx[2]]);
  } while (std::next_permutation(idx.begin(), idx.end()));
  for (double v : values) {
    double best = 1e9;
    for (double p : perm_sums) best = std::min(best, std::abs(v - p));
    CHECK(best <= 1e-6);
  }
}
