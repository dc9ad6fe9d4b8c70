#include "oracles.hpp"

#include "test_support.hpp"
#include "uflow/matcore.hpp"
#include "uflow/tensor.hpp"

#include <doctest.h>

#include <cmath>

using namespace uflow;
using namespace uflow::oracles;
using testsup::random_matrix;
using testsup::random_skew;
using testsup::random_vector;

namespace {

Tensor w_tensor() {
  Tensor t = make_tensor({2, 2, 2});
  const double a = 1.0 / std::sqrt(3.0);
  t.at({0, 0, 1}) = a;
  t.at({0, 1, 0}) = a;
  t.at({1, 0, 0}) = a;
  return t;
}

Tensor ghz3_tensor() {
  Tensor t = make_tensor({2, 2, 2});
  const double a = 1.0 / std::sqrt(2.0);
  t.at({0, 0, 0}) = a;
  t.at({1, 1, 1}) = a;
  return t;
}

Tensor random_rank1(std::uint64_t seed) {
  std::vector<ComplexVector> fs;
  for (int k = 0; k < 3; ++k) {
    ComplexVector v = random_vector(2, seed + 10 * k);
    fs.push_back(v / v.norm());
  }
  Tensor t = rank1_tensor(fs);
  t.data *= Complex(1.3, -0.4);
  return t;
}

} // namespace

TEST_CASE("hopm recovers an exact rank-1 tensor") {
  const Tensor t = random_rank1(3);
  const Rank1Result r = hopm(t);
  CHECK(r.residual_sq <= 1e-12 * t.data.squaredNorm());
  CHECK(r.overlap == doctest::Approx(t.data.squaredNorm()).epsilon(1e-10));
  for (const auto& f : r.factors) CHECK(std::abs(f.norm() - 1.0) <= 1e-10);
}

TEST_CASE("hopm on the W tensor: good inits reach 4/9, the unfolding "
          "init sits in the 1/3 trap") {
  const Tensor w = w_tensor();

  HopmOptions svd_init;
  svd_init.init = HopmInit::ModeSvd;
  const Rank1Result trapped = hopm(w, svd_init);
  CHECK(trapped.overlap == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(trapped.residual_sq == doctest::Approx(2.0 / 3.0).epsilon(1e-9));

  double best = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    HopmOptions o;
    o.init = HopmInit::Random;
    o.seed = seed;
    o.max_sweeps = 400;
    best = std::max(best, hopm(w, o).overlap);
  }
  CHECK(best == doctest::Approx(4.0 / 9.0).epsilon(1e-6));
}

TEST_CASE("hopm overlap is nondecreasing sweep by sweep") {
  std::mt19937_64 rng(17);
  Tensor t = make_tensor({2, 2, 2});
  t.data = ginibre(8, 1, rng).col(0);
  double prev = -1.0;
  for (int sweeps = 1; sweeps <= 6; ++sweeps) {
    HopmOptions o;
    o.init = HopmInit::Random;
    o.seed = 5;
    o.max_sweeps = sweeps;
    o.tol = 0.0;
    const double ov = hopm(t, o).overlap;
    CHECK(ov >= prev - 1e-12);
    prev = ov;
  }
}

TEST_CASE("hopm rejects a zero tensor") {
  CHECK_THROWS_AS(hopm(make_tensor({2, 2})), std::invalid_argument);
}

TEST_CASE("sorted_spectrum_bound: direct sums and Monte Carlo domination") {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a.diagonal() << 1, 2;
  CHECK(sorted_spectrum_bound(a, a) == doctest::Approx(5.0));

  ComplexMatrix b = ComplexMatrix::Zero(2, 2);
  b.diagonal() << 2, 1;
  ComplexMatrix c = ComplexMatrix::Zero(2, 2);
  c.diagonal() << 3, 1;
  CHECK(sorted_spectrum_bound(b, c) == doctest::Approx(7.0));

  CHECK_THROWS_AS(sorted_spectrum_bound(random_matrix(3, 2), random_matrix(3, 3)),
                  std::invalid_argument);

  const ComplexMatrix ha = herm_part(random_matrix(4, 5));
  const ComplexMatrix hc = herm_part(random_matrix(4, 6));
  const double bound = sorted_spectrum_bound(ha, hc);
  std::mt19937_64 rng(7);
  for (int k = 0; k < 1000; ++k) {
    const UnitaryMatrix u = haar_random_unitary(4, rng);
    const double f = hs_inner_re(hc, u * ha * u.adjoint());
    CHECK(f <= bound + 1e-10);
  }
}

TEST_CASE("fd_directional: constants, known slope, Richardson order") {
  const UnitaryMatrix u = haar_random_unitary(4, std::uint64_t(8));
  const AlgebraElement om = random_skew(4, 9);

  CHECK(std::abs(fd_directional([](const ComplexMatrix&) { return 3.5; }, u, om,
                                1e-5)) <= 1e-12);

  // d/dt Re tr(C^dag e^{t Om} U) at t=0 equals Re tr(C^dag Om U).
  const ComplexMatrix c = random_matrix(4, 10);
  auto f = [&](const ComplexMatrix& v) { return hs_inner_re(c, v); };
  const double exact = hs_inner_re(c, om * u);
  const double fd = fd_directional(f, u, om, 1e-4);
  CHECK(std::abs(fd - exact) <= 1e-7 * std::max(1.0, std::abs(exact)));

  // Quadratic objective: the error halves its log twice per halved h.
  const ComplexMatrix a = herm_part(random_matrix(4, 11));
  auto f2 = [&](const ComplexMatrix& v) {
    return std::norm(hs_inner(c, v * a * v.adjoint()));
  };
  auto deriv_err = [&](double h) {
    const double coarse = fd_directional(f2, u, om, h);
    const double fine = fd_directional(f2, u, om, h / 8.0); // near-exact
    return std::abs(coarse - fine);
  };
  const double e1 = deriv_err(2e-2);
  const double e2 = deriv_err(1e-2);
  const double slope = std::log2(e1 / e2);
  CHECK(slope == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("brute_force_rank1: rank-1 input, W value, GHZ value") {
  const Tensor t = random_rank1(21);
  const Rank1Result r = brute_force_rank1(t, 48);
  CHECK(r.overlap == doctest::Approx(t.data.squaredNorm()).epsilon(5e-3));

  const Rank1Result w = brute_force_rank1(w_tensor(), 96);
  CHECK(std::abs(w.overlap - 4.0 / 9.0) <= 1e-3);

  const Rank1Result g = brute_force_rank1(ghz3_tensor(), 96);
  CHECK(std::abs(g.overlap - 0.5) <= 1e-3);

  CHECK_THROWS_AS(brute_force_rank1(make_tensor({2, 2}), 48),
                  std::invalid_argument);
  CHECK_THROWS_AS(brute_force_rank1(w_tensor(), 12), std::invalid_argument);
}
