#pragma once

// Independent reference implementations used by the test suites: the
// higher-order power method, the sorted-spectrum bound, finite-difference
// directional derivatives, and grid brute force for 2x2x2 tensors. These
// deliberately share no code path with the flow drivers they check; the
// matrix exponentials here use Pade scaling-and-squaring rather than the
// spectral route of the main library.

#include "uflow/tensor.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>

namespace uflow::oracles {

enum class HopmInit { ModeSvd, Random };

struct HopmOptions {
  int max_sweeps = 200;
  HopmInit init = HopmInit::ModeSvd;
  std::uint64_t seed = 0;
  double tol = 1e-13; // stop when the overlap gain per sweep drops below
};

/// Alternating power iteration for the best rank-1 approximation; the
/// overlap is nondecreasing in every factor update.
Rank1Result hopm(const Tensor& x, const HopmOptions& opts = {});

/// sum_i lambda_i(A) lambda_i(C), both spectra sorted descending; the
/// attainable maximum of Re tr(C^dag U A U^dag) for Hermitian A, C.
double sorted_spectrum_bound(const ComplexMatrix& a, const ComplexMatrix& c);

/// Central difference (f(e^{h Om} U) - f(e^{-h Om} U)) / (2h).
double fd_directional(const std::function<double(const ComplexMatrix&)>& f,
                      const ComplexMatrix& u, const ComplexMatrix& omega,
                      double h);

/// Second central difference of t -> f(e^{t Om} U) at t = 0.
double fd_second(const std::function<double(const ComplexMatrix&)>& f,
                 const ComplexMatrix& u, const ComplexMatrix& omega, double h);

/// Exhaustive scan for 2x2x2 tensors: the first two unit factors are
/// gridded over (theta, phi) with phase-fixed first components, the third
/// is contracted in closed form, so the result is within O(grid^-2) of the
/// optimum. grid_per_angle >= 24 required.
Rank1Result brute_force_rank1(const Tensor& x, int grid_per_angle);

} // namespace uflow::oracles
