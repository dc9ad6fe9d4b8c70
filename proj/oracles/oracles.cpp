#include "oracles.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace uflow::oracles {

namespace {

// Contraction of X against the conjugated factors on every mode except j:
//   w(i_j) = sum over other indices of conj(prod_{k!=j} x^k_{i_k}) X(...).
ComplexVector contract_except(const Tensor& x,
                              const std::vector<ComplexVector>& factors,
                              std::size_t j) {
  const auto r = x.dims.size();
  ComplexVector w = ComplexVector::Zero(x.dims[j]);
  std::vector<Eigen::Index> idx(r, 0);
  for (Eigen::Index flat = 0; flat < x.size(); ++flat) {
    Complex coeff(1, 0);
    for (std::size_t k = 0; k < r; ++k)
      if (k != j) coeff *= std::conj(factors[k](idx[k]));
    w(idx[j]) += coeff * x.data(flat);
    for (std::size_t k = r; k-- > 0;) {
      if (++idx[k] < x.dims[k]) break;
      idx[k] = 0;
    }
  }
  return w;
}

// Mode-k unfolding: rows indexed by i_k, columns by the remaining indices.
ComplexMatrix unfold(const Tensor& x, std::size_t mode) {
  const Eigen::Index nk = x.dims[mode];
  const Eigen::Index rest = x.size() / nk;
  ComplexMatrix m(nk, rest);
  std::vector<Eigen::Index> idx(x.dims.size(), 0);
  std::vector<Eigen::Index> col_count(x.dims.size(), 0);
  for (Eigen::Index flat = 0; flat < x.size(); ++flat) {
    Eigen::Index col = 0;
    for (std::size_t k = 0; k < x.dims.size(); ++k)
      if (k != mode) col = col * x.dims[k] + idx[k];
    m(idx[mode], col) = x.data(flat);
    for (std::size_t k = x.dims.size(); k-- > 0;) {
      if (++idx[k] < x.dims[k]) break;
      idx[k] = 0;
    }
  }
  return m;
}

Rank1Result finish(const Tensor& x, std::vector<ComplexVector> factors,
                   bool converged, int sweeps) {
  Rank1Result r;
  r.factors = std::move(factors);
  r.coefficient = tensor_inner(rank1_tensor(r.factors), x);
  r.overlap = std::norm(r.coefficient);
  r.residual_sq = x.data.squaredNorm() - r.overlap;
  r.converged = converged;
  r.iterations = sweeps;
  return r;
}

} // namespace

Rank1Result hopm(const Tensor& x, const HopmOptions& opts) {
  const auto r = x.dims.size();
  if (r < 2) throw std::invalid_argument("hopm: tensor order must be >= 2");
  for (Eigen::Index d : x.dims)
    if (d < 2) throw std::invalid_argument("hopm: mode dims must be >= 2");
  if (x.norm() == 0.0) throw std::invalid_argument("hopm: zero tensor");

  std::vector<ComplexVector> factors(r);
  if (opts.init == HopmInit::ModeSvd) {
    for (std::size_t k = 0; k < r; ++k) {
      Eigen::JacobiSVD<ComplexMatrix> svd(unfold(x, k), Eigen::ComputeThinU);
      factors[k] = svd.matrixU().col(0);
    }
  } else {
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t k = 0; k < r; ++k) {
      ComplexVector v(x.dims[k]);
      for (Eigen::Index i = 0; i < v.size(); ++i)
        v(i) = Complex(gauss(rng), gauss(rng));
      factors[k] = v / v.norm();
    }
  }

  double overlap = std::norm(tensor_inner(rank1_tensor(factors), x));
  int sweep = 0;
  bool converged = false;
  for (; sweep < opts.max_sweeps; ++sweep) {
    for (std::size_t j = 0; j < r; ++j) {
      const ComplexVector w = contract_except(x, factors, j);
      const double wn = w.norm();
      if (wn > 0.0) factors[j] = w / wn;
    }
    const double next = std::norm(tensor_inner(rank1_tensor(factors), x));
    if (next - overlap <= opts.tol * std::max(1.0, next)) {
      overlap = next;
      converged = true;
      ++sweep;
      break;
    }
    overlap = next;
  }
  return finish(x, std::move(factors), converged, sweep);
}

double sorted_spectrum_bound(const ComplexMatrix& a, const ComplexMatrix& c) {
  if (a.rows() != a.cols() || c.rows() != c.cols() || a.rows() != c.rows())
    throw std::invalid_argument("sorted_spectrum_bound: dimension mismatch");
  const double herm_tol = 1e-10;
  if ((a - a.adjoint()).norm() > herm_tol * std::max(1.0, a.norm()) ||
      (c - c.adjoint()).norm() > herm_tol * std::max(1.0, c.norm()))
    throw std::invalid_argument("sorted_spectrum_bound: inputs must be Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> ea(a, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> ec(c, Eigen::EigenvaluesOnly);
  // Both spectra come out ascending, which pairs them exactly like the
  // descending-descending arrangement.
  return ea.eigenvalues().dot(ec.eigenvalues());
}

double fd_directional(const std::function<double(const ComplexMatrix&)>& f,
                      const ComplexMatrix& u, const ComplexMatrix& omega,
                      double h) {
  if (h <= 0.0) throw std::invalid_argument("fd_directional: h must be > 0");
  const ComplexMatrix ep = (h * omega).exp();
  const ComplexMatrix em = (-h * omega).exp();
  return (f(ep * u) - f(em * u)) / (2.0 * h);
}

double fd_second(const std::function<double(const ComplexMatrix&)>& f,
                 const ComplexMatrix& u, const ComplexMatrix& omega, double h) {
  if (h <= 0.0) throw std::invalid_argument("fd_second: h must be > 0");
  const ComplexMatrix ep = (h * omega).exp();
  const ComplexMatrix em = (-h * omega).exp();
  return (f(ep * u) - 2.0 * f(u) + f(em * u)) / (h * h);
}

Rank1Result brute_force_rank1(const Tensor& x, int grid_per_angle) {
  if (x.dims != std::vector<Eigen::Index>{2, 2, 2})
    throw std::invalid_argument("brute_force_rank1: dims must be [2,2,2]");
  if (grid_per_angle < 24)
    throw std::invalid_argument("brute_force_rank1: need >= 24 points per angle");

  const int nt = grid_per_angle; // theta in [0, pi/2], endpoints included
  const int np = grid_per_angle; // phi in [0, 2*pi)
  const double pi = std::numbers::pi;

  std::vector<ComplexVector> grid;
  grid.reserve(static_cast<std::size_t>(nt) * np);
  for (int it = 0; it < nt; ++it) {
    const double theta = (pi / 2.0) * double(it) / double(nt - 1);
    for (int ip = 0; ip < np; ++ip) {
      const double phi = 2.0 * pi * double(ip) / double(np);
      ComplexVector v(2);
      v << Complex(std::cos(theta), 0.0), std::polar(std::sin(theta), phi);
      grid.push_back(std::move(v));
    }
  }

  double best = -1.0;
  ComplexVector best_a, best_b, best_c;
  ComplexMatrix t_a(2, 2); // T_a(j,k) = sum_i conj(a_i) X(i,j,k)
  for (const auto& a : grid) {
    for (Eigen::Index j = 0; j < 2; ++j)
      for (Eigen::Index k = 0; k < 2; ++k)
        t_a(j, k) = std::conj(a(0)) * x.data(0 * 4 + j * 2 + k) +
                    std::conj(a(1)) * x.data(1 * 4 + j * 2 + k);
    for (const auto& b : grid) {
      // optimal third factor in closed form: w(k) = sum_j conj(b_j) T_a(j,k)
      const Complex w0 = std::conj(b(0)) * t_a(0, 0) + std::conj(b(1)) * t_a(1, 0);
      const Complex w1 = std::conj(b(0)) * t_a(0, 1) + std::conj(b(1)) * t_a(1, 1);
      const double overlap = std::norm(w0) + std::norm(w1);
      if (overlap > best) {
        best = overlap;
        best_a = a;
        best_b = b;
        const double wn = std::sqrt(overlap);
        ComplexVector c(2);
        c << w0 / wn, w1 / wn;
        best_c = c;
      }
    }
  }
  return finish(x, {best_a, best_b, best_c}, true, nt * np);
}

} // namespace uflow::oracles
