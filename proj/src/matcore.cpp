#include "uflow/matcore.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace uflow {

AlgebraElement skew_part(const ComplexMatrix& m) {
  require_square(m, "skew_part");
  return 0.5 * (m - m.adjoint());
}

ComplexMatrix herm_part(const ComplexMatrix& m) {
  require_square(m, "herm_part");
  return 0.5 * (m + m.adjoint());
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_square(a, "commutator");
  require_same_shape(a, b, "commutator");
  return a * b - b * a;
}

Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "hs_inner");
  return (a.conjugate().cwiseProduct(b)).sum();
}

double hs_inner_re(const ComplexMatrix& a, const ComplexMatrix& b) {
  return std::real(hs_inner(a, b));
}

double fro_norm(const ComplexMatrix& a) { return a.norm(); }

double skewness_defect(const ComplexMatrix& omega) {
  return (omega + omega.adjoint()).norm();
}

double unitarity_defect(const ComplexMatrix& u) {
  return (u * u.adjoint() -
          ComplexMatrix::Identity(u.rows(), u.cols())).norm();
}

UnitaryMatrix expm_skew(const AlgebraElement& omega) {
  require_square(omega, "expm_skew");
  const double scale = omega.norm();
  if (skewness_defect(omega) > 1e-12 * scale + 1e-14)
    throw std::runtime_error("expm_skew: input is not skew-Hermitian");

  // -i*Omega is Hermitian; exp(Omega) = V diag(e^{i lambda}) V^dag.
  const ComplexMatrix h = Complex(0, -1) * omega;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  if (es.info() == Eigen::Success) {
    const RealVector& lam = es.eigenvalues();
    ComplexVector phases(lam.size());
    for (Eigen::Index j = 0; j < lam.size(); ++j)
      phases(j) = std::polar(1.0, lam(j));
    return es.eigenvectors() * phases.asDiagonal() *
           es.eigenvectors().adjoint();
  }
  // Scaling-and-squaring fallback.
  return omega.exp();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexVector vec(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows,
                    Eigen::Index cols) {
  if (v.size() != rows * cols)
    throw std::invalid_argument("unvec: length does not match rows*cols");
  return Eigen::Map<const ComplexMatrix>(v.data(), rows, cols);
}

ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols,
                      std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i)
      g(i, j) = Complex(gauss(rng), gauss(rng));
  return g;
}

UnitaryMatrix haar_random_unitary(Eigen::Index n, std::mt19937_64& rng) {
  if (n < 1)
    throw std::invalid_argument("haar_random_unitary: N must be positive");
  const ComplexMatrix g = ginibre(n, n, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phase freedom Q -> Q D so the distribution is Haar.
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double ad = std::abs(d);
    q.col(j) *= (ad > 0.0) ? d / ad : Complex(1, 0);
  }
  return q;
}

UnitaryMatrix haar_random_unitary(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return haar_random_unitary(n, rng);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 finaliser over base^ (index+1)*golden-gamma
  std::uint64_t z = base ^ ((index + 1) * 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace uflow
