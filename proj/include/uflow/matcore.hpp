#pragma once

// Dense complex linear-algebra kernel shared by every other component:
// Hermitian/skew splits, commutators, the exponential map of skew-Hermitian
// matrices, Hilbert-Schmidt geometry, Kronecker/vec machinery and
// Haar-random unitaries.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace uflow {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Domain aliases. Invariants (unitarity, skewness, normalisation) are
// checked by the helpers below rather than enforced at construction;
// the flow drivers re-check them on every accepted iterate.
using UnitaryMatrix = ComplexMatrix;   // ||U U^dag - 1||_F <= 1e-10 * N
using AlgebraElement = ComplexMatrix;  // Omega^dag = -Omega
using PureStateVector = ComplexVector; // ||x||_2 = 1

inline void require_square(const ComplexMatrix& m, const char* who) {
  if (m.rows() != m.cols())
    throw std::invalid_argument(std::string(who) + ": matrix must be square");
}

inline void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b,
                               const char* who) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

/// Skew-Hermitian part (M - M^dag)/2.
AlgebraElement skew_part(const ComplexMatrix& m);

/// Hermitian part (M + M^dag)/2; skew_part + herm_part reconstructs M.
ComplexMatrix herm_part(const ComplexMatrix& m);

/// Commutator [A,B] = AB - BA.
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

/// Hilbert-Schmidt inner product tr(A^dag B).
Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);

/// Real part of the Hilbert-Schmidt inner product; the real scalar
/// product under which subalgebra bases are orthonormal.
double hs_inner_re(const ComplexMatrix& a, const ComplexMatrix& b);

/// Frobenius norm sqrt(Re tr(A^dag A)).
double fro_norm(const ComplexMatrix& a);

/// ||Omega + Omega^dag||_F, zero for exact skew-Hermitian input.
double skewness_defect(const ComplexMatrix& omega);

/// ||U U^dag - 1||_F.
double unitarity_defect(const ComplexMatrix& u);

/// Exponential of a skew-Hermitian matrix, computed from the spectral
/// decomposition of the Hermitian matrix -i*Omega so the result is unitary
/// by construction. Falls back to scaling-and-squaring if the eigensolver
/// fails. Throws if the input is not skew-Hermitian within tolerance.
UnitaryMatrix expm_skew(const AlgebraElement& omega);

/// Kronecker product A (x) B.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Column-stacking vec, so that vec(V Y W^T) = (W (x) V) vec(Y).
ComplexVector vec(const ComplexMatrix& m);

/// Inverse of vec.
ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows,
                    Eigen::Index cols);

/// Haar-distributed random unitary (Ginibre + QR with phase-fixed R).
UnitaryMatrix haar_random_unitary(Eigen::Index n, std::mt19937_64& rng);
UnitaryMatrix haar_random_unitary(Eigen::Index n, std::uint64_t seed);

/// Random matrix with i.i.d. standard complex normal entries.
ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols,
                      std::mt19937_64& rng);

/// Deterministic per-index stream seed for restart/sweep fan-out.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

} // namespace uflow
