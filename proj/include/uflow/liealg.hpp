#pragma once

// Lie subalgebras of u(N) and their orthogonal projectors: Pauli building
// blocks, the local subalgebra su_loc(2^n), general tensor partitions,
// stabilizer subalgebras of a fixed matrix, and numerical Lie closure.

#include "uflow/matcore.hpp"

#include <string>
#include <vector>

namespace uflow::lie {

/// Real-orthonormal set of skew-Hermitian matrices spanning a subalgebra
/// of u(N): Re tr(h_i^dag h_j) = delta_ij and span closed under [.,.].
struct SubalgebraBasis {
  Eigen::Index dim_n = 0;                 // ambient matrix dimension N
  std::vector<AlgebraElement> elements;
  std::string label;
  // Populated for tensor-product subalgebras: the factor dimensions, so
  // subgroup elements can be sampled factor by factor.
  std::vector<Eigen::Index> partition_dims;

  Eigen::Index size() const {
    return static_cast<Eigen::Index>(elements.size());
  }
};

/// Orthogonal projector P g = sum_j Re tr(h_j^dag g) h_j onto the span of
/// an orthonormal basis. P^2 = P and P is self-adjoint w.r.t. Re tr(a^dag b).
struct Projector {
  SubalgebraBasis basis;

  AlgebraElement operator()(const ComplexMatrix& g) const;
};

AlgebraElement project(const SubalgebraBasis& basis, const ComplexMatrix& g);

/// Coefficients Re tr(h_j^dag g) of the projection in the basis.
RealVector project_coefficients(const SubalgebraBasis& basis,
                                const ComplexMatrix& g);

enum class PauliAxis { X, Y, Z };

/// Skew-Hermitian Pauli matrices
///   sigma_x = [[0,i],[i,0]], sigma_y = [[0,-1],[1,0]], sigma_z = [[i,0],[0,-i]];
/// together they form an orthogonal basis of su(2) with tr(s_a^dag s_b)=2 d_ab.
AlgebraElement pauli_skew(PauliAxis axis);

/// 1 (x) ... (x) g (x) ... (x) 1 with g placed at slot k (1-based,
/// slot 1 = leftmost Kronecker factor) of an n-fold 2x2 product.
AlgebraElement embed_single_site(int k, int n, const ComplexMatrix& g);

/// Orthonormal basis {X_k, Y_k, Z_k}/sqrt(2^n) of su_loc(2^n), 3n elements.
SubalgebraBasis local_subalgebra_basis(int n);

/// Orthonormal basis of su(N_1) (+) ... (+) su(N_r) embedded in u(N_1...N_r),
/// sum_j (N_j^2 - 1) elements.
SubalgebraBasis partition_subalgebra_basis(const std::vector<Eigen::Index>& dims);

/// Orthonormal basis of full su(N), N^2-1 elements.
SubalgebraBasis full_su_basis(Eigen::Index n);

/// Orthonormal basis of full u(N), N^2 elements.
SubalgebraBasis full_u_basis(Eigen::Index n);

/// Orthonormal basis of {k in u(N) | [k,E] = 0}, obtained as the kernel of
/// the real-linear system (1 (x) E - E^T (x) 1) vec(k) = 0 restricted to the
/// skew-Hermitian subspace. Always contains i*1.
SubalgebraBasis stabilizer_subalgebra(const ComplexMatrix& e);

struct LieClosureResult {
  SubalgebraBasis basis;
  Eigen::Index dimension = 0;
  bool controllable = false; // dim == N^2-1 (traceless gens) or N^2
};

/// Smallest commutator-closed real span containing the generators.
/// Breadth-first sweeps over generator x basis pairs; stops when a full
/// sweep adds no dimension.
LieClosureResult lie_closure(const std::vector<AlgebraElement>& generators);

/// Generic random element of the subgroup generated by the basis: Haar
/// factors for tensor-product subalgebras (det-normalised, since restricted
/// flows cannot change per-factor phases), otherwise a product of
/// exponentials of random algebra elements.
UnitaryMatrix random_subgroup_element(const SubalgebraBasis& basis,
                                      std::mt19937_64& rng);

} // namespace uflow::lie
