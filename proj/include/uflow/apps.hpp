#pragma once

// Application drivers: geometric entanglement distance of pure states, the
// bipartite closed form, best rank-1 tensor approximation through the
// subgroup flow, joint and pointwise local reversibility, and the spin
// Hamiltonian / named-state builders.

#include "uflow/flows.hpp"
#include "uflow/tensor.hpp"

#include <optional>
#include <string>
#include <vector>

namespace uflow::apps {

// ---------------------------------------------------------------- states

enum class NamedState { W, Vbar, GHZ3, GHZp4, Xplus };

NamedState state_from_name(const std::string& name);

/// Normalised state vectors with the conventional amplitudes; qubit 1 is
/// the leftmost Kronecker factor (|001> sits at basis index 1).
PureStateVector build_state(NamedState which);

// ----------------------------------------------------------- Hamiltonians

enum class CouplingType { ZZ, XX, YY, XXX };

CouplingType coupling_from_name(const std::string& name);

struct CouplingTerm {
  CouplingType type = CouplingType::ZZ;
  int k = 1; // 1-based sites
  int l = 2;
  double weight = 1.0;
};

struct LocalField {
  int site = 1;
  char axis = 'z';
  double weight = 1.0;
};

struct HamiltonianSpec {
  int n = 2;
  std::vector<CouplingTerm> terms;
  std::vector<LocalField> fields;
};

/// Hermitian matrix built from standard (Hermitian) Pauli words; the skew
/// convention enters only inside flow gradients.
ComplexMatrix build_hamiltonian(const HamiltonianSpec& spec);

/// Convenience builders for the cyclic-topology examples.
HamiltonianSpec zz_cycle(int n);
HamiltonianSpec xxx_pair();

// ------------------------------------------------------------ best rank 1

struct Rank1Options {
  int restarts = 20;
  std::uint64_t seed = 0;
  int jobs = 1;
  double grad_tol = 0.0;
  int max_iter = 100000;
  // The restricted transfer flow comes with a provably convergent step
  // size; value-based line search stalls at the floating-point floor of
  // f-comparisons well before grad_tol.
  flows::StepSizeRule rule = flows::StepSizeRule::analytic_local();
};

/// Best rank-1 approximation of X via the partition-restricted transfer
/// flow with A = y y^dag (y = e1 (x) ... (x) e1) and C = x x^dag; factors
/// are peeled from the transported product vector U y.
Rank1Result best_rank1(const Tensor& x, const Rank1Options& opts = {});

// ------------------------------------------------------- entanglement sweep

enum class SweepFamily { ThreeQubit, FourQubit };

SweepFamily family_from_name(const std::string& name);

/// |X(s)> = sqrt(s)|W> + sqrt(1-s)|Vbar>  (3 qubits), or
/// |X(s)> = sqrt(s)|GHZ'> - sqrt(1-s)|X+>(x)|X+>  (4 qubits).
PureStateVector family_state(SweepFamily family, double s);

struct SweepRow {
  double s = 0.0;
  double overlap = 0.0;        // best |<X, product>|^2
  double delta = 0.0;          // 1 - overlap
  double measure_value = 0.0;  // operator distance 2 - 2*overlap
  int restarts_used = 0;
  bool converged = false;
};

std::vector<SweepRow> entanglement_sweep(SweepFamily family,
                                         const std::vector<double>& s_grid,
                                         const Rank1Options& opts = {});

// --------------------------------------------------------- bipartite bound

struct BipartiteResult {
  double value = 0.0;   // (tr Sigma_X^dag Sigma_Y)^2
  UnitaryMatrix u_star; // (W_X^* (x) V_X)(W_Y^T (x) V_Y^dag)
};

/// Closed-form maximum of the local transfer between vec(X) and vec(Y)
/// over SU(N2) (x) SU(N1), with the attaining product unitary.
BipartiteResult bipartite_optimal(const ComplexMatrix& xmat,
                                  const ComplexMatrix& ymat);

// ----------------------------------------------------------- reversibility

struct ReversibilityOptions {
  int restarts = 20;
  std::uint64_t seed = 0;
  int jobs = 1;
  double grad_tol = 0.0;
  int max_iter = 100000;
  double tol = 1e-6; // distance from -1 that still counts as reversed
};

struct JointReversibility {
  double min_value = 0.0; // min over restarts of Re tr(H KHK^dag)/||H||^2
  UnitaryMatrix K;
  bool reversible = false;
  bool converged = false;
};

/// Local time-reversal test K H K^dag = -H: descend the normalised transfer
/// on SU_loc(2^n); reversible iff the minimum reaches -1.
JointReversibility joint_reversibility(const HamiltonianSpec& spec,
                                       const ReversibilityOptions& opts = {});

struct PointwiseReversibility {
  double min_value = 0.0; // min of -(1/2^n) Re tr(C^dag K1 A K2)
  UnitaryMatrix K1;
  UnitaryMatrix K2;
  bool reversible_at_tau = false;
  bool converged = false;
};

/// Fixed-time reversal K1 e^{-i tau H} K2 = e^{+i tau H} via the coupled
/// subgroup flow; reversible at tau iff the minimum reaches -1.
PointwiseReversibility pointwise_reversibility(
    const HamiltonianSpec& spec, double tau,
    const ReversibilityOptions& opts = {});

} // namespace uflow::apps
