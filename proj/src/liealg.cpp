#include "uflow/liealg.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace uflow::lie {

namespace {

constexpr double kRankTol = 1e-10;

// Modified Gram-Schmidt with one re-orthogonalisation pass. Returns the
// residual component of g orthogonal to the current basis.
ComplexMatrix mgs_residual(const std::vector<AlgebraElement>& basis,
                           ComplexMatrix g) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& h : basis)
      g -= hs_inner_re(h, g) * h;
  return g;
}

// Orthonormal basis of su(n) at orthonormality scale 1: real and imaginary
// off-diagonal pairs plus traceless diagonal elements.
std::vector<AlgebraElement> su_basis_elements(Eigen::Index n) {
  std::vector<AlgebraElement> out;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index p = 0; p < n; ++p)
    for (Eigen::Index q = p + 1; q < n; ++q) {
      AlgebraElement re = AlgebraElement::Zero(n, n);
      re(p, q) = inv_sqrt2;
      re(q, p) = -inv_sqrt2;
      out.push_back(re);
      AlgebraElement im = AlgebraElement::Zero(n, n);
      im(p, q) = Complex(0, inv_sqrt2);
      im(q, p) = Complex(0, inv_sqrt2);
      out.push_back(im);
    }
  for (Eigen::Index l = 1; l < n; ++l) {
    AlgebraElement d = AlgebraElement::Zero(n, n);
    const double c = 1.0 / std::sqrt(double(l) * double(l + 1));
    for (Eigen::Index j = 0; j < l; ++j) d(j, j) = Complex(0, c);
    d(l, l) = Complex(0, -double(l) * c);
    out.push_back(d);
  }
  return out;
}

} // namespace

AlgebraElement Projector::operator()(const ComplexMatrix& g) const {
  return project(basis, g);
}

AlgebraElement project(const SubalgebraBasis& basis, const ComplexMatrix& g) {
  if (g.rows() != basis.dim_n || g.cols() != basis.dim_n)
    throw std::invalid_argument("project: dimension mismatch");
  AlgebraElement out = AlgebraElement::Zero(basis.dim_n, basis.dim_n);
  for (const auto& h : basis.elements) out += hs_inner_re(h, g) * h;
  return out;
}

RealVector project_coefficients(const SubalgebraBasis& basis,
                                const ComplexMatrix& g) {
  if (g.rows() != basis.dim_n || g.cols() != basis.dim_n)
    throw std::invalid_argument("project_coefficients: dimension mismatch");
  RealVector c(basis.size());
  for (Eigen::Index j = 0; j < basis.size(); ++j)
    c(j) = hs_inner_re(basis.elements[j], g);
  return c;
}

AlgebraElement pauli_skew(PauliAxis axis) {
  AlgebraElement s(2, 2);
  switch (axis) {
    case PauliAxis::X:
      s << Complex(0, 0), Complex(0, 1), Complex(0, 1), Complex(0, 0);
      return s;
    case PauliAxis::Y:
      s << Complex(0, 0), Complex(-1, 0), Complex(1, 0), Complex(0, 0);
      return s;
    case PauliAxis::Z:
      s << Complex(0, 1), Complex(0, 0), Complex(0, 0), Complex(0, -1);
      return s;
  }
  throw std::invalid_argument("pauli_skew: invalid axis");
}

AlgebraElement embed_single_site(int k, int n, const ComplexMatrix& g) {
  if (n < 1) throw std::invalid_argument("embed_single_site: n must be >= 1");
  if (k < 1 || k > n)
    throw std::invalid_argument("embed_single_site: site index out of range");
  require_square(g, "embed_single_site");
  if (g.rows() != 2)
    throw std::invalid_argument("embed_single_site: g must be 2x2");
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int j = 1; j <= n; ++j)
    out = kron(out, j == k ? g : ComplexMatrix::Identity(2, 2));
  return out;
}

SubalgebraBasis local_subalgebra_basis(int n) {
  if (n < 1)
    throw std::invalid_argument("local_subalgebra_basis: n must be >= 1");
  const Eigen::Index dim = Eigen::Index(1) << n;
  const double scale = 1.0 / std::sqrt(double(dim));
  SubalgebraBasis b;
  b.dim_n = dim;
  b.label = "local(" + std::to_string(n) + ")";
  b.partition_dims.assign(n, 2);
  for (int k = 1; k <= n; ++k)
    for (PauliAxis ax : {PauliAxis::X, PauliAxis::Y, PauliAxis::Z})
      b.elements.push_back(scale * embed_single_site(k, n, pauli_skew(ax)));
  return b;
}

SubalgebraBasis partition_subalgebra_basis(
    const std::vector<Eigen::Index>& dims) {
  if (dims.empty())
    throw std::invalid_argument("partition_subalgebra_basis: empty partition");
  Eigen::Index total = 1;
  for (Eigen::Index d : dims) {
    if (d < 2)
      throw std::invalid_argument(
          "partition_subalgebra_basis: each factor must have dim >= 2");
    total *= d;
  }
  SubalgebraBasis b;
  b.dim_n = total;
  b.label = "partition";
  b.partition_dims = dims;
  const auto r = static_cast<int>(dims.size());
  for (int j = 0; j < r; ++j) {
    Eigen::Index left = 1, right = 1;
    for (int k = 0; k < j; ++k) left *= dims[k];
    for (int k = j + 1; k < r; ++k) right *= dims[k];
    const double scale = 1.0 / std::sqrt(double(left) * double(right));
    for (const auto& g : su_basis_elements(dims[j])) {
      ComplexMatrix m =
          kron(kron(ComplexMatrix::Identity(left, left), g),
               ComplexMatrix::Identity(right, right));
      b.elements.push_back(scale * m);
    }
  }
  return b;
}

SubalgebraBasis full_su_basis(Eigen::Index n) {
  SubalgebraBasis b;
  b.dim_n = n;
  b.label = "su(" + std::to_string(n) + ")";
  b.elements = su_basis_elements(n);
  return b;
}

SubalgebraBasis full_u_basis(Eigen::Index n) {
  SubalgebraBasis b = full_su_basis(n);
  b.label = "u(" + std::to_string(n) + ")";
  AlgebraElement id = AlgebraElement::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) id(j, j) = Complex(0, 1.0 / std::sqrt(double(n)));
  b.elements.push_back(id);
  return b;
}

SubalgebraBasis stabilizer_subalgebra(const ComplexMatrix& e) {
  require_square(e, "stabilizer_subalgebra");
  const Eigen::Index n = e.rows();
  const SubalgebraBasis ubasis = full_u_basis(n);
  const Eigen::Index m = ubasis.size(); // N^2

  // Real 2N^2 x N^2 system: column j holds Re/Im of vec([b_j, E]).
  RealMatrix sys(2 * n * n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const ComplexVector c = vec(commutator(ubasis.elements[j], e));
    sys.col(j).head(n * n) = c.real();
    sys.col(j).tail(n * n) = c.imag();
  }

  Eigen::BDCSVD<RealMatrix> svd(sys, Eigen::ComputeFullV);
  const RealVector& sv = svd.singularValues();
  const double cutoff = (sv.size() > 0 ? sv(0) : 0.0) * kRankTol;
  Eigen::Index rank = 0;
  for (Eigen::Index j = 0; j < sv.size(); ++j)
    if (sv(j) > cutoff) ++rank;

  SubalgebraBasis out;
  out.dim_n = n;
  out.label = "stabilizer";
  for (Eigen::Index j = rank; j < m; ++j) {
    AlgebraElement k = AlgebraElement::Zero(n, n);
    for (Eigen::Index i = 0; i < m; ++i)
      k += svd.matrixV()(i, j) * ubasis.elements[i];
    out.elements.push_back(k);
  }
  return out;
}

LieClosureResult lie_closure(const std::vector<AlgebraElement>& generators) {
  if (generators.empty())
    throw std::invalid_argument("lie_closure: empty generator list");
  const Eigen::Index n = generators.front().rows();
  for (const auto& g : generators) {
    require_square(g, "lie_closure");
    if (g.rows() != n)
      throw std::invalid_argument("lie_closure: generators of mixed dimension");
  }

  double ref = 0.0;
  for (const auto& g : generators) ref = std::max(ref, g.norm());
  ref = std::max(ref, 1.0);

  std::vector<AlgebraElement> basis;
  auto try_add = [&](const ComplexMatrix& cand) {
    ref = std::max(ref, cand.norm());
    const ComplexMatrix resid = mgs_residual(basis, cand);
    const double r = resid.norm();
    if (r > kRankTol * ref) {
      basis.push_back(resid / r);
      return true;
    }
    return false;
  };

  for (const auto& g : generators) try_add(g);

  const Eigen::Index cap = n * n;
  for (Eigen::Index sweep = 0; sweep <= cap; ++sweep) {
    bool added = false;
    const std::size_t snapshot = basis.size();
    for (const auto& g : generators)
      for (std::size_t j = 0; j < snapshot; ++j)
        if (try_add(commutator(g, basis[j]))) added = true;
    if (!added) break;
    if (static_cast<Eigen::Index>(basis.size()) >= cap) break;
  }

  LieClosureResult res;
  res.basis.dim_n = n;
  res.basis.label = "closure";
  res.basis.elements = std::move(basis);
  res.dimension = res.basis.size();

  bool traceless = true;
  for (const auto& g : generators)
    if (std::abs(g.trace()) > 1e-12 * std::max(1.0, g.norm())) traceless = false;
  res.controllable = traceless ? (res.dimension == n * n - 1)
                               : (res.dimension == n * n);
  return res;
}

UnitaryMatrix random_subgroup_element(const SubalgebraBasis& basis,
                                      std::mt19937_64& rng) {
  if (!basis.partition_dims.empty()) {
    UnitaryMatrix u = UnitaryMatrix::Identity(1, 1);
    for (Eigen::Index d : basis.partition_dims) {
      UnitaryMatrix f = haar_random_unitary(d, rng);
      // Restricted flow directions are traceless, so the per-factor phase
      // is frozen along a run; sample on the special unitary factor.
      f *= std::polar(1.0, -std::arg(f.determinant()) / double(d));
      u = kron(u, f);
    }
    return u;
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  UnitaryMatrix u = UnitaryMatrix::Identity(basis.dim_n, basis.dim_n);
  for (int round = 0; round < 3; ++round) {
    AlgebraElement g = AlgebraElement::Zero(basis.dim_n, basis.dim_n);
    for (const auto& h : basis.elements) g += gauss(rng) * h;
    u = expm_skew(g) * u;
  }
  return u;
}

} // namespace uflow::lie
