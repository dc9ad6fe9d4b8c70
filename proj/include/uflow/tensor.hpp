#pragma once

// Order-r complex tensors stored flat in lexicographic order (first index
// slowest), so the canonical isomorphism to C^N maps outer products of
// column vectors to their Kronecker product.

#include "uflow/matcore.hpp"

#include <numeric>
#include <vector>

namespace uflow {

struct Tensor {
  std::vector<Eigen::Index> dims;
  ComplexVector data; // flat, lexicographic, index i_1 slowest

  Eigen::Index order() const { return static_cast<Eigen::Index>(dims.size()); }
  Eigen::Index size() const {
    return std::accumulate(dims.begin(), dims.end(), Eigen::Index(1),
                           std::multiplies<>());
  }

  Complex& at(const std::vector<Eigen::Index>& idx) {
    return data(flat_index(idx));
  }
  Complex at(const std::vector<Eigen::Index>& idx) const {
    return data(flat_index(idx));
  }

  Eigen::Index flat_index(const std::vector<Eigen::Index>& idx) const {
    if (idx.size() != dims.size())
      throw std::invalid_argument("Tensor: index rank mismatch");
    Eigen::Index f = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      if (idx[k] < 0 || idx[k] >= dims[k])
        throw std::invalid_argument("Tensor: index out of range");
      f = f * dims[k] + idx[k];
    }
    return f;
  }

  double norm() const { return data.norm(); }
};

inline Tensor make_tensor(std::vector<Eigen::Index> dims) {
  Tensor t;
  t.dims = std::move(dims);
  t.data = ComplexVector::Zero(t.size());
  return t;
}

/// <Y|X> = sum conj(Y) X over all multi-indices.
inline Complex tensor_inner(const Tensor& y, const Tensor& x) {
  if (y.dims != x.dims)
    throw std::invalid_argument("tensor_inner: dimension mismatch");
  return y.data.dot(x.data);
}

/// The canonical isomorphism taking x^1 (x)_a ... (x)_a x^r to the
/// Kronecker product x^1 (x) ... (x) x^r; with this storage it is the
/// identity on the flat data.
inline ComplexVector tensor_vec(const Tensor& x) { return x.data; }

inline Tensor tensor_unvec(const ComplexVector& v,
                           std::vector<Eigen::Index> dims) {
  Tensor t;
  t.dims = std::move(dims);
  if (v.size() != t.size())
    throw std::invalid_argument("tensor_unvec: length mismatch");
  t.data = v;
  return t;
}

/// Outer product of unit factors as a Tensor.
inline Tensor rank1_tensor(const std::vector<ComplexVector>& factors) {
  ComplexVector v = ComplexVector::Ones(1);
  std::vector<Eigen::Index> dims;
  for (const auto& f : factors) {
    dims.push_back(f.size());
    ComplexVector next(v.size() * f.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
      next.segment(i * f.size(), f.size()) = v(i) * f;
    v = std::move(next);
  }
  return tensor_unvec(v, dims);
}

/// Result of a best rank-1 approximation: X ~ C * x^1 (x)_a ... (x)_a x^r.
struct Rank1Result {
  Complex coefficient{0, 0};          // <x^1 (x)_a ... | X>
  std::vector<ComplexVector> factors; // unit vectors
  double overlap = 0.0;               // |coefficient|^2
  double residual_sq = 0.0;           // ||X||^2 - overlap
  bool converged = false;
  int iterations = 0;
};

} // namespace uflow
