#include "xxhydro/pfaffian.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <sstream>

namespace xxhydro {

namespace {
constexpr int kMaxDim = 4096;
constexpr int kMaxRecursiveDim = 12;
}  // namespace

SkewMatrix::SkewMatrix(int dim) : dim_(dim) {
  if (dim < 0) throw ShapeError("skew matrix: negative dimension");
  if (dim > kMaxDim) throw SizeGuardError("skew matrix: dimension above 4096");
  upper_.assign(static_cast<std::size_t>(dim) * (dim > 0 ? dim - 1 : 0) / 2, 0.0);
}

std::size_t SkewMatrix::index(int i, int j) const {
  // row-major packing of the strict upper triangle, i < j
  const std::size_t ii = static_cast<std::size_t>(i);
  return ii * (2 * static_cast<std::size_t>(dim_) - ii - 1) / 2 + (j - i - 1);
}

cplx SkewMatrix::operator()(int i, int j) const {
  if (i == j) return 0.0;
  if (i < j) return upper_[index(i, j)];
  return -upper_[index(j, i)];
}

void SkewMatrix::set(int i, int j, cplx v) {
  if (i == j) {
    if (v != cplx(0.0)) throw ShapeError("skew matrix: diagonal must vanish");
    return;
  }
  if (i < j)
    upper_[index(i, j)] = v;
  else
    upper_[index(j, i)] = -v;
}

SkewMatrix SkewMatrix::from_dense(const Eigen::MatrixXcd& M, double tol) {
  if (M.rows() != M.cols()) throw ShapeError("skew matrix: not square");
  const int n = static_cast<int>(M.rows());
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  SkewMatrix S(n);
  for (int i = 0; i < n; ++i) {
    if (std::abs(M(i, i)) > tol * scale) throw ShapeError("skew matrix: nonzero diagonal");
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(M(i, j) + M(j, i)) > tol * scale)
        throw ShapeError("skew matrix: input is not antisymmetric");
      S.set(i, j, M(i, j));
    }
  }
  return S;
}

Eigen::MatrixXcd SkewMatrix::dense() const {
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j) {
      A(i, j) = (*this)(i, j);
      A(j, i) = -A(i, j);
    }
  return A;
}

namespace {

cplx pf_rec(const SkewMatrix& M, std::vector<int>& idx) {
  if (idx.empty()) return 1.0;
  const int first = idx.front();
  cplx total = 0.0;
  std::vector<int> rest;
  rest.reserve(idx.size());
  for (std::size_t k = 1; k < idx.size(); ++k) {
    const cplx m = M(first, idx[k]);
    if (m == cplx(0.0)) continue;
    rest.clear();
    for (std::size_t r = 1; r < idx.size(); ++r)
      if (r != k) rest.push_back(idx[r]);
    // (-1)^k with 1-based k counting from the partner of the first index
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    total += sign * m * pf_rec(M, rest);
  }
  return total;
}

}  // namespace

cplx pfaffian_recursive(const SkewMatrix& M) {
  if (M.dim() % 2 != 0) throw ShapeError("pfaffian: odd dimension");
  if (M.dim() > kMaxRecursiveDim)
    throw SizeGuardError("pfaffian_recursive: dimension above 12 (use pfaffian)");
  std::vector<int> idx(M.dim());
  for (int i = 0; i < M.dim(); ++i) idx[i] = i;
  return pf_rec(M, idx);
}

LogValue pfaffian_log_inplace(Eigen::MatrixXcd& A) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw ShapeError("pfaffian: not square");
  if (n % 2 != 0) throw ShapeError("pfaffian: odd dimension");
  if (n > kMaxDim) throw SizeGuardError("pfaffian: dimension above 4096");
  LogValue result = LogValue::one();
  for (Eigen::Index k = 0; k + 1 < n; k += 2) {
    Eigen::Index kp;
    A.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&kp);
    kp += k + 1;
    if (kp != k + 1) {
      A.row(k + 1).swap(A.row(kp));
      A.col(k + 1).swap(A.col(kp));
      result.phase = std::remainder(result.phase + pi, 2 * pi);
    }
    const cplx pivot = A(k, k + 1);
    if (pivot == cplx(0.0)) return {};
    result = result * LogValue::from(pivot);
    if (k + 2 < n) {
      const Eigen::Index m = n - k - 2;
      Eigen::VectorXcd tau = A.row(k).tail(m).transpose() / pivot;
      Eigen::VectorXcd col = A.col(k + 1).tail(m);
      A.bottomRightCorner(m, m).noalias() += tau * col.transpose();
      A.bottomRightCorner(m, m).noalias() -= col * tau.transpose();
    }
  }
  return result;
}

LogValue pfaffian_log(const SkewMatrix& M) {
  if (M.dim() % 2 != 0) throw ShapeError("pfaffian: odd dimension");
  Eigen::MatrixXcd A = M.dense();
  return pfaffian_log_inplace(A);
}

cplx pfaffian(const SkewMatrix& M) { return pfaffian_log(M).value(); }

DeterminantResult determinant_log(const Eigen::MatrixXcd& M) {
  if (M.rows() != M.cols()) throw ShapeError("determinant: not square");
  if (M.rows() > kMaxDim) throw SizeGuardError("determinant: dimension above 4096");
  DeterminantResult r;
  if (M.rows() == 0) {
    r.value = LogValue::one();
    return r;
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
  LogValue v = LogValue::one();
  const auto& LU = lu.matrixLU();
  for (Eigen::Index i = 0; i < LU.rows(); ++i) v = v * LogValue::from(LU(i, i));
  if (lu.permutationP().determinant() < 0 && !v.is_zero())
    v.phase = std::remainder(v.phase + pi, 2 * pi);
  r.value = v;
  r.rcond = v.is_zero() ? 0.0 : lu.rcond();
  r.ill_conditioned = !(r.rcond >= 1e-12);
  return r;
}

DeterminantResult gaussian_trace_det_product(const Eigen::MatrixXcd& occupations,
                                             const Eigen::MatrixXcd& product) {
  const Eigen::Index n = occupations.rows();
  if (occupations.cols() != n || product.rows() != n || product.cols() != n)
    throw ShapeError("gaussian_trace_det: matrices must be square and of equal size");
  const Eigen::MatrixXcd D =
      Eigen::MatrixXcd::Identity(n, n) - occupations + product * occupations;
  return determinant_log(D);
}

DeterminantResult gaussian_trace_det(const Eigen::MatrixXcd& occupations,
                                     const std::vector<Eigen::MatrixXcd>& exponents) {
  const Eigen::Index n = occupations.rows();
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Identity(n, n);
  for (const auto& x : exponents) {
    if (x.rows() != n || x.cols() != n)
      throw ShapeError("gaussian_trace_det: factor dimension mismatch");
    U = U * x.exp();
  }
  return gaussian_trace_det_product(occupations, U);
}

}  // namespace xxhydro
