#pragma once

#include <Eigen/Dense>
#include <vector>

#include "xxhydro/types.hpp"

namespace xxhydro {

// Antisymmetric complex matrix; only the strict upper triangle is stored.
class SkewMatrix {
 public:
  explicit SkewMatrix(int dim);
  // Throws ShapeError unless M is square and antisymmetric within tol.
  static SkewMatrix from_dense(const Eigen::MatrixXcd& M, double tol = 1e-12);

  int dim() const { return dim_; }
  cplx operator()(int i, int j) const;
  void set(int i, int j, cplx v);  // sets (i,j) and implies (j,i) = -v
  Eigen::MatrixXcd dense() const;

 private:
  std::size_t index(int i, int j) const;
  int dim_;
  std::vector<cplx> upper_;
};

cplx pfaffian_recursive(const SkewMatrix& M);
cplx pfaffian(const SkewMatrix& M);
LogValue pfaffian_log(const SkewMatrix& M);
// Elimination on a dense antisymmetric matrix, destroying its contents.
LogValue pfaffian_log_inplace(Eigen::MatrixXcd& A);

struct DeterminantResult {
  LogValue value;
  double rcond = 1.0;  // reciprocal condition estimate
  bool ill_conditioned = false;
};

DeterminantResult determinant_log(const Eigen::MatrixXcd& M);

// det((1 - n) + (prod_i e^{x_i}) n) for number-conserving quadratic
// exponents x_i, ordered left to right as in the operator product.
DeterminantResult gaussian_trace_det(const Eigen::MatrixXcd& occupations,
                                     const std::vector<Eigen::MatrixXcd>& exponents);

// Same with the one-particle product U = prod_i e^{x_i} already formed.
DeterminantResult gaussian_trace_det_product(const Eigen::MatrixXcd& occupations,
                                             const Eigen::MatrixXcd& product);

}  // namespace xxhydro
