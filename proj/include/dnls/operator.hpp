#pragma once

#include <Eigen/Dense>

#include "dnls/lattice.hpp"

namespace dnls {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

CVector flatten(const LatticeField &phi);
LatticeField unflatten(const CVector &v, int T, int K);

/// Dense matrix of L on C^{TK} in the row-major flat layout.
CMatrix assemble_L(const LatticeParams &params);

/// Operator norm induced by the sup norm: the largest row sum of entry
/// moduli.
double operator_norm_sup(const CMatrix &m);

/// A = L - sI with s > ||L||, factorized once and shared read-only.
class ShiftedOperator {
public:
  ShiftedOperator(const LatticeParams &params, double shift_factor);

  const LatticeParams &params() const { return params_; }
  Eigen::Index dim() const { return L_.rows(); }
  double s() const { return s_; }
  double norm_L() const { return norm_L_; }
  double norm_A() const { return norm_A_; }
  double norm_A_inv() const { return norm_A_inv_; }

  const CMatrix &L_matrix() const { return L_; }
  CMatrix A_matrix() const;
  const CMatrix &A_inverse() const { return A_inv_; }

  LatticeField apply_A(const LatticeField &phi) const;
  /// A^{-1} b by the LU factorization.
  LatticeField solve(const LatticeField &b) const;
  /// A^{-1} b by multiplication with the explicit inverse.
  LatticeField apply_inverse(const LatticeField &b) const;

private:
  LatticeParams params_;
  CMatrix L_;
  double s_ = 0.0;
  double norm_L_ = 0.0;
  double norm_A_ = 0.0;
  double norm_A_inv_ = 0.0;
  Eigen::PartialPivLU<CMatrix> lu_;
  CMatrix A_inv_;
};

/// s = shift_factor * ||L|| (or shift_factor itself when ||L|| = 0).
/// Throws InvalidParams when shift_factor <= 1 and SingularShift if the
/// factorization breaks down.
ShiftedOperator build_shifted(const LatticeParams &params,
                              double shift_factor = 1.5);

} // namespace dnls
