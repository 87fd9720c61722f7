#include "dnls/operator.hpp"

#include <cmath>
#include <string>

namespace dnls {

CVector flatten(const LatticeField &phi) {
  CVector v(static_cast<Eigen::Index>(phi.size()));
  for (std::size_t i = 0; i < phi.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = phi[i];
  return v;
}

LatticeField unflatten(const CVector &v, int T, int K) {
  std::vector<cplx> values(v.data(), v.data() + v.size());
  return {T, K, std::move(values)};
}

CMatrix assemble_L(const LatticeParams &params) {
  const int T = params.T;
  const int K = params.K;
  const auto n = static_cast<Eigen::Index>(params.size());
  CMatrix m = CMatrix::Zero(n, n);
  const cplx ib{0.0, params.beta};
  auto idx = [&](long t, long k) {
    t = ((t % T) + T) % T;
    k = ((k % K) + K) % K;
    return static_cast<Eigen::Index>(t * K + k);
  };
  // Accumulate so that coinciding stencil points (T <= 2, K = 2) merge.
  for (long t = 0; t < T; ++t)
    for (long k = 0; k < K; ++k) {
      const auto row = idx(t, k);
      m(row, idx(t + 1, k)) += ib;
      m(row, idx(t - 1, k)) -= ib;
      m(row, idx(t, k + 1)) += params.epsilon;
      m(row, idx(t, k)) -= 2.0 * params.epsilon;
      m(row, idx(t, k - 1)) += params.epsilon;
    }
  return m;
}

double operator_norm_sup(const CMatrix &m) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    best = std::max(best, m.row(i).cwiseAbs().sum());
  return best;
}

ShiftedOperator::ShiftedOperator(const LatticeParams &params,
                                 double shift_factor)
    : params_((params.validate(), params)), L_(assemble_L(params)) {
  if (!(shift_factor > 1.0))
    throw InvalidParams("shift_factor must exceed 1, got " +
                        std::to_string(shift_factor));
  norm_L_ = operator_norm_sup(L_);
  s_ = norm_L_ > 0.0 ? shift_factor * norm_L_ : shift_factor;

  const CMatrix a = A_matrix();
  lu_.compute(a);
  A_inv_ = lu_.inverse();
  if (!A_inv_.allFinite())
    throw SingularShift("factorization of L - sI broke down");
  const double err =
      operator_norm_sup(a * A_inv_ - CMatrix::Identity(dim(), dim()));
  if (!(err < 1e-8))
    throw SingularShift("L - sI inverse check failed (error " +
                        std::to_string(err) + ")");
  norm_A_ = operator_norm_sup(a);
  norm_A_inv_ = operator_norm_sup(A_inv_);
}

CMatrix ShiftedOperator::A_matrix() const {
  return L_ - s_ * CMatrix::Identity(dim(), dim());
}

LatticeField ShiftedOperator::apply_A(const LatticeField &phi) const {
  LatticeField out = apply_L(phi, params_);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] -= s_ * phi[i];
  return out;
}

LatticeField ShiftedOperator::solve(const LatticeField &b) const {
  return unflatten(lu_.solve(flatten(b)), b.T(), b.K());
}

LatticeField ShiftedOperator::apply_inverse(const LatticeField &b) const {
  return unflatten(A_inv_ * flatten(b), b.T(), b.K());
}

ShiftedOperator build_shifted(const LatticeParams &params,
                              double shift_factor) {
  return {params, shift_factor};
}

} // namespace dnls
