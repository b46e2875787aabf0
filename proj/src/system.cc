#include "cis/system.h"

#include <algorithm>

namespace cis {

Horizon Horizon::steps(int t) {
  if (t < 0) throw std::invalid_argument("Horizon: negative step count");
  return Horizon(t);
}

LinearSystem::LinearSystem(Matrix a, Matrix b, Matrix e, HPolytope w)
    : A(std::move(a)), B(std::move(b)), E(std::move(e)), W(std::move(w)) {
  if (A.rows() != A.cols()) throw std::invalid_argument("A must be square");
  if (B.rows() != A.rows()) throw std::invalid_argument("B row count != n");
  if (E.rows() != A.rows() && E.size() != 0) {
    throw std::invalid_argument("E row count != n");
  }
  if (E.size() == 0) E = Matrix::Zero(A.rows(), W.dim());
  if (W.dim() != E.cols()) {
    throw std::invalid_argument("W dimension != columns of E");
  }
  require_finite(A, "A");
  require_finite(B, "B");
  require_finite(E, "E");
  if (E.cols() > 0 && !is_bounded(W)) {
    throw std::invalid_argument("disturbance set W must be bounded");
  }
}

LinearSystem::LinearSystem(Matrix a, Matrix b)
    : LinearSystem(std::move(a), std::move(b), Matrix(), HPolytope::universe(0)) {}

bool LinearSystem::has_disturbance() const {
  if (E.cols() == 0 || E.cwiseAbs().maxCoeff() == 0.0) return false;
  for (int i = 0; i < d(); ++i) {
    Vector c = Vector::Zero(d());
    c(i) = 1.0;
    if (support(W, c) + support(W, -c) > 0.0) return true;
  }
  return false;
}

Matrix LinearSystem::gain() const {
  return K.size() == 0 ? Matrix::Zero(m(), n()) : K;
}

LinearSystem LinearSystem::nominal() const {
  LinearSystem out(A, B);
  out.K = K;
  return out;
}

int nilpotency_index(const Matrix& A, double tol) {
  const int n = static_cast<int>(A.rows());
  Matrix p = Matrix::Identity(n, n);
  if (n == 0) return 0;
  for (int k = 1; k <= n; ++k) {
    p = p * A;
    if (inf_norm(p) <= tol) return k;
  }
  return -1;
}

std::vector<int> controllability_indices(const Matrix& A, const Matrix& B,
                                         const Tolerances& tol) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  std::vector<int> mu(m, 0);
  std::vector<char> active(m, 1);
  Matrix selected(n, 0);
  Matrix power_b = B;  // A^k B
  int rank = 0;
  for (int k = 0; k < n && rank < n; ++k) {
    for (int j = 0; j < m && rank < n; ++j) {
      if (!active[j]) continue;
      Matrix trial(n, selected.cols() + 1);
      trial << selected, power_b.col(j);
      Eigen::ColPivHouseholderQR<Matrix> qr(trial);
      qr.setThreshold(tol.rank);
      if (qr.rank() > rank) {
        selected = std::move(trial);
        ++rank;
        ++mu[j];
      } else {
        // Once A^k b_j depends on earlier columns, so do all higher powers.
        active[j] = 0;
      }
    }
    power_b = A * power_b;
  }
  if (rank < n) {
    throw NotControllable("(A, B) is not controllable: rank " +
                              std::to_string(rank) + " < " + std::to_string(n),
                          rank);
  }
  return mu;
}

Matrix nilpotentizing_gain(const Matrix& A, const Matrix& B,
                           const Tolerances& tol) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  if (nilpotency_index(A, tol.nilpotent) >= 0) return Matrix::Zero(m, n);
  const std::vector<int> mu = controllability_indices(A, B, tol);

  // Controller-form basis [b_1, A b_1, ..., A^{mu_1-1} b_1, b_2, ...].
  Matrix C(n, n);
  int col = 0;
  for (int j = 0; j < m; ++j) {
    Vector v = B.col(j);
    for (int k = 0; k < mu[j]; ++k) {
      C.col(col++) = v;
      v = A * v;
    }
  }
  const Matrix Cinv = C.fullPivLu().inverse();

  std::vector<int> used;
  for (int j = 0; j < m; ++j) {
    if (mu[j] > 0) used.push_back(j);
  }
  const int r = static_cast<int>(used.size());
  Matrix Psi(r, n), Gamma(r, m);
  int sigma = 0;
  for (int i = 0; i < r; ++i) {
    const int j = used[i];
    sigma += mu[j];
    const Eigen::RowVectorXd q = Cinv.row(sigma - 1);
    const Eigen::RowVectorXd qa = q * mat_power(A, mu[j] - 1);
    Psi.row(i) = qa * A;
    Gamma.row(i) = qa * B;
  }
  // Inputs with zero controllability index get zero gain; the others solve
  // Gamma_used u = -Psi x.
  Matrix Gu(r, r);
  for (int i = 0; i < r; ++i) Gu.col(i) = Gamma.col(used[i]);
  const Matrix Ku = -Gu.fullPivLu().solve(Psi);
  Matrix K = Matrix::Zero(m, n);
  for (int i = 0; i < r; ++i) K.row(used[i]) = Ku.row(i);
  return K;
}

HPolytope feedback_safe_set(const HPolytope& Sxu, const Matrix& K) {
  const int m = static_cast<int>(K.rows());
  const int n = static_cast<int>(K.cols());
  if (Sxu.dim() != n + m) {
    throw std::invalid_argument("feedback_safe_set: dimension mismatch");
  }
  Matrix T = Matrix::Identity(n + m, n + m);
  T.bottomLeftCorner(m, n) = K;
  return affine_preimage(Sxu, T);
}

Nilpotentized nilpotentize(const LinearSystem& sys, const HPolytope& Sxu,
                           const Tolerances& tol) {
  const Matrix K = nilpotentizing_gain(sys.A, sys.B, tol);
  LinearSystem out = sys;
  out.A = sys.A + sys.B * K;
  out.K = sys.gain() + K;
  const int nu = nilpotency_index(out.A, tol.nilpotent);
  if (nu < 0) {
    throw NumericalFailure(
        "nilpotentize: closed loop not nilpotent within tolerance");
  }
  return Nilpotentized{std::move(out), feedback_safe_set(Sxu, K), nu};
}

MinkowskiSumChain acc_disturbance(const LinearSystem& sys, Horizon t,
                                  const Tolerances& tol) {
  MinkowskiSumChain chain(sys.n());
  if (!sys.has_disturbance()) return chain;
  int steps;
  if (t.is_infinite()) {
    steps = nilpotency_index(sys.A, tol.nilpotent);
    if (steps < 0) {
      throw std::invalid_argument(
          "acc_disturbance: infinite horizon needs nilpotent A");
    }
  } else {
    steps = t.count();
  }
  Matrix term = sys.E;  // A^{i-1} E
  for (int i = 1; i <= steps; ++i) {
    if (inf_norm(term) <= tol.nilpotent) break;
    chain.add(term, sys.W);
    term = sys.A * term;
  }
  return chain;
}

double MinkowskiAffineSet::support(const Vector& c) const {
  const double h = cis::support(set, map.transpose() * c);
  return h + c.dot(offset) + disturbance.support(c);
}

MinkowskiAffineSet reach_set(const LinearSystem& sys, const HPolytope& X,
                             const std::vector<Vector>& inputs) {
  const int t = static_cast<int>(inputs.size());
  if (X.dim() != sys.n()) throw std::invalid_argument("reach_set: dim of X");
  Vector offset = Vector::Zero(sys.n());
  for (const Vector& u : inputs) {
    if (u.size() != sys.m()) throw std::invalid_argument("reach_set: input");
    offset = sys.A * offset + sys.B * u;
  }
  return MinkowskiAffineSet{mat_power(sys.A, t), X, offset,
                            acc_disturbance(sys, Horizon::steps(t))};
}

}  // namespace cis
