#pragma once

// Discrete-time linear systems x+ = Ax + Bu + Ew with w in a polytope W.

#include <vector>

#include "cis/numlin.h"
#include "cis/polytope.h"

namespace cis {

/// (A, B) fails the controllability rank test.
class NotControllable : public Error {
 public:
  NotControllable(const std::string& what, int rank)
      : Error(what), rank_(rank) {}
  int rank() const { return rank_; }

 private:
  int rank_;
};

/// A time horizon: either a finite step count or infinity.
class Horizon {
 public:
  static Horizon steps(int t);
  static Horizon infinite() { return Horizon(-1); }

  bool is_infinite() const { return t_ < 0; }
  /// Finite step count; only meaningful when !is_infinite().
  int count() const { return t_; }

 private:
  explicit Horizon(int t) : t_(t) {}
  int t_;
};

struct LinearSystem {
  Matrix A;  // n x n
  Matrix B;  // n x m
  Matrix E;  // n x d, d may be 0
  HPolytope W = HPolytope::universe(0);  // disturbance set in R^d
  /// Pre-feedback gain already folded into A (u_applied = Kx + u); empty when
  /// none was applied.
  Matrix K;

  LinearSystem() = default;
  /// Validates shapes and finiteness. W must be bounded when d > 0.
  LinearSystem(Matrix A, Matrix B, Matrix E, HPolytope W);
  /// Disturbance-free system.
  LinearSystem(Matrix A, Matrix B);

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
  int d() const { return static_cast<int>(E.cols()); }
  bool has_disturbance() const;
  /// The gain K, or an m x n zero matrix when none was applied.
  Matrix gain() const;
  /// The same dynamics with the disturbance removed.
  LinearSystem nominal() const;
};

/// Smallest k <= n with ||A^k||_inf <= tol, or -1 when A is not nilpotent.
int nilpotency_index(const Matrix& A, double tol = 1e-9);

/// Controllability indices of (A, B), one per input column, from a
/// Luenberger crate-order column selection. Throws NotControllable.
std::vector<int> controllability_indices(const Matrix& A, const Matrix& B,
                                         const Tolerances& tol =
                                             default_tolerances());

/// Gain K with A + BK nilpotent of index max(controllability indices).
/// Returns the zero gain when A is already nilpotent.
Matrix nilpotentizing_gain(const Matrix& A, const Matrix& B,
                           const Tolerances& tol = default_tolerances());

struct Nilpotentized {
  LinearSystem system;  // A + BK, with K recorded
  HPolytope safe_set;   // {(x, u') | (x, Kx + u') in S_xu}
  int nu = 0;
};

Nilpotentized nilpotentize(const LinearSystem& sys, const HPolytope& Sxu,
                           const Tolerances& tol = default_tolerances());

/// {(x, u') | (x, Kx + u') in S_xu}.
HPolytope feedback_safe_set(const HPolytope& Sxu, const Matrix& K);

/// Formal sum  sum_{i=1..min(t, nu)} A^{i-1} E W. Infinite horizons need A
/// nilpotent.
MinkowskiSumChain acc_disturbance(const LinearSystem& sys, Horizon t,
                                  const Tolerances& tol = default_tolerances());

/// map * X + offset + disturbance.
struct MinkowskiAffineSet {
  Matrix map;
  HPolytope set;
  Vector offset;
  MinkowskiSumChain disturbance;

  int dim() const { return static_cast<int>(map.rows()); }
  double support(const Vector& c) const;
};

/// Reachable set from X under the input sequence u_0, ..., u_{t-1}:
/// A^t X + sum_{i=1..t} A^{i-1} B u_{t-i} + Wbar_t.
MinkowskiAffineSet reach_set(const LinearSystem& sys, const HPolytope& X,
                             const std::vector<Vector>& inputs);

}  // namespace cis
