#pragma once

// Closed-form implicit robust controlled invariant sets parameterized by
// eventually periodic input generators v+ = Pv, u = Hv.

#include <string>
#include <vector>

#include "cis/polytope.h"
#include "cis/system.h"

namespace cis {

/// An eventually periodic input generator. For lassos the state v holds m
/// blocks of q entries, one block per input channel.
struct LassoSpec {
  int tau = 0;
  int lambda = 1;
  Matrix P;
  Matrix H;

  int q() const { return tau + lambda; }
  int m() const { return static_cast<int>(H.rows()); }
  int v_dim() const { return static_cast<int>(P.rows()); }

  /// The (tau, lambda)-lasso generator for m inputs.
  static LassoSpec lasso(int tau, int lambda, int m);
  /// User supplied (P, H); checked for P^tau = P^(tau+lambda) and rank H = m.
  static LassoSpec custom(Matrix P, Matrix H, int tau, int lambda,
                          const Tolerances& tol = default_tolerances());
};

/// Shift register blocks whose last row recirculates to column tau, so that
/// u_t = H P^t v repeats with period lambda from t = tau on.
std::pair<Matrix, Matrix> lasso_matrices(int tau, int lambda, int m);

struct PeriodicityReport {
  bool holds = false;  // ||P^tau - P^(tau+lambda)||_inf <= tol
  int min_tau = -1;    // smallest valid transient for some divisor period
  int min_lambda = -1;
};

/// Checks P^tau = P^(tau+lambda); also reports the minimal valid pair with
/// tau* <= tau and lambda* dividing lambda.
PeriodicityReport verify_eventually_periodic(const Matrix& P, int tau,
                                             int lambda, double tol = 1e-9);

struct ImplicitRCIS {
  HPolytope polytope;  // over (x, v)
  LassoSpec spec;
  int n = 0;
  int nu = 0;
  /// Pre-feedback gain: the applied input is u = Kx + Hv.
  Matrix K;
  bool empty = false;
  int blocks = 0;  // nu + tau + lambda
  std::string fingerprint;  // digest of the safe set it was built from

  int v_dim() const { return spec.v_dim(); }
  Projection lifted_view() const { return Projection{polytope, n}; }
};

/// Stable text digest of a polytope's data.
std::string fingerprint(const HPolytope& p);

/// Stacks the nu + tau + lambda reachability blocks. A non-nilpotent A is
/// first made nilpotent by feedback; K is then recorded in the result.
/// Emptiness is reported in the result, not thrown.
ImplicitRCIS implicit_rcis(const LinearSystem& sys, const HPolytope& Sxu,
                           const LassoSpec& spec,
                           const Tolerances& tol = default_tolerances());

/// Projection of the implicit set onto the state coordinates.
HPolytope explicit_rcis(const ImplicitRCIS& ir,
                        const ProjectOptions& opt = ProjectOptions{});

struct InvarianceReport {
  int samples = 0;
  int violations = 0;
  std::vector<Vector> violating_points;
};

/// For sampled x in C (boundary biased), checks that some u has (x, u) in
/// S_xu and Ax + Bu + Ew in C for every vertex w of W.
InvarianceReport invariance_check(const LinearSystem& sys, const HPolytope& Sxu,
                                  const HPolytope& C, int samples,
                                  std::uint64_t seed = 1, double slack = 1e-7);

/// Union of implicit sets sharing q, lifted to (x, v, zeta) with zeta the
/// component selector.
struct BigMUnion {
  std::vector<ImplicitRCIS> components;
  HPolytope lifted;
  Matrix M;  // M(i, j) for component i, row j (padded with zeros)
  int n = 0;
  int v_dim = 0;

  int count() const { return static_cast<int>(components.size()); }
};

struct Hierarchy {
  int q = 0;
  std::vector<ImplicitRCIS> components;  // (0,q), (1,q-1), ..., (q-1,1)
  BigMUnion bigm;
};

/// Theta_q = {(tau, q - tau) | tau = 0..q-1}.
std::vector<std::pair<int, int>> theta(int q);

BigMUnion make_bigm(const std::vector<ImplicitRCIS>& components);

Hierarchy hierarchy(const LinearSystem& sys, const HPolytope& Sxu, int q,
                    const Tolerances& tol = default_tolerances());

/// (x, v) lies in some component, found by enumerating zeta = e_i.
bool member_bigm(const BigMUnion& bu, const Vector& x, const Vector& v);
/// x lies in the projection of some component.
bool member_bigm_state(const BigMUnion& bu, const Vector& x);

enum class BoxMode { kGeometricMean, kSumWidth, kFeasibility };
enum class BoxStatus { kOptimal, kInfeasible, kDegenerateBox };

std::string to_string(BoxMode m);
std::string to_string(BoxStatus s);

struct SafeBoxResult {
  BoxStatus status = BoxStatus::kInfeasible;
  HyperBox box;
  Vector v;
  double objective = 0.0;  // sum of log widths or sum of widths
  int newton_steps = 0;
};

/// Polytope C_B over (lower, upper, v) of boxes whose every point stays in
/// S_xu under the common input sequence u_t = H P^t v. Needs A nilpotent.
HPolytope box_program(const LinearSystem& sys, const HPolytope& Sxu,
                      const LassoSpec& spec,
                      const Tolerances& tol = default_tolerances());

/// Largest safe hyper-box (or, in feasibility mode, whether `fixed` is
/// safe). A non-nilpotent system is first made nilpotent by feedback, in which
/// case the returned v drives u = Kx + Hv.
SafeBoxResult safe_box(const LinearSystem& sys, const HPolytope& Sxu,
                       const LassoSpec& spec, BoxMode mode,
                       const HyperBox& fixed = HyperBox(),
                       const Tolerances& tol = default_tolerances());

}  // namespace cis
