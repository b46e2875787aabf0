#pragma once

// Classical maximal-invariant-set iteration and the outer bound on projected
// implicit sets, used as reference oracles.

#include <vector>

#include "cis/invariance.h"
#include "cis/polytope.h"
#include "cis/system.h"

namespace cis {

/// The two emptiness verdicts of a completeness check disagree.
class OracleDisagreement : public Error {
 public:
  using Error::Error;
};

/// The maximal set iteration hit its budget before converging.
class NotConverged : public Error {
 public:
  using Error::Error;
};

/// Disturbance-free dynamics with the safe set eroded by the minimal RPIS.
struct NominalProblem {
  LinearSystem system;  // nilpotent, E = 0
  HPolytope safe_set;   // S_xu - Wbar_inf x {0}
  int nu = 0;
};

/// Nominal problem of (sys, Sxu), made nilpotent by feedback when needed.
NominalProblem nominal_problem(const LinearSystem& sys, const HPolytope& Sxu,
                               const Tolerances& tol = default_tolerances());

struct FixedPointReport {
  bool exists = false;
  bool interior = false;  // some fixed point lies in the interior
  Vector x;
  Vector u;
  double margin = 0.0;  // largest ball radius around a fixed point in S
};

/// Fixed points (x, u) of x+ = Ax + Bu inside S_xu.
FixedPointReport fixed_points(const LinearSystem& sys, const HPolytope& Sxu);

/// {x | exists u: (x, u) in S_xu, Ax + Bu + EW in C}.
HPolytope pre(const LinearSystem& sys, const HPolytope& Sxu,
              const HPolytope& C, const ProjectOptions& opt = ProjectOptions{});

struct MaximalResult {
  HPolytope set;
  bool converged = false;
  int iterations = 0;
};

/// C_0 = pi_x(S_xu), C_{k+1} = C_k cap pre(C_k) until mutual containment.
MaximalResult maximal_rcis(const LinearSystem& sys, const HPolytope& Sxu,
                           int max_iters = 200, double slack = 1e-7,
                           const ProjectOptions& opt = ProjectOptions{});

struct OuterBound {
  HPolytope set;
  HPolytope nominal_max;  // maximal CIS of the nominal problem
  Projection lifted;      // (x, u_0..u_{nu-1}) description
  int nu = 0;
};

/// States from which nu open-loop inputs keep the disturbed reach sets safe
/// and steer the nominal state into the nominal maximal CIS. Throws
/// NotConverged when the nominal iteration does not converge.
OuterBound outer_bound(const LinearSystem& sys, const HPolytope& Sxu,
                       int max_iters = 200,
                       const ProjectOptions& opt = ProjectOptions{});

enum class Completeness { kBothEmpty, kBothNonempty };

struct CompletenessReport {
  Completeness verdict = Completeness::kBothEmpty;
  bool implicit_empty = true;
  bool outer_empty = true;
  FixedPointReport nominal_fixed_point;
};

/// Emptiness of C_xv(0,1) against emptiness of the outer bound. Throws
/// OracleDisagreement when they differ.
CompletenessReport weak_completeness(const LinearSystem& sys,
                                     const HPolytope& Sxu, int max_iters = 200);

struct ConvergencePoint {
  int tau = 0;
  double distance = 0.0;
};

struct ConvergenceCurve {
  bool precondition_met = false;  // nominal fixed point in the interior
  std::vector<ConvergencePoint> points;
  HPolytope outer;
};

/// Hausdorff distance from the projection of C_xv(tau, lambda) to the outer
/// bound for each tau. Points are computed even when the interior fixed
/// point precondition fails; the flag records it.
ConvergenceCurve convergence_curve(const LinearSystem& sys,
                                   const HPolytope& Sxu, int lambda,
                                   const std::vector<int>& taus,
                                   int dirs = 2000, std::uint64_t seed = 1);

}  // namespace cis
