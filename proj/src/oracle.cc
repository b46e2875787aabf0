#include "cis/oracle.h"

#include <cmath>

namespace cis {

namespace {

// The form the implicit construction works in: nilpotent A, transformed S.
Nilpotentized nilpotent_form(const LinearSystem& sys, const HPolytope& Sxu,
                             const Tolerances& tol = default_tolerances()) {
  const int nu = nilpotency_index(sys.A, tol.nilpotent);
  if (nu >= 0) return Nilpotentized{sys, Sxu, nu};
  return nilpotentize(sys, Sxu, tol);
}

// S_xu with state rows eroded by the chain (inputs untouched).
HPolytope erode_state_rows(const HPolytope& Sxu, const MinkowskiSumChain& chain,
                           int m) {
  return erode(Sxu, chain.padded(m));
}

struct OuterLifted {
  HPolytope lifted;  // over (x, u_0, ..., u_{nu-1})
  HPolytope nominal_max;
  int nu = 0;
};

OuterLifted outer_lifted(const LinearSystem& sys, const HPolytope& Sxu,
                         int max_iters, const ProjectOptions& opt) {
  const Nilpotentized nz = nilpotent_form(sys, Sxu, opt.tol);
  const LinearSystem& s = nz.system;
  const int n = s.n();
  const int m = s.m();
  const int nu = nz.nu;

  const NominalProblem nom = nominal_problem(sys, Sxu, opt.tol);
  MaximalResult cmax =
      maximal_rcis(nom.system, nom.safe_set, max_iters, 1e-7, opt);
  if (!cmax.converged) {
    throw NotConverged("nominal maximal CIS did not converge in " +
                       std::to_string(max_iters) + " iterations");
  }

  const int dim = n + m * nu;
  const HPolytope& S = nz.safe_set;
  const int k = S.rows();
  const HPolytope& Cbar = cmax.set;
  const int total = k * nu + Cbar.rows();
  Matrix G = Matrix::Zero(total, dim);
  Vector f = Vector::Zero(total);

  // Row map of the state after t steps: x_t = At x + sum Ai B u_i.
  Matrix state_map = Matrix::Zero(n, dim);
  state_map.leftCols(n) = Matrix::Identity(n, n);
  for (int t = 0; t < nu; ++t) {
    const HPolytope St =
        erode_state_rows(S, acc_disturbance(s, Horizon::steps(t), opt.tol), m);
    Matrix map = Matrix::Zero(n + m, dim);
    map.topRows(n) = state_map;
    map.block(n, n + t * m, m, m) = Matrix::Identity(m, m);
    G.middleRows(t * k, k) = St.G() * map;
    f.segment(t * k, k) = St.f();
    Matrix next = s.A * state_map;
    next.middleCols(n + t * m, m) += s.B;
    state_map = std::move(next);
  }
  // After nu steps the x-dependence has vanished.
  state_map.leftCols(n).setZero();
  G.bottomRows(Cbar.rows()) = Cbar.G() * state_map;
  f.tail(Cbar.rows()) = Cbar.f();
  return OuterLifted{HPolytope(std::move(G), std::move(f)), Cbar, nu};
}

}  // namespace

NominalProblem nominal_problem(const LinearSystem& sys, const HPolytope& Sxu,
                               const Tolerances& tol) {
  const Nilpotentized nz = nilpotent_form(sys, Sxu, tol);
  NominalProblem out;
  out.system = nz.system.nominal();
  out.safe_set = erode_state_rows(
      nz.safe_set, acc_disturbance(nz.system, Horizon::infinite(), tol),
      sys.m());
  out.nu = nz.nu;
  return out;
}

FixedPointReport fixed_points(const LinearSystem& sys, const HPolytope& Sxu) {
  const int n = sys.n();
  const int m = sys.m();
  const int k = Sxu.rows();
  // max r: S rows with a ball of radius r, (A - I)x + Bu = 0, r <= 1e3.
  Matrix G = Matrix::Zero(k + 2 * n + 1, n + m + 1);
  Vector f = Vector::Zero(k + 2 * n + 1);
  G.topLeftCorner(k, n + m) = Sxu.G();
  for (int j = 0; j < k; ++j) G(j, n + m) = Sxu.G().row(j).norm();
  f.head(k) = Sxu.f();
  Matrix eq(n, n + m);
  eq << sys.A - Matrix::Identity(n, n), sys.B;
  G.block(k, 0, n, n + m) = eq;
  G.block(k + n, 0, n, n + m) = -eq;
  G(k + 2 * n, n + m) = 1.0;
  f(k + 2 * n) = 1e3;
  Vector c = Vector::Zero(n + m + 1);
  c(n + m) = 1.0;
  FixedPointReport rep;
  LpOutcome lp = solve_lp(LpProblem{c, G, f, Sense::kMaximize});
  if (!lp.optimal() || lp.value < -1e-9) return rep;
  rep.exists = true;
  rep.margin = std::max(lp.value, 0.0);
  rep.interior = lp.value > 1e-9;
  rep.x = lp.point.head(n);
  rep.u = lp.point.segment(n, m);
  return rep;
}

HPolytope pre(const LinearSystem& sys, const HPolytope& Sxu, const HPolytope& C,
              const ProjectOptions& opt) {
  const int n = sys.n();
  const int m = sys.m();
  MinkowskiSumChain ew(n);
  if (sys.has_disturbance()) ew.add(sys.E, sys.W);
  const HPolytope target = erode(C, ew);
  Matrix AB(n, n + m);
  AB << sys.A, sys.B;
  const HPolytope lifted = Sxu.intersect(affine_preimage(target, AB));
  return project(lifted, n, opt);
}

MaximalResult maximal_rcis(const LinearSystem& sys, const HPolytope& Sxu,
                           int max_iters, double slack,
                           const ProjectOptions& opt) {
  const int n = sys.n();
  MaximalResult res;
  HPolytope C = project(Sxu, n, opt);
  for (int k = 1; k <= max_iters; ++k) {
    res.iterations = k;
    if (is_empty(C)) {
      res.set = HPolytope::empty(n);
      res.converged = true;
      return res;
    }
    HPolytope next = remove_redundant(C.intersect(pre(sys, Sxu, C, opt)),
                                      opt.tol);
    if (is_empty(next)) {
      res.set = HPolytope::empty(n);
      res.converged = true;
      return res;
    }
    if (contains(next, C, slack)) {
      res.set = std::move(next);
      res.converged = true;
      return res;
    }
    C = std::move(next);
  }
  res.set = std::move(C);
  return res;
}

OuterBound outer_bound(const LinearSystem& sys, const HPolytope& Sxu,
                       int max_iters, const ProjectOptions& opt) {
  OuterLifted ol = outer_lifted(sys, Sxu, max_iters, opt);
  const int n = sys.n();
  OuterBound out;
  out.nu = ol.nu;
  out.nominal_max = ol.nominal_max;
  out.lifted = Projection{ol.lifted, n};
  out.set = is_empty(ol.lifted) ? HPolytope::empty(n)
                                : project(ol.lifted, n, opt);
  return out;
}

CompletenessReport weak_completeness(const LinearSystem& sys,
                                     const HPolytope& Sxu, int max_iters) {
  CompletenessReport rep;
  const ImplicitRCIS ir =
      implicit_rcis(sys, Sxu, LassoSpec::lasso(0, 1, sys.m()));
  rep.implicit_empty = ir.empty;
  const OuterLifted ol = outer_lifted(sys, Sxu, max_iters, ProjectOptions{});
  rep.outer_empty = is_empty(ol.lifted);
  const NominalProblem nom = nominal_problem(sys, Sxu);
  rep.nominal_fixed_point = fixed_points(nom.system, nom.safe_set);
  if (rep.implicit_empty != rep.outer_empty) {
    throw OracleDisagreement(
        std::string("weak completeness violated: implicit set is ") +
        (rep.implicit_empty ? "empty" : "nonempty") + ", outer bound is " +
        (rep.outer_empty ? "empty" : "nonempty"));
  }
  rep.verdict = rep.implicit_empty ? Completeness::kBothEmpty
                                   : Completeness::kBothNonempty;
  return rep;
}

ConvergenceCurve convergence_curve(const LinearSystem& sys,
                                   const HPolytope& Sxu, int lambda,
                                   const std::vector<int>& taus, int dirs,
                                   std::uint64_t seed) {
  ConvergenceCurve curve;
  const NominalProblem nom = nominal_problem(sys, Sxu);
  curve.precondition_met = fixed_points(nom.system, nom.safe_set).interior;
  curve.outer = outer_bound(sys, Sxu).set;
  const ConvexView outer = view(curve.outer);
  for (int tau : taus) {
    const ImplicitRCIS ir =
        implicit_rcis(sys, Sxu, LassoSpec::lasso(tau, lambda, sys.m()));
    double d;
    if (ir.empty) {
      d = is_empty(curve.outer) ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      d = hausdorff(view(ir.lifted_view()), outer, dirs, seed);
    }
    curve.points.push_back({tau, d});
  }
  return curve;
}

}  // namespace cis
