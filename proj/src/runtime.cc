#include "cis/runtime.h"

#include <limits>

namespace cis {

std::string to_string(Encoding e) {
  switch (e) {
    case Encoding::kU1:
      return "U1";
    case Encoding::kU2:
      return "U2";
    case Encoding::kU3:
      return "U3";
  }
  return "?";
}

Encoding parse_encoding(const std::string& s) {
  if (s == "U1" || s == "u1") return Encoding::kU1;
  if (s == "U2" || s == "u2") return Encoding::kU2;
  if (s == "U3" || s == "u3") return Encoding::kU3;
  throw std::invalid_argument("unknown encoding '" + s + "'");
}

std::string to_string(SuperviseStatus s) {
  switch (s) {
    case SuperviseStatus::kPass:
      return "pass";
    case SuperviseStatus::kCorrected:
      return "corrected";
    case SuperviseStatus::kInfeasible:
      return "infeasible";
  }
  return "?";
}

namespace {

std::vector<Vector> disturbance_vertices(const LinearSystem& sys) {
  if (!sys.has_disturbance()) return {Vector::Zero(sys.d())};
  return enumerate_vertices(sys.W, 4096);
}

}  // namespace

AdmissibleEncoding admissible(const LinearSystem& sys, const HPolytope& Sxu,
                              const ImplicitRCIS& ir, const Vector& x,
                              Encoding variant) {
  const int n = sys.n();
  const int m = sys.m();
  const int vd = ir.v_dim();
  if (x.size() != n || ir.n != n || Sxu.dim() != n + m) {
    throw std::invalid_argument("admissible: dimension mismatch");
  }
  AdmissibleEncoding enc;
  enc.variant = variant;
  enc.m = m;
  enc.v_dim = vd;
  enc.x = x;
  enc.K = ir.K.size() ? ir.K : Matrix::Zero(m, n);
  enc.H = ir.spec.H;
  const HPolytope& C = ir.polytope;
  const Matrix Cx = C.G().leftCols(n);
  const Matrix Cv = C.G().rightCols(vd);

  if (variant == Encoding::kU2) {
    enc.copies = 1;
    enc.set = HPolytope(Cv, C.f() - Cx * x);
    return enc;
  }

  enc.w_vertices = disturbance_vertices(sys);
  const int N = static_cast<int>(enc.w_vertices.size());
  enc.copies = variant == Encoding::kU1 ? N : 1;
  const int dim = m + vd * enc.copies;
  const int rows = Sxu.rows() + N * C.rows();
  Matrix G = Matrix::Zero(rows, dim);
  Vector f(rows);
  G.block(0, 0, Sxu.rows(), m) = Sxu.G().rightCols(m);
  f.head(Sxu.rows()) = Sxu.f() - Sxu.G().leftCols(n) * x;
  const Matrix CxB = Cx * sys.B;
  const Vector Ax = sys.A * x;
  int r = Sxu.rows();
  for (int i = 0; i < N; ++i) {
    const int vcol = m + (variant == Encoding::kU1 ? i : 0) * vd;
    G.block(r, 0, C.rows(), m) = CxB;
    G.block(r, vcol, C.rows(), vd) = Cv;
    f.segment(r, C.rows()) = C.f() - Cx * (Ax + sys.E * enc.w_vertices[i]);
    r += C.rows();
  }
  enc.set = HPolytope(std::move(G), std::move(f));
  return enc;
}

bool AdmissibleEncoding::admits(const Vector& u, double tol) const {
  const HPolytope& S = set;
  Vector f = S.f();
  Matrix G;
  if (variant == Encoding::kU2) {
    // exists v in set with Kx + Hv = u.
    const Vector target = u - K * x;
    G.resize(S.rows() + 2 * m, v_dim);
    f.conservativeResize(S.rows() + 2 * m);
    G.topRows(S.rows()) = S.G();
    G.middleRows(S.rows(), m) = H;
    G.bottomRows(m) = -H;
    f.segment(S.rows(), m) = target + Vector::Constant(m, tol);
    f.tail(m) = -target + Vector::Constant(m, tol);
  } else {
    G = S.G().rightCols(S.dim() - m);
    f -= S.G().leftCols(m) * u;
  }
  for (int r = 0; r < S.rows(); ++r) f(r) += tol * std::max(1.0, S.G().row(r).norm());
  if (G.cols() == 0) return f.minCoeff() >= 0.0;
  return find_feasible_point(G, f).optimal();
}

SuperviseResult supervise(const LinearSystem& sys, const HPolytope& Sxu,
                          const ImplicitRCIS& ir, const Vector& x,
                          const Vector& u_req, Encoding variant,
                          const Tolerances& tol) {
  const int m = sys.m();
  if (u_req.size() != m) throw std::invalid_argument("supervise: |u| != m");
  SuperviseResult res;
  if (ir.empty) return res;
  const AdmissibleEncoding enc = admissible(sys, Sxu, ir, x, variant);
  const double eps = tol.qp_regularization;
  const int dim = enc.set.dim();
  QpProblem qp;
  qp.G = enc.set.G();
  qp.f = enc.set.f();
  Vector applied_offset;
  if (variant == Encoding::kU2) {
    applied_offset = enc.K * x - u_req;  // u - u_req = Hv + offset
    qp.Q = 2.0 * (enc.H.transpose() * enc.H) +
           2.0 * eps * Matrix::Identity(dim, dim);
    qp.c = 2.0 * enc.H.transpose() * applied_offset;
    qp.constant = applied_offset.squaredNorm();
  } else {
    qp.Q = 2.0 * eps * Matrix::Identity(dim, dim);
    qp.Q.topLeftCorner(m, m) = 2.0 * Matrix::Identity(m, m);
    qp.c = Vector::Zero(dim);
    qp.c.head(m) = -2.0 * u_req;
    qp.constant = u_req.squaredNorm();
  }
  const QpOutcome out = solve_qp(qp, tol);
  if (!out.optimal()) return res;
  Vector u;
  if (variant == Encoding::kU2) {
    u = enc.K * x + enc.H * out.point;
    res.v = out.point;
  } else {
    u = out.point.head(m);
    res.v = out.point.tail(dim - m);
  }
  res.distance = (u - u_req).norm();
  if (res.distance <= 1e-6) {
    res.status = SuperviseStatus::kPass;
    res.u = u_req;
  } else {
    res.status = SuperviseStatus::kCorrected;
    res.u = u;
  }
  return res;
}

FilterOutput filter_step(FilterState& fs, const LinearSystem& sys, int t,
                         const HPolytope& Sxu_t, const Vector& x,
                         const Vector& u_req, const LassoSpec& spec,
                         Encoding variant) {
  if (fs.started) {
    if (t <= fs.t_last) {
      throw std::invalid_argument("filter_step: time must increase");
    }
    if (!contains(Sxu_t, fs.last_safe, 1e-7)) {
      throw SafeSetShrank("safe set at t=" + std::to_string(t) +
                          " does not contain the previous one");
    }
  }
  FilterOutput out;
  const ImplicitRCIS ir = implicit_rcis(sys, Sxu_t, spec);
  SuperviseResult r = supervise(sys, Sxu_t, ir, x, u_req, variant);
  if (r.status != SuperviseStatus::kInfeasible) {
    fs.t_star = t;
    fs.stored = ir;
    fs.stored_safe = Sxu_t;
  } else if (!fs.started) {
    throw InitiallyInfeasible("state is not supervisable at the first step");
  } else {
    r = supervise(sys, fs.stored_safe, fs.stored, x, u_req, variant);
    if (r.status == SuperviseStatus::kInfeasible) {
      throw NumericalFailure("filter_step: fallback to t*=" +
                             std::to_string(fs.t_star) +
                             " is infeasible; recursive feasibility lost");
    }
    out.fell_back = true;
  }
  fs.started = true;
  fs.t_last = t;
  fs.last_safe = Sxu_t;
  fs.history.push_back(fingerprint(Sxu_t));
  out.u = r.u;
  out.status = r.status;
  out.t_star = fs.t_star;
  return out;
}

std::vector<UnionComponent> union_components(
    const LinearSystem& sys, const std::vector<HPolytope>& safe_sets,
    const LassoSpec& spec) {
  if (safe_sets.empty() || safe_sets.size() > 10) {
    throw std::invalid_argument("union safe set needs 1..10 components");
  }
  std::vector<UnionComponent> parts;
  for (const auto& s : safe_sets) {
    parts.push_back({s, implicit_rcis(sys, s, spec)});
  }
  return parts;
}

UnionSuperviseResult supervise_union(const LinearSystem& sys,
                                     const std::vector<UnionComponent>& parts,
                                     const Vector& x, const Vector& u_req,
                                     Encoding variant) {
  if (parts.size() > 10) {
    throw std::invalid_argument("supervise_union: at most 10 components");
  }
  UnionSuperviseResult best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    SuperviseResult r =
        supervise(sys, parts[i].safe_set, parts[i].rcis, x, u_req, variant);
    if (r.status == SuperviseStatus::kInfeasible) continue;
    if (r.distance < best_dist) {
      best_dist = r.distance;
      best.result = std::move(r);
      best.component = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace cis
