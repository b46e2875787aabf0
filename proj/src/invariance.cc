#include "cis/invariance.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <numeric>

namespace cis {

// ---------------------------------------------------------------------------
// Lasso generators
// ---------------------------------------------------------------------------

std::pair<Matrix, Matrix> lasso_matrices(int tau, int lambda, int m) {
  if (tau < 0 || lambda < 1 || m < 1) {
    throw std::invalid_argument("lasso_matrices: need tau >= 0, lambda >= 1");
  }
  const int q = tau + lambda;
  Matrix Pbar = Matrix::Zero(q, q);
  for (int i = 0; i + 1 < q; ++i) Pbar(i, i + 1) = 1.0;
  Pbar(q - 1, tau) = 1.0;
  Matrix P = Matrix::Zero(m * q, m * q);
  Matrix H = Matrix::Zero(m, m * q);
  for (int j = 0; j < m; ++j) {
    P.block(j * q, j * q, q, q) = Pbar;
    H(j, j * q) = 1.0;
  }
  return {P, H};
}

LassoSpec LassoSpec::lasso(int tau, int lambda, int m) {
  auto [P, H] = lasso_matrices(tau, lambda, m);
  LassoSpec s;
  s.tau = tau;
  s.lambda = lambda;
  s.P = std::move(P);
  s.H = std::move(H);
  return s;
}

LassoSpec LassoSpec::custom(Matrix P, Matrix H, int tau, int lambda,
                            const Tolerances& tol) {
  if (P.rows() != P.cols() || H.cols() != P.rows() || tau < 0 || lambda < 1) {
    throw std::invalid_argument("LassoSpec: inconsistent P, H, tau, lambda");
  }
  require_finite(P, "P");
  require_finite(H, "H");
  if (!verify_eventually_periodic(P, tau, lambda, tol.periodic).holds) {
    throw std::invalid_argument("LassoSpec: P^tau != P^(tau+lambda)");
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(H);
  qr.setThreshold(tol.rank);
  if (qr.rank() != H.rows()) {
    throw std::invalid_argument("LassoSpec: H is not surjective");
  }
  LassoSpec s;
  s.tau = tau;
  s.lambda = lambda;
  s.P = std::move(P);
  s.H = std::move(H);
  return s;
}

PeriodicityReport verify_eventually_periodic(const Matrix& P, int tau,
                                             int lambda, double tol) {
  PeriodicityReport r;
  auto holds = [&](int t, int l) {
    return inf_norm(mat_power(P, t) - mat_power(P, t + l)) <= tol;
  };
  r.holds = holds(tau, lambda);
  if (!r.holds) return r;
  for (int l = 1; l <= lambda; ++l) {
    if (lambda % l != 0) continue;
    for (int t = 0; t <= tau; ++t) {
      if (holds(t, l)) {
        if (r.min_lambda < 0 || l < r.min_lambda ||
            (l == r.min_lambda && t < r.min_tau)) {
          r.min_tau = t;
          r.min_lambda = l;
        }
        break;
      }
    }
    if (r.min_lambda > 0) break;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Reachability blocks
// ---------------------------------------------------------------------------

namespace {

// Rows of S_xu pulled back through step t of the lassoed dynamics:
// Gx A^t x + (Gx V_t + Gu H P^t) v <= f - h_t.
struct ReachBlock {
  Matrix gx;  // Gx A^t, zero for t >= nu
  Matrix gv;
  Vector f;
};

std::vector<ReachBlock> reach_blocks(const LinearSystem& sys,
                                     const HPolytope& S, const LassoSpec& spec,
                                     int nu, const Tolerances& tol) {
  const int n = sys.n();
  const int m = sys.m();
  if (spec.m() != m) throw std::invalid_argument("spec input count != m");
  if (S.dim() != n + m) throw std::invalid_argument("S_xu dim != n + m");
  const int q = spec.q();
  const int total = nu + q;
  const Matrix Gx = S.G().leftCols(n);
  const Matrix Gu = S.G().rightCols(m);

  std::vector<Matrix> AiB(nu);  // A^i B
  if (nu > 0) AiB[0] = sys.B;
  for (int i = 1; i < nu; ++i) AiB[i] = sys.A * AiB[i - 1];
  std::vector<Matrix> HP(total);  // H P^t
  HP[0] = spec.H;
  for (int t = 1; t < total; ++t) HP[t] = HP[t - 1] * spec.P;

  // Erosion offsets h_t(j) = support(Wbar_t, row j of Gx).
  const bool disturbed = sys.has_disturbance();
  Vector h = Vector::Zero(S.rows());
  Matrix dist_map = sys.E;  // A^{t-1} E

  std::vector<ReachBlock> blocks;
  blocks.reserve(total);
  Matrix At = Matrix::Identity(n, n);
  for (int t = 0; t < total; ++t) {
    if (t >= 1 && t <= nu && disturbed) {
      const Matrix dirs = Gx * dist_map;  // one direction per row
      for (int j = 0; j < S.rows(); ++j) {
        if (dirs.row(j).cwiseAbs().maxCoeff() == 0.0) continue;
        h(j) += support(sys.W, dirs.row(j).transpose());
      }
      dist_map = sys.A * dist_map;
    }
    ReachBlock b;
    b.gx = t < nu ? Matrix(Gx * At) : Matrix::Zero(S.rows(), n);
    Matrix V = Matrix::Zero(n, spec.v_dim());
    for (int i = 1; i <= std::min(t, nu); ++i) V += AiB[i - 1] * HP[t - i];
    b.gv = Gx * V + Gu * HP[t];
    b.f = S.f() - h;
    blocks.push_back(std::move(b));
    if (t < nu) At = sys.A * At;
  }
  (void)tol;
  return blocks;
}

// Nilpotent form of (sys, Sxu), transforming when needed.
Nilpotentized nilpotent_form(const LinearSystem& sys, const HPolytope& Sxu,
                             const Tolerances& tol) {
  const int nu = nilpotency_index(sys.A, tol.nilpotent);
  if (nu >= 0) return Nilpotentized{sys, Sxu, nu};
  return nilpotentize(sys, Sxu, tol);
}

}  // namespace

std::string fingerprint(const HPolytope& p) {
  // FNV-1a over the raw bytes of dimension, G and f.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  const int dims[2] = {p.rows(), p.dim()};
  mix(dims, sizeof(dims));
  for (int r = 0; r < p.rows(); ++r) {
    for (int c = 0; c < p.dim(); ++c) {
      const double g = p.G()(r, c);
      mix(&g, sizeof(g));
    }
    const double f = p.f()(r);
    mix(&f, sizeof(f));
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ImplicitRCIS implicit_rcis(const LinearSystem& sys, const HPolytope& Sxu,
                           const LassoSpec& spec, const Tolerances& tol) {
  const Nilpotentized nz = nilpotent_form(sys, Sxu, tol);
  const LinearSystem& s = nz.system;
  const int n = s.n();
  const auto blocks = reach_blocks(s, nz.safe_set, spec, nz.nu, tol);
  const int k = nz.safe_set.rows();
  const int total = static_cast<int>(blocks.size());
  Matrix G(k * total, n + spec.v_dim());
  Vector f(k * total);
  for (int t = 0; t < total; ++t) {
    G.block(t * k, 0, k, n) = blocks[t].gx;
    G.block(t * k, n, k, spec.v_dim()) = blocks[t].gv;
    f.segment(t * k, k) = blocks[t].f;
  }
  ImplicitRCIS ir;
  ir.polytope = HPolytope(std::move(G), std::move(f));
  ir.spec = spec;
  ir.n = n;
  ir.nu = nz.nu;
  ir.K = s.gain();
  ir.blocks = total;
  ir.fingerprint = fingerprint(Sxu);
  ir.empty = is_empty(ir.polytope);
  return ir;
}

HPolytope explicit_rcis(const ImplicitRCIS& ir, const ProjectOptions& opt) {
  if (ir.empty) return HPolytope::empty(ir.n);
  return project(ir.polytope, ir.n, opt);
}

InvarianceReport invariance_check(const LinearSystem& sys, const HPolytope& Sxu,
                                  const HPolytope& C, int samples,
                                  std::uint64_t seed, double slack) {
  InvarianceReport rep;
  const int n = sys.n();
  const int m = sys.m();
  std::vector<Vector> wv;
  if (sys.has_disturbance()) {
    wv = enumerate_vertices(sys.W);
  } else {
    wv.push_back(Vector::Zero(sys.d()));
  }
  const Matrix Sx = Sxu.G().leftCols(n);
  const Matrix Su = Sxu.G().rightCols(m);
  const Matrix CB = C.G() * sys.B;
  const int rows = Sxu.rows() + C.rows() * static_cast<int>(wv.size());
  for (const Vector& x : sample_points(C, samples, seed)) {
    ++rep.samples;
    Matrix G(rows, m);
    Vector f(rows);
    G.topRows(Sxu.rows()) = Su;
    f.head(Sxu.rows()) = Sxu.f() - Sx * x;
    int r = Sxu.rows();
    for (const Vector& w : wv) {
      G.middleRows(r, C.rows()) = CB;
      f.segment(r, C.rows()) = C.f() - C.G() * (sys.A * x + sys.E * w);
      r += C.rows();
    }
    for (int i = 0; i < rows; ++i) f(i) += slack * std::max(G.row(i).norm(), 1.0);
    if (!find_feasible_point(G, f).optimal()) {
      ++rep.violations;
      rep.violating_points.push_back(x);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Hierarchy and big-M union
// ---------------------------------------------------------------------------

std::vector<std::pair<int, int>> theta(int q) {
  if (q < 1) throw std::invalid_argument("theta: q must be >= 1");
  std::vector<std::pair<int, int>> out;
  for (int tau = 0; tau < q; ++tau) out.emplace_back(tau, q - tau);
  return out;
}

BigMUnion make_bigm(const std::vector<ImplicitRCIS>& components) {
  if (components.empty()) throw std::invalid_argument("make_bigm: no parts");
  BigMUnion bu;
  bu.components = components;
  bu.n = components[0].n;
  bu.v_dim = components[0].v_dim();
  const int N = static_cast<int>(components.size());
  const int dz = bu.n + bu.v_dim;
  int max_rows = 0;
  for (const auto& c : components) {
    if (c.n != bu.n || c.v_dim() != bu.v_dim) {
      throw std::invalid_argument("make_bigm: components differ in shape");
    }
    max_rows = std::max(max_rows, c.polytope.rows());
  }

  // Global bounding box of the nonempty components.
  Vector lo = Vector::Constant(dz, std::numeric_limits<double>::infinity());
  Vector hi = -lo;
  bool any = false;
  for (const auto& c : components) {
    if (c.empty) continue;
    const HyperBox b = bounding_box(c.polytope);
    lo = lo.cwiseMin(b.lower);
    hi = hi.cwiseMax(b.upper);
    any = true;
  }
  bu.M = Matrix::Zero(N, max_rows);
  if (!any) {
    bu.lifted = HPolytope::empty(dz + N);
    return bu;
  }

  int total = 2 * N + 2;
  for (const auto& c : components) total += c.empty ? 1 : c.polytope.rows();
  Matrix G = Matrix::Zero(total, dz + N);
  Vector f = Vector::Zero(total);
  int r = 0;
  for (int i = 0; i < N; ++i) {
    const auto& c = components[i];
    if (c.empty) {
      G(r, dz + i) = 1.0;  // zeta_i <= 0
      f(r++) = 0.0;
      continue;
    }
    for (int j = 0; j < c.polytope.rows(); ++j) {
      const auto g = c.polytope.G().row(j);
      double h = 0.0;
      for (int k = 0; k < dz; ++k) h += g(k) > 0 ? g(k) * hi(k) : g(k) * lo(k);
      const double Mij = std::max(0.0, h - c.polytope.f()(j)) * 1.1;
      bu.M(i, j) = Mij;
      G.block(r, 0, 1, dz) = g;
      G(r, dz + i) = Mij;
      f(r++) = c.polytope.f()(j) + Mij;
    }
  }
  for (int i = 0; i < N; ++i) {
    G(r, dz + i) = 1.0;
    G(r + 1, dz + i) = -1.0;
  }
  f(r) = 1.0;
  f(r + 1) = -1.0;
  r += 2;
  for (int i = 0; i < N; ++i) {
    G(r, dz + i) = -1.0;
    f(r++) = 0.0;
    G(r, dz + i) = 1.0;
    f(r++) = 1.0;
  }
  bu.lifted = HPolytope(std::move(G), std::move(f));
  return bu;
}

Hierarchy hierarchy(const LinearSystem& sys, const HPolytope& Sxu, int q,
                    const Tolerances& tol) {
  Hierarchy h;
  h.q = q;
  for (auto [tau, lambda] : theta(q)) {
    h.components.push_back(
        implicit_rcis(sys, Sxu, LassoSpec::lasso(tau, lambda, sys.m()), tol));
  }
  h.bigm = make_bigm(h.components);
  return h;
}

bool member_bigm(const BigMUnion& bu, const Vector& x, const Vector& v) {
  const int N = bu.count();
  Vector z = Vector::Zero(bu.n + bu.v_dim + N);
  z.head(bu.n) = x;
  z.segment(bu.n, bu.v_dim) = v;
  for (int i = 0; i < N; ++i) {
    z.tail(N).setZero();
    z(bu.n + bu.v_dim + i) = 1.0;
    if (bu.lifted.contains_point(z, 1e-9)) return true;
  }
  return false;
}

bool member_bigm_state(const BigMUnion& bu, const Vector& x) {
  const int N = bu.count();
  const HPolytope& L = bu.lifted;
  const Matrix Gv = L.G().middleCols(bu.n, bu.v_dim);
  const Vector base = L.f() - L.G().leftCols(bu.n) * x;
  for (int i = 0; i < N; ++i) {
    Vector f = base - L.G().col(bu.n + bu.v_dim + i);
    for (int r = 0; r < L.rows(); ++r) f(r) += 1e-9 * L.G().row(r).norm();
    if (find_feasible_point(Gv, f).optimal()) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Safe hyper-boxes
// ---------------------------------------------------------------------------

std::string to_string(BoxMode m) {
  switch (m) {
    case BoxMode::kGeometricMean:
      return "geometric-mean";
    case BoxMode::kSumWidth:
      return "sum-width";
    case BoxMode::kFeasibility:
      return "feasibility";
  }
  return "?";
}

std::string to_string(BoxStatus s) {
  switch (s) {
    case BoxStatus::kOptimal:
      return "optimal";
    case BoxStatus::kInfeasible:
      return "infeasible";
    case BoxStatus::kDegenerateBox:
      return "degenerate-box";
  }
  return "?";
}

HPolytope box_program(const LinearSystem& sys, const HPolytope& Sxu,
                      const LassoSpec& spec, const Tolerances& tol) {
  const int nu = nilpotency_index(sys.A, tol.nilpotent);
  if (nu < 0) throw std::invalid_argument("box_program: A must be nilpotent");
  const int n = sys.n();
  const int vd = spec.v_dim();
  const auto blocks = reach_blocks(sys, Sxu, spec, nu, tol);
  const int k = Sxu.rows();
  const int total = static_cast<int>(blocks.size());
  Matrix G = Matrix::Zero(k * total + n, 2 * n + vd);
  Vector f = Vector::Zero(k * total + n);
  for (int t = 0; t < total; ++t) {
    // max over the box of a'x is sum(a+ * upper) - sum(a- * lower).
    G.block(t * k, 0, k, n) = blocks[t].gx.cwiseMin(0.0);
    G.block(t * k, n, k, n) = blocks[t].gx.cwiseMax(0.0);
    G.block(t * k, 2 * n, k, vd) = blocks[t].gv;
    f.segment(t * k, k) = blocks[t].f;
  }
  const int r = k * total;
  G.block(r, 0, n, n) = Matrix::Identity(n, n);
  G.block(r, n, n, n) = -Matrix::Identity(n, n);
  return HPolytope(std::move(G), std::move(f));
}

namespace {

double log_width_sum(const Vector& z, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = z(n + i) - z(i);
    if (w <= 0.0) return -std::numeric_limits<double>::infinity();
    s += std::log(w);
  }
  return s;
}

// One Frank-Wolfe step with exact line search on the concave log-width sum.
bool frank_wolfe_step(const HPolytope& CB, int n, Vector& z) {
  const int dim = CB.dim();
  Vector grad = Vector::Zero(dim);
  for (int i = 0; i < n; ++i) {
    const double w = z(n + i) - z(i);
    grad(i) = -1.0 / w;
    grad(n + i) = 1.0 / w;
  }
  LpOutcome lp = solve_lp(LpProblem{grad, CB.G(), CB.f(), Sense::kMaximize});
  if (!lp.optimal()) return false;
  const Vector d = lp.point - z;
  if (grad.dot(d) <= 1e-12) return false;
  // Golden-section search on [0, 1].
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.0, b = 1.0;
  double c = b - phi * (b - a), e = a + phi * (b - a);
  double fc = log_width_sum(z + c * d, n), fe = log_width_sum(z + e * d, n);
  for (int it = 0; it < 60; ++it) {
    if (fc < fe) {
      a = c;
      c = e;
      fc = fe;
      e = a + phi * (b - a);
      fe = log_width_sum(z + e * d, n);
    } else {
      b = e;
      e = c;
      fe = fc;
      c = b - phi * (b - a);
      fc = log_width_sum(z + c * d, n);
    }
  }
  const double alpha = 0.5 * (a + b);
  const Vector cand = z + alpha * d;
  if (log_width_sum(cand, n) > log_width_sum(z, n)) {
    z = cand;
    return true;
  }
  return false;
}

// Barrier method for max sum log(w_i) over CB from a strictly interior z.
int barrier_newton(const HPolytope& CB, int n, Vector& z) {
  const int dim = CB.dim();
  const Matrix& C = CB.G();
  const Vector& d = CB.f();
  const int k = CB.rows();
  // Objective -t*sum log w - sum log s, minimized for increasing t.
  auto value = [&](const Vector& y, double t) {
    const Vector s = d - C * y;
    if (s.minCoeff() <= 0.0) return std::numeric_limits<double>::infinity();
    const double lw = log_width_sum(y, n);
    if (!std::isfinite(lw)) return std::numeric_limits<double>::infinity();
    return -t * lw - s.array().log().sum();
  };
  int steps = 0;
  double t = 1.0;
  double prev = log_width_sum(z, n);
  for (int outer = 0; outer < 20; ++outer) {
    for (int inner = 0; inner < 100; ++inner) {
      const Vector s = d - C * z;
      const Vector inv_s = s.cwiseInverse();
      Vector grad = C.transpose() * inv_s;
      Matrix hess = C.transpose() * inv_s.cwiseAbs2().asDiagonal() * C;
      for (int i = 0; i < n; ++i) {
        const double w = z(n + i) - z(i);
        grad(i) += t / w;
        grad(n + i) -= t / w;
        const double h = t / (w * w);
        hess(i, i) += h;
        hess(n + i, n + i) += h;
        hess(i, n + i) -= h;
        hess(n + i, i) -= h;
      }
      hess += 1e-12 * Matrix::Identity(dim, dim);
      const Vector step = -hess.ldlt().solve(grad);
      const double decrement = -grad.dot(step);
      ++steps;
      if (!(decrement > 2e-10)) break;
      double alpha = 1.0;
      const double v0 = value(z, t);
      while (alpha > 1e-12 && value(z + alpha * step, t) >
                                  v0 - 0.25 * alpha * decrement) {
        alpha *= 0.5;
      }
      if (alpha <= 1e-12) break;
      z += alpha * step;
    }
    const double cur = log_width_sum(z, n);
    const bool small_gap = static_cast<double>(k) / t < 1e-9;
    if (std::abs(cur - prev) <= 1e-8 * std::max(1.0, std::abs(cur)) &&
        outer > 0) {
      break;
    }
    if (small_gap) break;
    prev = cur;
    t *= 10.0;
  }
  return steps;
}

}  // namespace

SafeBoxResult safe_box(const LinearSystem& sys, const HPolytope& Sxu,
                       const LassoSpec& spec, BoxMode mode,
                       const HyperBox& fixed, const Tolerances& tol) {
  const Nilpotentized nz = nilpotent_form(sys, Sxu, tol);
  const HPolytope CB = box_program(nz.system, nz.safe_set, spec, tol);
  const int n = sys.n();
  const int vd = spec.v_dim();
  SafeBoxResult res;

  if (mode == BoxMode::kFeasibility) {
    if (fixed.dim() != n) throw std::invalid_argument("safe_box: fixed box");
    const Vector f = CB.f() - CB.G().leftCols(n) * fixed.lower -
                     CB.G().middleCols(n, n) * fixed.upper;
    LpOutcome lp = find_feasible_point(CB.G().rightCols(vd), f, tol);
    if (lp.optimal()) {
      res.status = BoxStatus::kOptimal;
      res.box = fixed;
      res.v = lp.point;
    }
    return res;
  }

  Vector widths_c = Vector::Zero(CB.dim());
  widths_c.segment(0, n).setConstant(-1.0);
  widths_c.segment(n, n).setConstant(1.0);
  LpOutcome lp =
      solve_lp(LpProblem{widths_c, CB.G(), CB.f(), Sense::kMaximize}, tol);
  if (lp.status == LpStatus::kInfeasible) return res;
  if (lp.status == LpStatus::kUnbounded) {
    throw UnboundedError("safe_box: box program is unbounded");
  }
  Vector z = lp.point;
  auto finish = [&](const Vector& y) {
    res.box = HyperBox(y.head(n), y.segment(n, n).cwiseMax(y.head(n)));
    res.v = y.tail(vd);
    res.status = res.box.widths().minCoeff() <= 1e-9 ? BoxStatus::kDegenerateBox
                                                     : BoxStatus::kOptimal;
  };
  if (mode == BoxMode::kSumWidth) {
    finish(z);
    res.objective = res.box.widths().sum();
    return res;
  }
  // Strictly interior start: max s with C z + s |C_j| <= d and widths >= s.
  const int k = CB.rows();
  Matrix G = Matrix::Zero(k + n + 1, CB.dim() + 1);
  Vector f = Vector::Zero(k + n + 1);
  G.topLeftCorner(k, CB.dim()) = CB.G();
  for (int j = 0; j < k; ++j) G(j, CB.dim()) = CB.G().row(j).norm();
  f.head(k) = CB.f();
  for (int i = 0; i < n; ++i) {
    G(k + i, i) = 1.0;
    G(k + i, n + i) = -1.0;
    G(k + i, CB.dim()) = 1.0;
  }
  G(k + n, CB.dim()) = 1.0;
  f(k + n) = 1.0;
  Vector c = Vector::Zero(CB.dim() + 1);
  c(CB.dim()) = 1.0;
  LpOutcome inner = solve_lp(LpProblem{c, G, f, Sense::kMaximize}, tol);
  const bool interior = inner.optimal() && inner.point(CB.dim()) > 1e-9;
  if (interior) {
    Vector y = inner.point.head(CB.dim());
    res.newton_steps = barrier_newton(CB, n, y);
    if ((z.segment(n, n) - z.head(n)).minCoeff() <= 1e-9 ||
        log_width_sum(y, n) > log_width_sum(z, n)) {
      z = y;
    }
  } else if ((z.segment(n, n) - z.head(n)).minCoeff() <= 1e-9) {
    // No box of positive width in every coordinate.
    finish(z);
    res.status = BoxStatus::kDegenerateBox;
    return res;
  }
  // Polish (and the whole solve when C_B has no interior).
  for (int it = 0; it < 200; ++it) {
    const double before = log_width_sum(z, n);
    if (!frank_wolfe_step(CB, n, z)) break;
    if (log_width_sum(z, n) - before <= 1e-10 * std::max(1.0, std::abs(before))) {
      break;
    }
  }
  finish(z);
  res.objective = log_width_sum(z, n);
  return res;
}

}  // namespace cis
