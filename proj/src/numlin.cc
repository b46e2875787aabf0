#include "cis/numlin.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace cis {

const Tolerances& default_tolerances() {
  static const Tolerances kDefaults{};
  return kDefaults;
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
}

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
}

Matrix mat_power(const Matrix& m, int k) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("mat_power: matrix must be square");
  }
  if (k < 0) throw std::invalid_argument("mat_power: negative exponent");
  Matrix out = Matrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) out = out * m;
  return out;
}

double inf_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
  }
  return "unknown";
}

namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class RunResult { kOptimal, kUnbounded };

// Dense simplex tableau for  min d'y  s.t.  Ty = rhs, y >= 0.
// Row `rows_` holds reduced costs; the last column holds right-hand sides
// (and minus the objective value in the cost row).
class Tableau {
 public:
  Tableau(int rows, int cols)
      : t_(RowMatrix::Zero(rows + 1, cols + 1)),
        basis_(rows, -1),
        is_basic_(cols, 0),
        rows_(rows),
        cols_(cols) {}

  double& at(int i, int j) { return t_(i, j); }
  double& rhs(int i) { return t_(i, cols_); }
  double& cost(int j) { return t_(rows_, j); }
  double objective() const { return -t_(rows_, cols_); }
  int basis(int i) const { return basis_[i]; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  void set_basis(int row, int col) {
    if (basis_[row] >= 0) is_basic_[basis_[row]] = 0;
    basis_[row] = col;
    is_basic_[col] = 1;
  }

  void pivot(int r, int c) {
    const double inv = 1.0 / t_(r, c);
    t_.row(r) *= inv;
    t_(r, c) = 1.0;
    for (int i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      const double a = t_(i, c);
      if (a != 0.0) {
        t_.row(i) -= a * t_.row(r);
        t_(i, c) = 0.0;
      }
    }
    for (int i = 0; i < rows_; ++i) {
      if (t_(i, cols_) < 0.0 && t_(i, cols_) > -1e-13) t_(i, cols_) = 0.0;
    }
    set_basis(r, c);
  }

  RunResult run(const std::vector<char>& allowed, long& budget,
                const Tolerances& tol) {
    int degenerate = 0;
    bool bland = false;
    for (;;) {
      int enter = -1;
      double best = -tol.reduced_cost;
      for (int j = 0; j < cols_; ++j) {
        if (!allowed[j] || is_basic_[j]) continue;
        const double d = t_(rows_, j);
        if (d < best) {
          enter = j;
          if (bland) break;
          best = d;
        }
      }
      if (enter < 0) return RunResult::kOptimal;

      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      double best_piv = 0.0;
      for (int i = 0; i < rows_; ++i) {
        const double a = t_(i, enter);
        if (a <= tol.pivot) continue;
        const double ratio = std::max(t_(i, cols_), 0.0) / a;
        const double slack = 1e-12 * std::max(1.0, best_ratio);
        if (leave < 0 || ratio < best_ratio - slack) {
          leave = i;
          best_ratio = ratio;
          best_piv = a;
        } else if (ratio <= best_ratio + slack) {
          const bool take = bland ? basis_[i] < basis_[leave] : a > best_piv;
          if (take) {
            leave = i;
            best_ratio = std::min(ratio, best_ratio);
            best_piv = a;
          }
        }
      }
      if (leave < 0) return RunResult::kUnbounded;

      if (best_ratio <= 1e-12) {
        if (++degenerate > tol.degenerate_pivots_before_bland) bland = true;
      } else {
        degenerate = 0;
        bland = false;
      }
      pivot(leave, enter);
      if (--budget < 0) {
        throw NumericalFailure("simplex: pivot budget exhausted");
      }
    }
  }

 private:
  RowMatrix t_;
  std::vector<int> basis_;
  std::vector<char> is_basic_;
  int rows_;
  int cols_;
};

enum class DualStatus { kOptimal, kInfeasible, kUnbounded };

struct DualResult {
  DualStatus status;
  Vector x;  // primal point recovered from the simplex multipliers
  int iterations = 0;
};

// Solves  min f'y  s.t.  G'y = b, y >= 0  whose LP dual is
// max b'x s.t. Gx <= f. The primal x is read off the final multipliers.
DualResult solve_dual_standard_form(const Matrix& G, const Vector& f,
                                    const Vector& b, long& budget,
                                    const Tolerances& tol) {
  const int k = static_cast<int>(G.rows());
  const int n = static_cast<int>(G.cols());
  Tableau tb(n, k + n);
  std::vector<double> sigma(n, 1.0);
  for (int i = 0; i < n; ++i) {
    sigma[i] = b(i) < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < k; ++j) tb.at(i, j) = sigma[i] * G(j, i);
    tb.at(i, k + i) = 1.0;
    tb.rhs(i) = sigma[i] * b(i);
    tb.set_basis(i, k + i);
  }
  // Phase 1: minimize the sum of artificials.
  for (int j = 0; j < k; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += tb.at(i, j);
    tb.cost(j) = -s;
  }
  {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += tb.rhs(i);
    tb.cost(k + n) = -s;
  }
  const long start_budget = budget;
  std::vector<char> allowed(k + n, 0);
  std::fill(allowed.begin(), allowed.begin() + k, 1);
  tb.run(allowed, budget, tol);
  const double bscale = 1.0 + (n > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
  if (tb.objective() > tol.feasibility * bscale) {
    return {DualStatus::kInfeasible, Vector(),
            static_cast<int>(start_budget - budget)};
  }
  // Drive leftover artificials out of the basis where possible.
  for (int i = 0; i < n; ++i) {
    if (tb.basis(i) < k) continue;
    int best = -1;
    double best_abs = 1e-9;
    for (int j = 0; j < k; ++j) {
      const double a = std::abs(tb.at(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = j;
      }
    }
    if (best >= 0) {
      tb.rhs(i) = 0.0;
      tb.pivot(i, best);
    }
  }
  // Phase 2 cost row.
  auto cost_of = [&](int col) { return col < k ? f(col) : 0.0; };
  for (int j = 0; j <= k + n; ++j) {
    double d = j < k + n ? cost_of(j) : 0.0;
    for (int i = 0; i < n; ++i) {
      const double cb = cost_of(tb.basis(i));
      if (cb != 0.0) d -= cb * (j < k + n ? tb.at(i, j) : tb.rhs(i));
    }
    tb.cost(j) = d;
  }
  if (tb.run(allowed, budget, tol) == RunResult::kUnbounded) {
    return {DualStatus::kUnbounded, Vector(),
            static_cast<int>(start_budget - budget)};
  }
  Vector x(n);
  for (int i = 0; i < n; ++i) x(i) = -sigma[i] * tb.cost(k + i);

  // Polish from the optimal basis when it is a proper vertex.
  std::vector<int> active;
  for (int i = 0; i < n; ++i) {
    if (tb.basis(i) < k) active.push_back(tb.basis(i));
  }
  if (static_cast<int>(active.size()) == n && n > 0) {
    Matrix Gb(n, n);
    Vector fb(n);
    for (int i = 0; i < n; ++i) {
      Gb.row(i) = G.row(active[i]);
      fb(i) = f(active[i]);
    }
    Eigen::FullPivLU<Matrix> lu(Gb);
    if (lu.rank() == n) {
      const Vector xp = lu.solve(fb);
      const double vx = (G * x - f).maxCoeff();
      const double vp = (G * xp - f).maxCoeff();
      if (xp.allFinite() && vp <= std::max(vx, 0.0) + 1e-14) x = xp;
    }
  }
  return {DualStatus::kOptimal, x, static_cast<int>(start_budget - budget)};
}

}  // namespace

LpOutcome solve_lp(const LpProblem& p, const Tolerances& tol) {
  const auto n = p.G.cols();
  const auto k = p.G.rows();
  if (p.c.size() != n || p.f.size() != k) {
    throw std::invalid_argument("solve_lp: inconsistent dimensions");
  }
  require_finite(p.G, "solve_lp G");
  require_finite(p.f, "solve_lp f");
  require_finite(p.c, "solve_lp c");

  const Vector cmin = p.sense == Sense::kMaximize ? Vector(-p.c) : p.c;
  LpOutcome out;

  // Scale rows to unit norm; drop trivially satisfied zero rows.
  std::vector<int> keep;
  keep.reserve(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double s = p.G.row(j).norm();
    if (s == 0.0) {
      if (p.f(j) < -tol.feasibility) {
        out.status = LpStatus::kInfeasible;
        return out;
      }
      continue;
    }
    keep.push_back(static_cast<int>(j));
  }
  const int rows = static_cast<int>(keep.size());
  if (rows == 0) {
    if (cmin.size() == 0 || cmin.cwiseAbs().maxCoeff() == 0.0) {
      out.status = LpStatus::kOptimal;
      out.point = Vector::Zero(n);
      out.value = 0.0;
    } else {
      out.status = LpStatus::kUnbounded;
    }
    return out;
  }
  Matrix G(rows, n);
  Vector f(rows);
  for (int r = 0; r < rows; ++r) {
    const double s = p.G.row(keep[r]).norm();
    G.row(r) = p.G.row(keep[r]) / s;
    f(r) = p.f(keep[r]) / s;
  }
  if (n == 0) {
    out.status = LpStatus::kOptimal;
    out.point = Vector::Zero(0);
    return out;
  }

  long budget = 10L * (rows + n) + 1000;
  // Primal min c'x s.t. Gx <= f has dual  max -f'y s.t. G'y = -c, y >= 0.
  DualResult d = solve_dual_standard_form(G, f, -cmin, budget, tol);
  out.iterations = d.iterations;
  switch (d.status) {
    case DualStatus::kOptimal:
      out.status = LpStatus::kOptimal;
      out.point = d.x;
      out.value = p.c.dot(d.x);
      break;
    case DualStatus::kUnbounded:
      out.status = LpStatus::kInfeasible;
      break;
    case DualStatus::kInfeasible: {
      DualResult feas =
          solve_dual_standard_form(G, f, Vector::Zero(n), budget, tol);
      out.iterations += feas.iterations;
      out.status = feas.status == DualStatus::kOptimal ? LpStatus::kUnbounded
                                                       : LpStatus::kInfeasible;
      break;
    }
  }
  if (out.optimal()) {
    const double viol = (G * out.point - f).maxCoeff();
    if (viol > 1e-6) {
      throw NumericalFailure("solve_lp: returned point violates constraints");
    }
  }
  return out;
}

LpOutcome find_feasible_point(const Matrix& G, const Vector& f,
                              const Tolerances& tol) {
  // max s  s.t.  Gx + s <= f, s <= 1. Always feasible and bounded, which
  // keeps the dual away from the all-degenerate zero-objective case.
  const auto n = G.cols();
  const auto k = G.rows();
  if (f.size() != k) {
    throw std::invalid_argument("find_feasible_point: inconsistent dimensions");
  }
  LpProblem lp;
  lp.sense = Sense::kMaximize;
  lp.c = Vector::Zero(n + 1);
  lp.c(n) = 1.0;
  lp.G = Matrix::Zero(k + 1, n + 1);
  lp.G.topLeftCorner(k, n) = G;
  lp.G.col(n).head(k).setOnes();
  lp.G(k, n) = 1.0;
  lp.f.resize(k + 1);
  lp.f << f, 1.0;
  const LpOutcome margin = solve_lp(lp, tol);
  LpOutcome out;
  out.iterations = margin.iterations;
  if (!margin.optimal() || margin.value < -tol.feasibility) {
    out.status = LpStatus::kInfeasible;
    return out;
  }
  out.status = LpStatus::kOptimal;
  out.point = margin.point.head(n);
  return out;
}

double kkt_residual(const QpProblem& p, const Vector& z, const Vector& mu) {
  Vector r = p.Q * z + p.c;
  if (p.G.rows() > 0) r += p.G.transpose() * mu;
  return r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
}

QpOutcome solve_qp(const QpProblem& p, const Tolerances& tol) {
  const auto n = p.Q.rows();
  const auto k = p.G.rows();
  if (p.Q.cols() != n || p.c.size() != n || p.G.cols() != n ||
      p.f.size() != k) {
    throw std::invalid_argument("solve_qp: inconsistent dimensions");
  }
  require_finite(p.Q, "solve_qp Q");
  require_finite(p.c, "solve_qp c");
  require_finite(p.G, "solve_qp G");
  require_finite(p.f, "solve_qp f");

  const double qscale = std::max(1.0, inf_norm(p.Q));
  if (inf_norm(p.Q - p.Q.transpose()) > 1e-9 * qscale) {
    throw std::invalid_argument("solve_qp: Q is not symmetric");
  }
  Matrix Q = 0.5 * (p.Q + p.Q.transpose());
  double min_eig = 0.0;
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(Q, Eigen::EigenvaluesOnly);
    min_eig = es.eigenvalues().minCoeff();
  }
  if (min_eig < tol.psd_floor * qscale) {
    throw std::invalid_argument("solve_qp: Q is not positive semidefinite");
  }
  if (min_eig < tol.qp_regularization) {
    Q += tol.qp_regularization * Matrix::Identity(n, n);
  }

  QpOutcome out;
  LpOutcome start = find_feasible_point(p.G, p.f, tol);
  out.iterations = start.iterations;
  if (!start.optimal()) {
    out.status = QpStatus::kInfeasible;
    return out;
  }
  Vector z = start.point;
  std::vector<int> working;
  std::vector<char> in_working(k, 0);
  Vector row_norm(k);
  for (Eigen::Index i = 0; i < k; ++i) row_norm(i) = p.G.row(i).norm();

  Vector mu_w;
  const long budget = 10L * (k + n) + 1000;
  long it = 0;
  for (;; ++it) {
    if (it > budget) throw NumericalFailure("solve_qp: iteration budget");
    const int w = static_cast<int>(working.size());
    Matrix kkt = Matrix::Zero(n + w, n + w);
    kkt.topLeftCorner(n, n) = Q;
    for (int a = 0; a < w; ++a) {
      kkt.block(n + a, 0, 1, n) = p.G.row(working[a]);
      kkt.block(0, n + a, n, 1) = p.G.row(working[a]).transpose();
    }
    Vector rhs = Vector::Zero(n + w);
    rhs.head(n) = -(Q * z + p.c);
    const Vector sol = kkt.fullPivLu().solve(rhs);
    const Vector step = sol.head(n);
    mu_w = sol.tail(w);

    if (step.cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + z.cwiseAbs().maxCoeff())) {
      int drop = -1;
      double most_negative = -1e-12 * qscale;
      for (int a = 0; a < w; ++a) {
        if (mu_w(a) < most_negative) {
          most_negative = mu_w(a);
          drop = a;
        }
      }
      if (drop < 0) break;
      in_working[working[drop]] = 0;
      working.erase(working.begin() + drop);
      continue;
    }

    double alpha = 1.0;
    int blocking = -1;
    const double step_norm = step.norm();
    for (Eigen::Index i = 0; i < k; ++i) {
      if (in_working[i]) continue;
      const double ap = p.G.row(i).dot(step);
      if (ap <= 1e-12 * row_norm(i) * step_norm) continue;
      const double room = std::max(p.f(i) - p.G.row(i).dot(z), 0.0);
      const double a = room / ap;
      if (a < alpha) {
        alpha = a;
        blocking = static_cast<int>(i);
      }
    }
    z += alpha * step;
    if (blocking >= 0) {
      working.push_back(blocking);
      in_working[blocking] = 1;
    }
  }

  out.status = QpStatus::kOptimal;
  out.point = z;
  out.multipliers = Vector::Zero(k);
  for (std::size_t a = 0; a < working.size(); ++a) {
    out.multipliers(working[a]) = std::max(mu_w(a), 0.0);
  }
  out.value = 0.5 * z.dot(p.Q * z) + p.c.dot(z) + p.constant;
  out.kkt_residual = kkt_residual(p, z, out.multipliers);
  out.iterations += static_cast<int>(it);
  return out;
}

}  // namespace cis
