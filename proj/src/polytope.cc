#include "cis/polytope.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <map>
#include <random>

namespace cis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool zero_row(const Matrix& G, Eigen::Index r) {
  return G.cols() == 0 || G.row(r).cwiseAbs().maxCoeff() <= 1e-14;
}

Vector random_unit(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector d(dim);
  double norm = 0.0;
  while (norm < 1e-12) {
    for (int i = 0; i < dim; ++i) d(i) = gauss(rng);
    norm = d.norm();
  }
  return d / norm;
}

// Largest t >= 0 with x + t d in P (inf when the ray never leaves P).
double ray_exit(const HPolytope& p, const Vector& x, const Vector& d,
                int* row = nullptr) {
  double best = kInf;
  for (int i = 0; i < p.rows(); ++i) {
    const double gd = p.G().row(i).dot(d);
    if (gd <= 1e-14 * p.G().row(i).norm() * d.norm()) continue;
    const double t = std::max(p.f()(i) - p.G().row(i).dot(x), 0.0) / gd;
    if (t < best) {
      best = t;
      if (row) *row = i;
    }
  }
  return best;
}

HPolytope dedup_rows(const HPolytope& p) {
  std::map<std::vector<long long>, int> seen;
  std::vector<int> keep;
  Vector f = p.f();
  for (int r = 0; r < p.rows(); ++r) {
    std::vector<long long> key(p.dim());
    for (int c = 0; c < p.dim(); ++c) {
      key[c] = std::llround(p.G()(r, c) * 1e10);
    }
    auto [it, inserted] = seen.emplace(std::move(key), r);
    if (inserted) {
      keep.push_back(r);
    } else {
      f(it->second) = std::min(f(it->second), p.f()(r));
    }
  }
  Matrix G(keep.size(), p.dim());
  Vector ff(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    G.row(i) = p.G().row(keep[i]);
    ff(i) = f(keep[i]);
  }
  return HPolytope(std::move(G), std::move(ff));
}

HPolytope select_rows(const HPolytope& p, const std::vector<int>& rows) {
  Matrix G(rows.size(), p.dim());
  Vector f(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    G.row(i) = p.G().row(rows[i]);
    f(i) = p.f()(rows[i]);
  }
  return HPolytope(std::move(G), std::move(f));
}

// Center and radius of the largest inscribed ball of a row-normalized P.
std::pair<Vector, double> chebyshev_center(const HPolytope& p,
                                           const Tolerances& tol) {
  const int n = p.dim();
  const int k = p.rows();
  Matrix G(k + 1, n + 1);
  Vector f(k + 1);
  G.topLeftCorner(k, n) = p.G();
  for (int i = 0; i < k; ++i) G(i, n) = p.G().row(i).norm();
  f.head(k) = p.f();
  G.row(k).setZero();
  G(k, n) = 1.0;  // cap the radius so the LP stays bounded
  f(k) = 1e6;
  Vector c = Vector::Zero(n + 1);
  c(n) = 1.0;
  LpOutcome out = solve_lp(LpProblem{c, G, f, Sense::kMaximize}, tol);
  if (!out.optimal()) return {Vector(), -1.0};
  return {out.point.head(n), out.point(n)};
}

// Redundancy removal for a bounded or unbounded polytope with interior,
// following Clarkson's output-sensitive scheme.
HPolytope clarkson(const HPolytope& p, const Vector& interior,
                   const Tolerances& tol) {
  const int k = p.rows();
  const int n = p.dim();
  std::vector<char> state(k, 0);  // 0 unknown, 1 kept, 2 redundant
  std::vector<int> kept;
  std::mt19937_64 rng(12345);
  for (int j = 0; j < k; ++j) {
    while (state[j] == 0) {
      Matrix G(kept.size() + 1, n);
      Vector f(kept.size() + 1);
      for (std::size_t i = 0; i < kept.size(); ++i) {
        G.row(i) = p.G().row(kept[i]);
        f(i) = p.f()(kept[i]);
      }
      G.row(kept.size()) = p.G().row(j);
      f(kept.size()) = p.f()(j) + 1.0;
      LpOutcome lp = solve_lp(
          LpProblem{p.G().row(j).transpose(), G, f, Sense::kMaximize}, tol);
      if (!lp.optimal() || lp.value <= p.f()(j) + tol.redundancy) {
        state[j] = 2;
        break;
      }
      // The ray from the interior point to the LP optimum leaves P through
      // an irredundant row.
      Vector target = lp.point;
      int hit = -1;
      for (int attempt = 0; attempt < 4 && hit < 0; ++attempt) {
        const Vector d = target - interior;
        double best = kInf;
        int best_row = -1;
        int ties = 0;
        for (int i = 0; i < k; ++i) {
          if (state[i] == 2) continue;
          const double gd = p.G().row(i).dot(d);
          if (gd <= 1e-14) continue;
          const double t = (p.f()(i) - p.G().row(i).dot(interior)) / gd;
          if (t < best - 1e-12 * std::max(1.0, std::abs(best))) {
            best = t;
            best_row = i;
            ties = 0;
          } else if (t <= best + 1e-12 * std::max(1.0, std::abs(best))) {
            ++ties;
          }
        }
        if (best_row >= 0 && (ties == 0 || attempt == 3)) {
          hit = best_row;
        } else {
          std::normal_distribution<double> gauss(0.0, 1e-7);
          for (int c = 0; c < n; ++c) target(c) += gauss(rng);
        }
      }
      if (hit < 0 || state[hit] == 1) {
        // Numerically undecidable; keeping the row is always safe.
        state[j] = 1;
        kept.push_back(j);
        break;
      }
      state[hit] = 1;
      kept.push_back(hit);
    }
  }
  std::sort(kept.begin(), kept.end());
  return select_rows(p, kept);
}

// One LP per row against all remaining rows.
HPolytope naive_redundancy(const HPolytope& p, const Tolerances& tol) {
  const int k = p.rows();
  const int n = p.dim();
  std::vector<char> active(k, 1);
  for (int j = 0; j < k; ++j) {
    Matrix G(k, n);
    Vector f(k);
    int r = 0;
    for (int i = 0; i < k; ++i) {
      if (!active[i] || i == j) continue;
      G.row(r) = p.G().row(i);
      f(r++) = p.f()(i);
    }
    G.row(r) = p.G().row(j);
    f(r++) = p.f()(j) + 1.0;
    LpOutcome lp = solve_lp(LpProblem{p.G().row(j).transpose(),
                                      G.topRows(r), f.head(r),
                                      Sense::kMaximize},
                            tol);
    if (!lp.optimal() || lp.value <= p.f()(j) + tol.redundancy) active[j] = 0;
  }
  std::vector<int> keep;
  for (int j = 0; j < k; ++j) {
    if (active[j]) keep.push_back(j);
  }
  return select_rows(p, keep);
}

}  // namespace

// ---------------------------------------------------------------------------
// HPolytope
// ---------------------------------------------------------------------------

HPolytope::HPolytope(Matrix G, Vector f) {
  if (G.rows() != f.size()) {
    throw std::invalid_argument("HPolytope: G and f row counts differ");
  }
  require_finite(G, "HPolytope G");
  require_finite(f, "HPolytope f");
  std::vector<int> keep;
  keep.reserve(G.rows());
  for (Eigen::Index r = 0; r < G.rows(); ++r) {
    if (zero_row(G, r) && f(r) >= 0.0) continue;
    keep.push_back(static_cast<int>(r));
  }
  if (static_cast<Eigen::Index>(keep.size()) == G.rows()) {
    G_ = std::move(G);
    f_ = std::move(f);
    return;
  }
  G_.resize(keep.size(), G.cols());
  f_.resize(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    G_.row(i) = G.row(keep[i]);
    f_(i) = f(keep[i]);
  }
}

HPolytope HPolytope::universe(int dim) {
  return HPolytope(Matrix(0, dim), Vector(0));
}

HPolytope HPolytope::empty(int dim) {
  return HPolytope(Matrix::Zero(1, dim), Vector::Constant(1, -1.0));
}

HPolytope HPolytope::box(const Vector& lower, const Vector& upper) {
  const auto n = lower.size();
  if (upper.size() != n) throw std::invalid_argument("box: size mismatch");
  Matrix G(2 * n, n);
  G << Matrix::Identity(n, n), -Matrix::Identity(n, n);
  Vector f(2 * n);
  f << upper, -lower;
  return HPolytope(std::move(G), std::move(f));
}

HPolytope HPolytope::point(const Vector& p) { return box(p, p); }

bool HPolytope::contains_point(const Vector& x, double tol) const {
  if (x.size() != dim()) {
    throw std::invalid_argument("contains_point: dimension mismatch");
  }
  for (int r = 0; r < rows(); ++r) {
    const double scale = std::max(G_.row(r).norm(), 1e-300);
    if ((G_.row(r).dot(x) - f_(r)) / scale > tol) return false;
  }
  return true;
}

HPolytope HPolytope::intersect(const HPolytope& other) const {
  if (other.dim() != dim()) {
    throw std::invalid_argument("intersect: dimension mismatch");
  }
  Matrix G(rows() + other.rows(), dim());
  G << G_, other.G_;
  Vector f(rows() + other.rows());
  f << f_, other.f_;
  return HPolytope(std::move(G), std::move(f));
}

HPolytope HPolytope::normalized() const {
  Matrix G = G_;
  Vector f = f_;
  for (int r = 0; r < rows(); ++r) {
    const double s = G.row(r).norm();
    if (s > 0.0) {
      G.row(r) /= s;
      f(r) /= s;
    }
  }
  return HPolytope(std::move(G), std::move(f));
}

HyperBox::HyperBox(Vector lo, Vector hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size()) {
    throw std::invalid_argument("HyperBox: size mismatch");
  }
  if ((upper - lower).minCoeff() < 0.0) {
    throw std::invalid_argument("HyperBox: lower exceeds upper");
  }
}

double HyperBox::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= upper(i) - lower(i);
  return v;
}

// ---------------------------------------------------------------------------
// Minkowski chains
// ---------------------------------------------------------------------------

void MinkowskiSumChain::add(Matrix map, HPolytope set) {
  if (map.rows() != dim_ || map.cols() != set.dim()) {
    throw std::invalid_argument("MinkowskiSumChain: map has wrong shape");
  }
  terms_.push_back({std::move(map), std::move(set)});
}

double MinkowskiSumChain::support(const Vector& c) const {
  double h = 0.0;
  for (const auto& term : terms_) {
    const Vector dir = term.map.transpose() * c;
    if (dir.size() == 0 || dir.cwiseAbs().maxCoeff() == 0.0) continue;
    h += cis::support(term.set, dir);
  }
  return h;
}

MinkowskiSumChain MinkowskiSumChain::padded(int extra) const {
  MinkowskiSumChain out(dim_ + extra);
  for (const auto& term : terms_) {
    Matrix m = Matrix::Zero(dim_ + extra, term.map.cols());
    m.topRows(dim_) = term.map;
    out.add(std::move(m), term.set);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

ConvexView view(const HPolytope& p) {
  return ConvexView{
      p.dim(), [p](const Vector& c) { return support(p, c); },
      [p](const Vector& x) { return p.contains_point(x); }};
}

ConvexView view(const Projection& p) {
  return ConvexView{
      p.keep, [p](const Vector& c) { return support(p, c); },
      [p](const Vector& x) { return contains_point(p, x); }};
}

bool is_empty(const HPolytope& p) {
  if (p.rows() == 0) return false;
  return !find_feasible_point(p.G(), p.f()).optimal();
}

bool is_empty(const Projection& p) { return is_empty(p.lifted); }

bool is_bounded(const HPolytope& p) {
  for (int i = 0; i < p.dim(); ++i) {
    for (double s : {1.0, -1.0}) {
      Vector c = Vector::Zero(p.dim());
      c(i) = s;
      LpOutcome out =
          solve_lp(LpProblem{c, p.G(), p.f(), Sense::kMaximize});
      if (out.status == LpStatus::kUnbounded) return false;
      if (out.status == LpStatus::kInfeasible) return true;
    }
  }
  return true;
}

double support(const HPolytope& p, const Vector& c) {
  if (c.size() != p.dim()) {
    throw std::invalid_argument("support: dimension mismatch");
  }
  LpOutcome out = solve_lp(LpProblem{c, p.G(), p.f(), Sense::kMaximize});
  switch (out.status) {
    case LpStatus::kOptimal:
      return out.value;
    case LpStatus::kInfeasible:
      return -kInf;
    case LpStatus::kUnbounded:
      break;
  }
  throw UnboundedError("support: polytope unbounded in query direction");
}

double support(const Projection& p, const Vector& c) {
  if (c.size() != p.keep) {
    throw std::invalid_argument("support: dimension mismatch");
  }
  Vector full = Vector::Zero(p.lifted.dim());
  full.head(p.keep) = c;
  return support(p.lifted, full);
}

Vector support_point(const HPolytope& p, const Vector& c) {
  LpOutcome out = solve_lp(LpProblem{c, p.G(), p.f(), Sense::kMaximize});
  if (out.status == LpStatus::kUnbounded) {
    throw UnboundedError("support_point: unbounded direction");
  }
  return out.optimal() ? out.point : Vector();
}

bool contains_point(const Projection& p, const Vector& x, double tol) {
  if (x.size() != p.keep) {
    throw std::invalid_argument("contains_point: dimension mismatch");
  }
  const HPolytope& l = p.lifted;
  const int extra = l.dim() - p.keep;
  if (extra == 0) return l.contains_point(x, tol);
  Vector f = l.f() - l.G().leftCols(p.keep) * x;
  for (int r = 0; r < l.rows(); ++r) f(r) += tol * l.G().row(r).norm();
  return find_feasible_point(l.G().rightCols(extra), f).optimal();
}

HPolytope erode(const HPolytope& p, const MinkowskiSumChain& chain) {
  if (chain.dim() != p.dim()) {
    throw std::invalid_argument("erode: dimension mismatch");
  }
  if (chain.is_zero()) return p;
  Vector f = p.f();
  for (int r = 0; r < p.rows(); ++r) {
    f(r) -= chain.support(p.G().row(r).transpose());
  }
  return HPolytope(p.G(), std::move(f));
}

HPolytope cartesian(const HPolytope& p, const HPolytope& q) {
  Matrix G = Matrix::Zero(p.rows() + q.rows(), p.dim() + q.dim());
  G.topLeftCorner(p.rows(), p.dim()) = p.G();
  G.bottomRightCorner(q.rows(), q.dim()) = q.G();
  Vector f(p.rows() + q.rows());
  f << p.f(), q.f();
  return HPolytope(std::move(G), std::move(f));
}

HPolytope affine_preimage(const HPolytope& p, const Matrix& M,
                          const Vector& t) {
  if (M.rows() != p.dim() || t.size() != p.dim()) {
    throw std::invalid_argument("affine_preimage: shape mismatch");
  }
  return HPolytope(p.G() * M, p.f() - p.G() * t);
}

HPolytope affine_preimage(const HPolytope& p, const Matrix& M) {
  return affine_preimage(p, M, Vector::Zero(p.dim()));
}

HPolytope remove_redundant(const HPolytope& p, const Tolerances& tol) {
  if (p.rows() == 0) return p;
  if (p.dim() == 0) {
    return p.f().minCoeff() < 0.0 ? HPolytope::empty(0)
                                  : HPolytope::universe(0);
  }
  if (is_empty(p)) return HPolytope::empty(p.dim());
  HPolytope q = dedup_rows(p.normalized());

  // Rows strictly slack over a bounding box cannot be facets.
  bool bounded = true;
  HyperBox bbox;
  try {
    bbox = bounding_box(q);
  } catch (const UnboundedError&) {
    bounded = false;
  }
  if (bounded) {
    std::vector<int> keep;
    for (int r = 0; r < q.rows(); ++r) {
      double h = 0.0;
      for (int c = 0; c < q.dim(); ++c) {
        const double g = q.G()(r, c);
        h += g > 0 ? g * bbox.upper(c) : g * bbox.lower(c);
      }
      if (h > q.f()(r) - 1e-9) keep.push_back(r);
    }
    q = select_rows(q, keep);
  }
  if (q.rows() <= 1) return q;

  auto [center, radius] = chebyshev_center(q, tol);
  if (radius > 1e-7) return clarkson(q, center, tol);
  return naive_redundancy(q, tol);
}

HPolytope project(const HPolytope& p, int keep, const ProjectOptions& opt) {
  if (keep < 0 || keep > p.dim()) {
    throw std::invalid_argument("project: bad coordinate count");
  }
  HPolytope cur = remove_redundant(p, opt.tol);
  while (cur.dim() > keep) {
    if (is_empty(cur)) return HPolytope::empty(keep);
    // Eliminate the trailing coordinate with the fewest generated rows.
    int var = -1;
    long best_cost = std::numeric_limits<long>::max();
    for (int v = keep; v < cur.dim(); ++v) {
      long pos = 0, neg = 0, zero = 0;
      for (int r = 0; r < cur.rows(); ++r) {
        const double a = cur.G()(r, v);
        if (a > 1e-12) {
          ++pos;
        } else if (a < -1e-12) {
          ++neg;
        } else {
          ++zero;
        }
      }
      const long cost = pos * neg + zero - pos - neg;
      if (cost < best_cost) {
        best_cost = cost;
        var = v;
      }
    }
    std::vector<int> pos, neg, zero;
    for (int r = 0; r < cur.rows(); ++r) {
      const double a = cur.G()(r, var);
      if (a > 1e-12) {
        pos.push_back(r);
      } else if (a < -1e-12) {
        neg.push_back(r);
      } else {
        zero.push_back(r);
      }
    }
    const long raw =
        static_cast<long>(zero.size()) + static_cast<long>(pos.size()) *
                                             static_cast<long>(neg.size());
    if (raw > 10L * opt.row_cap) {
      throw ExplosionAbort("project: Fourier-Motzkin row count " +
                           std::to_string(raw) + " exceeds cap " +
                           std::to_string(opt.row_cap));
    }
    const int d = cur.dim();
    auto drop_column = [&](const Eigen::RowVectorXd& row) {
      Eigen::RowVectorXd out(d - 1);
      out << row.head(var), row.tail(d - 1 - var);
      return out;
    };
    // The projection lies in the bounding box of cur; a combined row that is
    // strictly slack over that box is not a facet and is never stored.
    std::optional<HyperBox> box;
    if (raw > static_cast<long>(cur.rows())) {
      try {
        const HyperBox b = bounding_box(cur);
        HyperBox r;
        r.lower.resize(d - 1);
        r.upper.resize(d - 1);
        r.lower << b.lower.head(var), b.lower.tail(d - 1 - var);
        r.upper << b.upper.head(var), b.upper.tail(d - 1 - var);
        box = r;
      } catch (const UnboundedError&) {
      }
    }
    auto useful = [&](const Eigen::RowVectorXd& g, double rhs) {
      if (!box) return true;
      double h = 0.0;
      for (int c = 0; c < d - 1; ++c) {
        h += g(c) > 0 ? g(c) * box->upper(c) : g(c) * box->lower(c);
      }
      return h > rhs - 1e-9 * std::max(1.0, g.norm());
    };
    std::vector<Eigen::RowVectorXd> rows;
    std::vector<double> rhs;
    auto add = [&](Eigen::RowVectorXd g, double b) {
      if (!useful(g, b)) return;
      if (static_cast<long>(rows.size()) >= opt.row_cap) {
        throw ExplosionAbort("project: Fourier-Motzkin row count exceeds cap " +
                             std::to_string(opt.row_cap));
      }
      rows.push_back(std::move(g));
      rhs.push_back(b);
    };
    for (int z : zero) add(drop_column(cur.G().row(z)), cur.f()(z));
    for (int i : pos) {
      for (int j : neg) {
        const double ai = cur.G()(i, var);
        const double aj = -cur.G()(j, var);
        add(drop_column(aj * cur.G().row(i) + ai * cur.G().row(j)),
            aj * cur.f()(i) + ai * cur.f()(j));
      }
    }
    Matrix G(static_cast<long>(rows.size()), d - 1);
    Vector f(static_cast<long>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      G.row(r) = rows[r];
      f(r) = rhs[r];
    }
    HPolytope next(std::move(G), std::move(f));
    if (next.rows() == 0) {
      cur = HPolytope::universe(d - 1);
      continue;
    }
    cur = remove_redundant(next, opt.tol);
  }
  return cur;
}

bool contains(const HPolytope& p, const HPolytope& q, double slack) {
  if (p.dim() != q.dim()) {
    throw std::invalid_argument("contains: dimension mismatch");
  }
  if (is_empty(q)) return true;
  for (int r = 0; r < p.rows(); ++r) {
    const double norm = p.G().row(r).norm();
    if (norm == 0.0) {
      if (p.f()(r) < -slack) return false;
      continue;
    }
    try {
      if (support(q, p.G().row(r).transpose() / norm) >
          p.f()(r) / norm + slack) {
        return false;
      }
    } catch (const UnboundedError&) {
      return false;
    }
  }
  return true;
}

bool contains(const HPolytope& p, const Projection& q, double slack) {
  if (p.dim() != q.keep) {
    throw std::invalid_argument("contains: dimension mismatch");
  }
  if (is_empty(q)) return true;
  for (int r = 0; r < p.rows(); ++r) {
    const double norm = p.G().row(r).norm();
    if (norm == 0.0) {
      if (p.f()(r) < -slack) return false;
      continue;
    }
    try {
      if (support(q, p.G().row(r).transpose() / norm) >
          p.f()(r) / norm + slack) {
        return false;
      }
    } catch (const UnboundedError&) {
      return false;
    }
  }
  return true;
}

bool contains(const Projection& p, const HPolytope& q, double slack) {
  // Needs an explicit description of p.
  return contains(project(p.lifted, p.keep), q, slack);
}

HyperBox bounding_box(const ConvexView& body) {
  Vector lo(body.dim), hi(body.dim);
  for (int i = 0; i < body.dim; ++i) {
    Vector c = Vector::Zero(body.dim);
    c(i) = 1.0;
    hi(i) = body.support(c);
    c(i) = -1.0;
    lo(i) = -body.support(c);
    if (!std::isfinite(hi(i)) || !std::isfinite(lo(i))) {
      // -inf support means the body is empty.
      return HyperBox(Vector::Zero(body.dim), Vector::Zero(body.dim));
    }
    if (lo(i) > hi(i)) lo(i) = hi(i);
  }
  return HyperBox(lo, hi);
}

HyperBox bounding_box(const HPolytope& p) { return bounding_box(view(p)); }

double mc_volume(const ConvexView& body, long samples, std::uint64_t seed) {
  if (samples <= 0) return 0.0;
  HyperBox box;
  try {
    box = bounding_box(body);
  } catch (const UnboundedError&) {
    throw;
  }
  const Vector w = box.widths();
  if (w.size() == 0 || w.minCoeff() <= 1e-12) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  long hits = 0;
  Vector x(body.dim);
  for (long s = 0; s < samples; ++s) {
    for (int i = 0; i < body.dim; ++i) x(i) = box.lower(i) + w(i) * unif(rng);
    if (body.contains(x)) ++hits;
  }
  return box.volume() * static_cast<double>(hits) /
         static_cast<double>(samples);
}

double mc_volume(const HPolytope& p, long samples, std::uint64_t seed) {
  if (is_empty(p)) return 0.0;
  return mc_volume(view(p), samples, seed);
}

VolumeRatio mc_volume_ratio(const ConvexView& inner, const ConvexView& outer,
                            long samples, std::uint64_t seed) {
  VolumeRatio out;
  const HyperBox box = bounding_box(outer);
  const Vector w = box.widths();
  if (w.size() == 0 || w.minCoeff() <= 1e-12 || samples <= 0) return out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector x(outer.dim);
  for (long s = 0; s < samples; ++s) {
    for (int i = 0; i < outer.dim; ++i) {
      x(i) = box.lower(i) + w(i) * unif(rng);
    }
    if (!outer.contains(x)) continue;
    ++out.outer_hits;
    if (inner.contains(x)) ++out.inner_hits;
  }
  const double cell = box.volume() / static_cast<double>(samples);
  out.outer_volume = cell * static_cast<double>(out.outer_hits);
  out.inner_volume = cell * static_cast<double>(out.inner_hits);
  out.ratio = out.outer_hits > 0 ? static_cast<double>(out.inner_hits) /
                                       static_cast<double>(out.outer_hits)
                                 : 0.0;
  return out;
}

double hausdorff(const ConvexView& p, const ConvexView& q, int dirs,
                 std::uint64_t seed) {
  if (p.dim != q.dim) throw std::invalid_argument("hausdorff: dim mismatch");
  std::mt19937_64 rng(seed);
  double best = 0.0;
  for (int k = 0; k < dirs; ++k) {
    Vector c;
    if (k < 2 * p.dim) {
      c = Vector::Zero(p.dim);
      c(k / 2) = (k % 2 == 0) ? 1.0 : -1.0;
    } else {
      c = random_unit(rng, p.dim);
    }
    const double hp = p.support(c);
    const double hq = q.support(c);
    if (std::isinf(hp) || std::isinf(hq)) {
      if (std::isinf(hp) && std::isinf(hq)) continue;  // both empty
      return kInf;
    }
    best = std::max(best, std::abs(hp - hq));
  }
  return best;
}

double hausdorff(const HPolytope& p, const HPolytope& q, int dirs,
                 std::uint64_t seed) {
  return hausdorff(view(p), view(q), dirs, seed);
}

std::vector<Vector> sample_points(const HPolytope& p, int count,
                                  std::uint64_t seed, double boundary_share) {
  std::vector<Vector> out;
  if (count <= 0 || is_empty(p)) return out;
  std::mt19937_64 rng(seed);
  const int n = p.dim();
  const int n_ext = std::min(std::max(count, 1), 2 * n + 16);
  std::vector<Vector> extremes;
  extremes.reserve(n_ext);
  for (int i = 0; i < n_ext; ++i) {
    Vector pt = support_point(p, random_unit(rng, n));
    if (pt.size() == n) extremes.push_back(std::move(pt));
  }
  if (extremes.empty()) return out;
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  out.reserve(count);
  for (int s = 0; s < count; ++s) {
    Vector x = Vector::Zero(n);
    double total = 0.0;
    for (const auto& e : extremes) {
      const double w = expo(rng);
      x += w * e;
      total += w;
    }
    x /= total;
    if (unif(rng) < boundary_share) {
      const Vector d = random_unit(rng, n);
      const double t = ray_exit(p, x, d);
      if (std::isfinite(t)) x += t * d;
    }
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<Vector> enumerate_vertices(const HPolytope& p,
                                       std::size_t max_vertices) {
  const int n = p.dim();
  const int k = p.rows();
  std::vector<Vector> verts;
  if (n == 0) {
    if (!is_empty(p)) verts.push_back(Vector(0));
    return verts;
  }
  if (k < n) {
    throw UnboundedError("enumerate_vertices: polytope has no vertices");
  }
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  double combos = 1.0;
  for (int i = 0; i < n; ++i) combos = combos * (k - i) / (i + 1);
  if (combos > 5e6) {
    throw VertexEnumerationTooLarge("enumerate_vertices: too many row subsets");
  }
  Matrix A(n, n);
  Vector b(n);
  for (;;) {
    for (int i = 0; i < n; ++i) {
      A.row(i) = p.G().row(idx[i]);
      b(i) = p.f()(idx[i]);
    }
    Eigen::FullPivLU<Matrix> lu(A);
    if (lu.rank() == n) {
      const Vector x = lu.solve(b);
      if (p.contains_point(x, 1e-9)) {
        bool dup = false;
        for (const auto& v : verts) {
          if ((v - x).cwiseAbs().maxCoeff() <= 1e-9) {
            dup = true;
            break;
          }
        }
        if (!dup) {
          verts.push_back(x);
          if (verts.size() > max_vertices) {
            throw VertexEnumerationTooLarge(
                "enumerate_vertices: more than " +
                std::to_string(max_vertices) + " vertices");
          }
        }
      }
    }
    int i = n - 1;
    while (i >= 0 && idx[i] == k - n + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
  }
  return verts;
}

}  // namespace cis
