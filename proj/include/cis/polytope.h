#pragma once

// H-representation polytope algebra.

#include <cstdint>
#include <functional>
#include <vector>

#include "cis/numlin.h"

namespace cis {

/// A support query hit an unbounded direction.
class UnboundedError : public Error {
 public:
  using Error::Error;
};

/// Vertex enumeration would exceed its configured limit.
class VertexEnumerationTooLarge : public Error {
 public:
  using Error::Error;
};

/// Fourier-Motzkin elimination produced more rows than the configured cap.
class ExplosionAbort : public Error {
 public:
  using Error::Error;
};

/// {x | Gx <= f}. Boundedness is not enforced; rows with a zero normal and a
/// nonnegative right-hand side are dropped on construction. A polytope with
/// no rows is the whole space.
class HPolytope {
 public:
  HPolytope() = default;
  HPolytope(Matrix G, Vector f);

  static HPolytope universe(int dim);
  static HPolytope empty(int dim);
  static HPolytope box(const Vector& lower, const Vector& upper);
  /// The singleton {p}, encoded as equality pairs.
  static HPolytope point(const Vector& p);

  int dim() const { return static_cast<int>(G_.cols()); }
  int rows() const { return static_cast<int>(G_.rows()); }
  const Matrix& G() const { return G_; }
  const Vector& f() const { return f_; }

  bool contains_point(const Vector& x, double tol = 1e-9) const;
  HPolytope intersect(const HPolytope& other) const;

  /// Rows scaled to unit Euclidean norm.
  HPolytope normalized() const;

 private:
  Matrix G_;
  Vector f_;
};

struct HyperBox {
  Vector lower;
  Vector upper;

  HyperBox() = default;
  HyperBox(Vector lo, Vector hi);

  int dim() const { return static_cast<int>(lower.size()); }
  Vector widths() const { return upper - lower; }
  double volume() const;
  HPolytope to_polytope() const { return HPolytope::box(lower, upper); }
};

/// Formal Minkowski sum  sum_i M_i W_i, never expanded into a polytope.
struct MinkowskiTerm {
  Matrix map;
  HPolytope set;
};

class MinkowskiSumChain {
 public:
  explicit MinkowskiSumChain(int dim = 0) : dim_(dim) {}

  void add(Matrix map, HPolytope set);
  int dim() const { return dim_; }
  const std::vector<MinkowskiTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Support function of the sum (0 for the empty chain, which is {0}).
  double support(const Vector& c) const;
  /// The same chain embedded as chain x {0} in a space with `extra` more
  /// trailing coordinates.
  MinkowskiSumChain padded(int extra) const;

 private:
  int dim_;
  std::vector<MinkowskiTerm> terms_;
};

/// Projection of a polytope onto its first `keep` coordinates, kept in lifted
/// form so that support and membership queries are answered by LPs.
struct Projection {
  HPolytope lifted;
  int keep = 0;

  int dim() const { return keep; }
};

/// Type-erased convex body used by the sampling based estimators.
struct ConvexView {
  int dim = 0;
  std::function<double(const Vector&)> support;
  std::function<bool(const Vector&)> contains;
};

ConvexView view(const HPolytope& p);
ConvexView view(const Projection& p);

bool is_empty(const HPolytope& p);
bool is_empty(const Projection& p);
bool is_bounded(const HPolytope& p);

/// max over P of <c, x>. Throws UnboundedError; returns -inf for empty P.
double support(const HPolytope& p, const Vector& c);
double support(const Projection& p, const Vector& c);
/// Maximizer of <c, x> over P, or an empty vector when P is empty.
Vector support_point(const HPolytope& p, const Vector& c);

bool contains_point(const Projection& p, const Vector& x, double tol = 1e-9);

/// {x | Gx <= f - h} with h_j = support(chain, row_j(G)).
HPolytope erode(const HPolytope& p, const MinkowskiSumChain& chain);

HPolytope cartesian(const HPolytope& p, const HPolytope& q);

/// {z | G(Mz + t) <= f}.
HPolytope affine_preimage(const HPolytope& p, const Matrix& M,
                          const Vector& t);
HPolytope affine_preimage(const HPolytope& p, const Matrix& M);

struct ProjectOptions {
  int row_cap = 20000;
  Tolerances tol = default_tolerances();
};

/// Fourier-Motzkin elimination of the trailing coordinates with LP-based
/// redundancy removal after every eliminated variable.
HPolytope project(const HPolytope& p, int keep,
                  const ProjectOptions& opt = ProjectOptions{});

/// Drops rows that an LP proves implied by the others. Empty inputs collapse
/// to HPolytope::empty.
HPolytope remove_redundant(const HPolytope& p,
                           const Tolerances& tol = default_tolerances());

/// Q subset of P, decided row by row on P with the given slack.
bool contains(const HPolytope& p, const HPolytope& q, double slack = 1e-7);
bool contains(const HPolytope& p, const Projection& q, double slack = 1e-7);
bool contains(const Projection& p, const HPolytope& q, double slack = 1e-7);

/// Axis-aligned bounding box from 2n support queries.
HyperBox bounding_box(const ConvexView& body);
HyperBox bounding_box(const HPolytope& p);

/// Hit-or-miss volume estimate; 0 for empty or flat bodies.
double mc_volume(const ConvexView& body, long samples, std::uint64_t seed);
double mc_volume(const HPolytope& p, long samples, std::uint64_t seed);

struct VolumeRatio {
  double ratio = 0.0;         // vol(inner) / vol(outer)
  double outer_volume = 0.0;
  double inner_volume = 0.0;
  long outer_hits = 0;
  long inner_hits = 0;
};

/// Both volumes estimated from one shared sample of outer's bounding box.
/// Only points inside `outer` are tested against `inner`.
VolumeRatio mc_volume_ratio(const ConvexView& inner, const ConvexView& outer,
                            long samples, std::uint64_t seed);

/// max over sampled unit directions of |h_P(c) - h_Q(c)|; the first 2n
/// directions are the signed coordinate axes.
double hausdorff(const ConvexView& p, const ConvexView& q, int dirs,
                 std::uint64_t seed = 1);
double hausdorff(const HPolytope& p, const HPolytope& q, int dirs,
                 std::uint64_t seed = 1);

/// Points of P biased towards its boundary: random convex combinations of
/// LP extreme points, a share of them pushed to the boundary along random
/// rays. Works for flat polytopes too. Empty P yields no points.
std::vector<Vector> sample_points(const HPolytope& p, int count,
                                  std::uint64_t seed,
                                  double boundary_share = 0.3);

/// Vertices of a polytope of small dimension by enumerating n-subsets of
/// rows. Throws VertexEnumerationTooLarge beyond `max_vertices`.
std::vector<Vector> enumerate_vertices(const HPolytope& p,
                                       std::size_t max_vertices = 4096);

}  // namespace cis
