#pragma once

// Online use of implicit invariant sets: admissible input sets, the
// minimally intrusive supervisor and a filter for growing safe sets.

#include <string>
#include <vector>

#include "cis/invariance.h"

namespace cis {

class SafeSetShrank : public Error {
 public:
  using Error::Error;
};

class InitiallyInfeasible : public Error {
 public:
  using Error::Error;
};

/// Which admissible-input encoding to use. With N the number of vertices w_i
/// of W:
///   U1 over (u, v_1..v_N): (x,u) in S_xu, (Ax+Bu+Ew_i, v_i) in C_xv;
///   U2 over v:            (x, v) in C_xv, input u = Kx + Hv;
///   U3 over (u, v):       as U1 with one shared v.
enum class Encoding { kU1, kU2, kU3 };

std::string to_string(Encoding e);
Encoding parse_encoding(const std::string& s);

struct AdmissibleEncoding {
  Encoding variant = Encoding::kU3;
  HPolytope set;
  int m = 0;
  int v_dim = 0;
  int copies = 1;  // number of v blocks
  Vector x;
  Matrix K;  // applied input is Kx + Hv for U2
  Matrix H;
  std::vector<Vector> w_vertices;

  bool empty() const { return is_empty(set); }
  /// Is u admissible, i.e. in the input projection of the encoding?
  bool admits(const Vector& u, double tol = 1e-9) const;
};

/// Throws VertexEnumerationTooLarge when W has more than 4096 vertices.
AdmissibleEncoding admissible(const LinearSystem& sys, const HPolytope& Sxu,
                              const ImplicitRCIS& ir, const Vector& x,
                              Encoding variant = Encoding::kU3);

enum class SuperviseStatus { kPass, kCorrected, kInfeasible };
std::string to_string(SuperviseStatus s);

struct SuperviseResult {
  SuperviseStatus status = SuperviseStatus::kInfeasible;
  Vector u;  // bitwise the request on kPass
  Vector v;
  double distance = 0.0;
};

/// min ||u - u_req||^2 + 1e-8 ||v||^2 over the chosen encoding.
SuperviseResult supervise(const LinearSystem& sys, const HPolytope& Sxu,
                          const ImplicitRCIS& ir, const Vector& x,
                          const Vector& u_req,
                          Encoding variant = Encoding::kU3,
                          const Tolerances& tol = default_tolerances());

/// Bookkeeping for supervising against a growing safe set S_xu(t).
struct FilterState {
  bool started = false;
  int t_star = -1;   // latest instant whose implicit set was usable
  int t_last = -1;
  ImplicitRCIS stored;       // implicit set built at t_star
  HPolytope stored_safe;     // S_xu(t_star)
  HPolytope last_safe;       // S_xu(t_last)
  std::vector<std::string> history;  // safe-set fingerprints
};

struct FilterOutput {
  Vector u;
  SuperviseStatus status = SuperviseStatus::kInfeasible;
  int t_star = -1;
  bool fell_back = false;
};

/// One supervision step at time t. Builds C_xv(t) for S_xu(t); if x is not
/// supervisable there, falls back to the set stored at t_star. Throws
/// SafeSetShrank when S_xu(t) does not contain S_xu(t-1), InitiallyInfeasible
/// when the first step fails, and NumericalFailure if the fallback fails.
FilterOutput filter_step(FilterState& fs, const LinearSystem& sys, int t,
                         const HPolytope& Sxu_t, const Vector& x,
                         const Vector& u_req, const LassoSpec& spec,
                         Encoding variant = Encoding::kU3);

/// One convex piece of a nonconvex safe set together with its implicit set.
struct UnionComponent {
  HPolytope safe_set;
  ImplicitRCIS rcis;
};

struct UnionSuperviseResult {
  SuperviseResult result;
  int component = -1;
};

/// Supervises against a union of at most 10 convex safe sets (typically
/// boxes) by trying every component and keeping the least intrusive input.
UnionSuperviseResult supervise_union(const LinearSystem& sys,
                                     const std::vector<UnionComponent>& parts,
                                     const Vector& x, const Vector& u_req,
                                     Encoding variant = Encoding::kU3);

/// Implicit sets for each safe box of a union (at most 10 boxes).
std::vector<UnionComponent> union_components(
    const LinearSystem& sys, const std::vector<HPolytope>& safe_sets,
    const LassoSpec& spec);

}  // namespace cis
