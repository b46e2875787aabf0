#include <doctest.h>

#include <random>

#include "cis/instances.h"
#include "cis/invariance.h"
#include "oracles.h"

using namespace cis;

namespace {

HPolytope cube(int n, double r) {
  return HPolytope::box(Vector::Constant(n, -r), Vector::Constant(n, r));
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(xs.size());
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

ImplicitRCIS build(const Problem& p, int tau, int lambda) {
  return implicit_rcis(p.system, p.safe_set,
                       LassoSpec::lasso(tau, lambda, p.system.m()));
}

// Single-input one-step test by interval arithmetic: is there u with
// (x, u) in S and A x + B u + w in C for every listed w?
bool one_step_ok(const LinearSystem& sys, const HPolytope& S, const HPolytope& C,
                 const Vector& x, const std::vector<Vector>& ws, double tol) {
  std::vector<std::pair<double, double>> rows;
  const int n = sys.n();
  for (int r = 0; r < S.rows(); ++r) {
    rows.push_back({S.G()(r, n), S.f()(r) - S.G().row(r).head(n).dot(x)});
  }
  for (const Vector& w : ws) {
    const Vector drift = sys.A * x + w;
    for (int r = 0; r < C.rows(); ++r) {
      const double a = C.G().row(r).dot(sys.B.col(0));
      rows.push_back({a, C.f()(r) - C.G().row(r).dot(drift)});
    }
  }
  return oracle::scalar_feasible(rows, -1e9, 1e9, tol);
}

std::vector<Vector> w_vertices(const LinearSystem& sys) {
  if (sys.d() == 0) return {Vector::Zero(sys.n())};
  std::vector<Vector> out;
  for (const auto& w : oracle::vertices(sys.W)) out.push_back(sys.E * w);
  return out;
}

}  // namespace

TEST_CASE("lasso_matrices") {
  {
    auto [P, H] = lasso_matrices(0, 1, 1);
    CHECK(P == Matrix::Ones(1, 1));
    CHECK(H == Matrix::Ones(1, 1));
  }
  {
    auto [P, H] = lasso_matrices(0, 2, 1);
    Matrix expect(2, 2);
    expect << 0, 1, 1, 0;
    CHECK(P == expect);
    CHECK(H == vec({1, 0}).transpose());
  }
  {
    auto [P, H] = lasso_matrices(1, 2, 1);
    CHECK(P.rows() == 3);
    CHECK(mat_power(P, 1) != mat_power(P, 2));
    CHECK((mat_power(P, 3) - P).norm() == 0.0);
  }
  {
    auto [P, H] = lasso_matrices(2, 3, 2);
    CHECK(P.rows() == 10);
    CHECK(H.rows() == 2);
  }
}

TEST_CASE("lasso inputs repeat with the period after the transient") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int tau = 0; tau <= 3; ++tau) {
    for (int lambda = 1; lambda <= 3; ++lambda) {
      for (int m = 1; m <= 2; ++m) {
        auto [P, H] = lasso_matrices(tau, lambda, m);
        Vector v(P.rows());
        for (int i = 0; i < v.size(); ++i) v(i) = g(rng);
        std::vector<Vector> u;
        Vector s = v;
        for (int t = 0; t < tau + 3 * lambda + 2; ++t) {
          u.push_back(H * s);
          s = P * s;
        }
        for (int t = tau; t + lambda < static_cast<int>(u.size()); ++t) {
          CHECK((u[t + lambda] - u[t]).norm() == 0.0);
        }
        // The transient inputs are free: the first q inputs are v itself.
        for (int t = 0; t < tau + lambda; ++t) CHECK(u[t](0) == v(t));
      }
    }
  }
}

TEST_CASE("verify_eventually_periodic") {
  const auto id = verify_eventually_periodic(Matrix::Identity(3, 3), 0, 1);
  CHECK(id.holds);
  CHECK(id.min_tau == 0);
  CHECK(id.min_lambda == 1);

  const auto nil = verify_eventually_periodic(brunovsky_A(4), 4, 1);
  CHECK(nil.holds);
  CHECK(nil.min_tau == 4);
  CHECK(nil.min_lambda == 1);
  CHECK_FALSE(verify_eventually_periodic(brunovsky_A(4), 3, 1).holds);

  auto [P, H] = lasso_matrices(2, 3, 1);
  const auto l = verify_eventually_periodic(P, 2, 3);
  CHECK(l.holds);
  CHECK(l.min_tau == 2);
  CHECK(l.min_lambda == 3);
  // A multiple of the period is still valid; the minimum is reported.
  const auto l6 = verify_eventually_periodic(P, 4, 6);
  CHECK(l6.holds);
  CHECK(l6.min_tau == 2);
  CHECK(l6.min_lambda == 3);
}

TEST_CASE("custom generators are validated") {
  auto [P, H] = lasso_matrices(1, 2, 1);
  CHECK_NOTHROW(LassoSpec::custom(P, H, 1, 2));
  CHECK_THROWS(LassoSpec::custom(2 * P, H, 1, 2));
  CHECK_THROWS(LassoSpec::custom(P, Matrix::Zero(1, 3), 1, 2));
}

TEST_CASE("theta") {
  CHECK(theta(1) == std::vector<std::pair<int, int>>{{0, 1}});
  CHECK(theta(3) == std::vector<std::pair<int, int>>{{0, 3}, {1, 2}, {2, 1}});
}

TEST_CASE("implicit set of the degenerate cone is the origin") {
  const Problem p = cone_example();
  for (int q = 1; q <= 4; ++q) {
    for (auto [tau, lambda] : theta(q)) {
      const ImplicitRCIS ir = build(p, tau, lambda);
      REQUIRE_FALSE(ir.empty);
      CHECK(ir.blocks == ir.nu + tau + lambda);
      const HPolytope C = explicit_rcis(ir);
      CHECK(C.contains_point(Vector::Zero(2), 1e-9));
      CHECK(bounding_box(C).widths().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("implicit set on a box contains the origin") {
  for (int n = 1; n <= 4; ++n) {
    const LinearSystem sys(brunovsky_A(n), brunovsky_B(n));
    const ImplicitRCIS ir =
        implicit_rcis(sys, cube(n + 1, 1), LassoSpec::lasso(0, 1, 1));
    CHECK_FALSE(ir.empty);
    CHECK(contains_point(ir.lifted_view(), Vector::Zero(n)));
  }
}

TEST_CASE("implicit set of a scalar system is an interval") {
  const LinearSystem sys(Matrix::Zero(1, 1), Matrix::Ones(1, 1));
  const ImplicitRCIS ir = implicit_rcis(sys, cube(2, 1), LassoSpec::lasso(0, 1, 1));
  const HPolytope C = explicit_rcis(ir);
  CHECK(support(C, vec({1})) == doctest::Approx(1.0));
  CHECK(support(C, vec({-1})) == doctest::Approx(1.0));
}

TEST_CASE("block count and emptiness flags") {
  const Problem p = random_brunovsky(3, 6, 2, 0.5, 0.05);
  for (auto [tau, lambda] : std::vector<std::pair<int, int>>{{0, 1}, {2, 2}, {3, 1}}) {
    const ImplicitRCIS ir = build(p, tau, lambda);
    CHECK(ir.nu == 3);
    CHECK(ir.blocks == 3 + tau + lambda);
    CHECK(ir.fingerprint == fingerprint(p.safe_set));
  }
  // Disturbance larger than the safe set: empty, reported but not thrown.
  const Problem huge = with_disturbance(p, 3.0);
  const ImplicitRCIS ir = build(huge, 0, 1);
  CHECK(ir.empty);
}

TEST_CASE("double integrator volumes grow from q=1 to q=6") {
  const Problem p = double_integrator();
  const double v1 = mc_volume(explicit_rcis(build(p, 0, 1)), 200000, 1);
  const double v6 = mc_volume(explicit_rcis(build(p, 5, 1)), 200000, 1);
  CHECK(v1 > 0.1);
  CHECK(v6 > v1 * 1.5);
}

TEST_CASE("non-nilpotent systems record the feedback gain") {
  const Problem p = double_integrator();
  const ImplicitRCIS ir = build(p, 1, 1);
  CHECK(ir.K.rows() == 1);
  CHECK(ir.K.cols() == 2);
  CHECK_FALSE(ir.K.isZero());
  CHECK(mat_power(p.system.A + p.system.B * ir.K, ir.nu).norm() < 1e-9);
}

TEST_CASE("explicit sets pass a grid one-step oracle") {
  // Every grid point of C has a scalar input keeping the successor in C
  // under all disturbance vertices.
  for (double wbar : {0.0, 0.01}) {
    const Problem p = double_integrator(0.5, 1.0, 0.2, wbar);
    for (auto [tau, lambda] : std::vector<std::pair<int, int>>{{0, 1}, {2, 2}}) {
      const HPolytope C = explicit_rcis(build(p, tau, lambda));
      const auto ws = w_vertices(p.system);
      int tested = 0;
      oracle::for_grid(Vector::Constant(2, -1), Vector::Constant(2, 1), 0.02,
                       [&](const Vector& x) {
                         if (!oracle::inside(C, x, 0.0)) return;
                         ++tested;
                         CHECK(one_step_ok(p.system, p.safe_set, C, x, ws, 1e-7));
                       });
      CHECK(tested > 100);
    }
  }
}

TEST_CASE("invariance_check") {
  const Problem p = cone_example();
  const HPolytope origin = HPolytope::point(Vector::Zero(2));
  CHECK(invariance_check(p.system, p.safe_set, origin, 50).violations == 0);

  const Problem di = double_integrator();
  const HPolytope C = explicit_rcis(build(di, 2, 2));
  CHECK(invariance_check(di.system, di.safe_set, C, 300).violations == 0);
  // The full state box is not invariant under the small input bound.
  const HPolytope big = cube(2, 1);
  CHECK(invariance_check(di.system, di.safe_set, big, 300).violations > 0);
}

TEST_CASE("slice property: the companion system maps C_xv into itself") {
  const std::vector<Problem> problems = {
      random_brunovsky(3, 6, 4, 0.5, 0.05), double_integrator(0.5, 1.0, 0.2, 0.01),
      random_dynamics(2, 3)};
  for (const Problem& p : problems) {
    const ImplicitRCIS ir = build(p, 1, 2);
    REQUIRE_FALSE(ir.empty);
    const auto ws = w_vertices(p.system);
    const int n = p.system.n();
    const Matrix& P = ir.spec.P;
    const Matrix& H = ir.spec.H;
    const Matrix K = ir.K.size() ? ir.K : Matrix::Zero(p.system.m(), n);
    for (const Vector& z : sample_points(ir.polytope, 200, 5)) {
      const Vector x = z.head(n), v = z.tail(ir.v_dim());
      const Vector u = K * x + H * v;
      Vector xu(n + p.system.m());
      xu << x, u;
      CHECK(oracle::inside(p.safe_set, xu, 1e-7));
      for (const Vector& w : ws) {
        Vector next(z.size());
        next << p.system.A * x + p.system.B * u + w, P * v;
        CHECK(oracle::inside(ir.polytope.normalized(), next, 1e-7));
      }
    }
  }
}

TEST_CASE("longer transients and multiplied periods only grow the set") {
  for (int seed = 1; seed <= 3; ++seed) {
    const Problem p = seed == 1 ? double_integrator() : random_brunovsky(seed, 2 * seed, seed);
    for (int lambda = 1; lambda <= 2; ++lambda) {
      for (int tau = 0; tau <= 2; ++tau) {
        const HPolytope a = explicit_rcis(build(p, tau, lambda));
        const HPolytope b = explicit_rcis(build(p, tau + 1, lambda));
        CHECK(contains(b, a, 1e-6));
      }
    }
    if (p.system.n() == 2) {
      for (int k = 2; k <= 3; ++k) {
        for (int lp = 1; lp <= 2; ++lp) {
          const HPolytope a = explicit_rcis(build(p, 1, lp));
          const HPolytope b = explicit_rcis(build(p, 1, k * lp));
          CHECK(contains(b, a, 1e-6));
        }
      }
    }
  }
}

TEST_CASE("hierarchy levels are nested on samples") {
  const Problem p = double_integrator();
  std::vector<std::vector<HPolytope>> levels;
  for (int q = 1; q <= 6; ++q) {
    const Hierarchy h = hierarchy(p.system, p.safe_set, q);
    CHECK(h.components.size() == static_cast<std::size_t>(q));
    std::vector<HPolytope> cs;
    for (const auto& c : h.components) cs.push_back(explicit_rcis(c));
    levels.push_back(cs);
  }
  auto in_level = [&](int q, const Vector& x) {
    for (const auto& c : levels[q - 1])
      if (oracle::inside(c, x, 1e-7)) return true;
    return false;
  };
  for (int q = 1; q < 6; ++q) {
    for (int qq = q + 1; qq <= 6; ++qq) {
      int failures = 0, count = 0;
      for (std::size_t i = 0; i < levels[q - 1].size(); ++i) {
        const int per = 10000 / q + 1;
        for (const Vector& x : sample_points(levels[q - 1][i], per, 10 * q + i)) {
          ++count;
          if (!in_level(qq, x)) ++failures;
        }
      }
      CHECK(count >= 10000);
      CHECK(failures == 0);
    }
  }
}

TEST_CASE("big-M union membership") {
  const Problem p = double_integrator();
  const Hierarchy h = hierarchy(p.system, p.safe_set, 3);
  const BigMUnion& bu = h.bigm;
  CHECK(bu.count() == 3);
  CHECK((bu.M.array() >= 0).all());

  std::mt19937_64 rng(2);
  const int n = 2, vd = bu.v_dim;
  int hits = 0;
  for (int s = 0; s < 400; ++s) {
    // Half the points come from a component, half uniformly from a box.
    Vector z(n + vd);
    if (s % 2 == 0) {
      const auto pts = sample_points(h.components[s % 3].polytope, 1, s + 1);
      z = pts.front();
    } else {
      z = oracle::uniform_in_box(Vector::Constant(n + vd, -1.2),
                                 Vector::Constant(n + vd, 1.2), rng);
    }
    bool expect = false;
    for (const auto& c : h.components) expect = expect || oracle::inside(c.polytope, z, 1e-9);
    const bool got = member_bigm(bu, z.head(n), z.tail(vd));
    CHECK(got == expect);
    hits += got;
  }
  CHECK(hits >= 200);

  // A point in the (2,1) component only.
  const HPolytope c0 = explicit_rcis(h.components[0]);
  const HPolytope c2 = explicit_rcis(h.components[2]);
  bool found = false;
  for (const Vector& x : sample_points(c2, 500, 9)) {
    if (!oracle::inside(c0, x, 1e-9) && !contains_point(h.components[1].lifted_view(), x)) {
      CHECK(member_bigm_state(bu, x));
      found = true;
      break;
    }
  }
  CHECK(found);
  CHECK_FALSE(member_bigm_state(bu, vec({5, 5})));
}

TEST_CASE("union of two invariant sets is invariant") {
  const Problem p = double_integrator();
  const HPolytope a = explicit_rcis(build(p, 0, 2));
  const HPolytope b = explicit_rcis(build(p, 2, 1));
  const auto ws = w_vertices(p.system);
  for (const HPolytope* part : {&a, &b}) {
    for (const Vector& x : sample_points(*part, 300, 3)) {
      CHECK((one_step_ok(p.system, p.safe_set, a, x, ws, 1e-7) ||
             one_step_ok(p.system, p.safe_set, b, x, ws, 1e-7)));
    }
  }
}

TEST_CASE("safe_box: scalar system") {
  const LinearSystem sys(Matrix::Zero(1, 1), Matrix::Ones(1, 1));
  const SafeBoxResult r = safe_box(sys, cube(2, 1), LassoSpec::lasso(0, 1, 1),
                                   BoxMode::kGeometricMean);
  REQUIRE(r.status == BoxStatus::kOptimal);
  CHECK(r.box.lower(0) == doctest::Approx(-1.0).epsilon(1e-5));
  CHECK(r.box.upper(0) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(std::abs(r.v(0)) <= 1.0 + 1e-9);
  const SafeBoxResult s = safe_box(sys, cube(2, 1), LassoSpec::lasso(0, 1, 1),
                                   BoxMode::kSumWidth);
  CHECK(s.box.widths()(0) == doctest::Approx(2.0));
}

TEST_CASE("safe_box: modes and statuses") {
  const Problem p = random_brunovsky(3, 6, 3, 0.5, 0.02);
  const LassoSpec spec = LassoSpec::lasso(0, 1, 1);
  const SafeBoxResult gm = safe_box(p.system, p.safe_set, spec, BoxMode::kGeometricMean);
  const SafeBoxResult sw = safe_box(p.system, p.safe_set, spec, BoxMode::kSumWidth);
  REQUIRE(gm.status == BoxStatus::kOptimal);
  REQUIRE(sw.status != BoxStatus::kInfeasible);
  double sw_log = 0.0;
  for (int i = 0; i < 3; ++i) sw_log += std::log(std::max(sw.box.widths()(i), 1e-300));
  CHECK(gm.objective >= sw_log - 1e-6);
  CHECK(gm.box.widths().sum() <= sw.box.widths().sum() + 1e-6);

  // The box is safe: it lies in the explicit set of the same spec.
  const HPolytope C = explicit_rcis(implicit_rcis(p.system, p.safe_set, spec));
  CHECK(contains(C, gm.box.to_polytope(), 1e-6));

  // Feasibility mode on the found box and on an inflated one.
  const SafeBoxResult ok = safe_box(p.system, p.safe_set, spec, BoxMode::kFeasibility, gm.box);
  CHECK(ok.status == BoxStatus::kOptimal);
  const HyperBox big(gm.box.lower * 3.0 - Vector::Ones(3), gm.box.upper * 3.0 + Vector::Ones(3));
  const SafeBoxResult bad = safe_box(p.system, p.safe_set, spec, BoxMode::kFeasibility, big);
  CHECK(bad.status == BoxStatus::kInfeasible);

  const Problem huge = with_disturbance(p, 3.0);
  CHECK(safe_box(huge.system, huge.safe_set, spec, BoxMode::kGeometricMean).status ==
        BoxStatus::kInfeasible);
}

TEST_CASE("safe_box on a non-nilpotent system") {
  const Problem p = double_integrator();
  const SafeBoxResult r =
      safe_box(p.system, p.safe_set, LassoSpec::lasso(1, 1, 1), BoxMode::kGeometricMean);
  REQUIRE(r.status == BoxStatus::kOptimal);
  // Every corner of the box must be supervisable under u = Kx + Hv forever:
  // the box sits inside the explicit set of the same spec.
  const HPolytope C = explicit_rcis(build(p, 1, 1));
  CHECK(contains(C, r.box.to_polytope(), 1e-6));
}
