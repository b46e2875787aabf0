#include "cis/instances.h"

namespace cis {

namespace {

HPolytope state_input_set(const HPolytope& Sx, double u_bound, int m = 1) {
  return cartesian(Sx, HPolytope::box(Vector::Constant(m, -u_bound),
                                      Vector::Constant(m, u_bound)));
}

HPolytope cube(int n, double r) {
  return HPolytope::box(Vector::Constant(n, -r), Vector::Constant(n, r));
}

}  // namespace

Problem cone_example(bool literal) { return cone_example_shrunk(0.0, literal); }

Problem cone_example_shrunk(double eps, bool literal) {
  Matrix A(2, 2);
  A << 0, 1, 0, 0;
  Matrix B(2, 1);
  B << 0, 1;
  Matrix G(5, 3);
  Vector f(5);
  G << (literal ? -1.0 : 1.0), 0, 0,  //
      -1, 1.5, 0,                      // 1.5 x2 <= x1
      1, -2, 0,                        // x1 <= 2 x2
      0, 0, 1,                         //
      0, 0, -1;
  f << 1 - eps, -eps, -eps, 1, 1;
  Problem p;
  p.name = eps > 0 ? "cone-example-shrunk" : "cone-example";
  p.system = LinearSystem(A, B);
  p.safe_set = HPolytope(G, f);
  return p;
}

Problem double_integrator(double dt, double x_bound, double u_bound,
                          double wbar) {
  Matrix A(2, 2);
  A << 1, dt, 0, 1;
  Matrix B(2, 1);
  B << dt * dt / 2, dt;
  Problem p;
  p.name = "double-integrator";
  if (wbar > 0) {
    p.system = LinearSystem(A, B, Matrix::Identity(2, 2), cube(2, wbar));
  } else {
    p.system = LinearSystem(A, B);
  }
  p.safe_set = state_input_set(cube(2, x_bound), u_bound);
  return p;
}

Matrix brunovsky_A(int n) {
  Matrix A = Matrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) A(i, i + 1) = 1.0;
  return A;
}

Matrix brunovsky_B(int n) {
  Matrix B = Matrix::Zero(n, 1);
  B(n - 1, 0) = 1.0;
  return B;
}

HPolytope random_safe_polytope(int n, int k, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> offset(0.5, 1.5);
  Matrix G(k + 2 * n, n);
  Vector f(k + 2 * n);
  for (int r = 0; r < k; ++r) {
    Vector g(n);
    do {
      for (int i = 0; i < n; ++i) g(i) = gauss(rng);
    } while (g.norm() < 1e-9);
    G.row(r) = g.normalized();
    f(r) = offset(rng);
  }
  G.bottomRows(2 * n) << Matrix::Identity(n, n), -Matrix::Identity(n, n);
  f.tail(2 * n).setConstant(5.0);
  return HPolytope(G, f);
}

Problem random_brunovsky(int n, int k, std::uint64_t seed, double u_bound,
                         double wbar) {
  std::mt19937_64 rng(seed);
  Problem p;
  p.name = "brunovsky-n" + std::to_string(n) + "-k" + std::to_string(k) +
           "-s" + std::to_string(seed);
  p.system = LinearSystem(brunovsky_A(n), brunovsky_B(n));
  p.safe_set = state_input_set(random_safe_polytope(n, k, rng), u_bound);
  return wbar > 0 ? with_disturbance(p, wbar) : p;
}

Problem with_disturbance(const Problem& p, double wbar) {
  Problem out = p;
  const int n = p.system.n();
  if (wbar > 0) {
    out.system = LinearSystem(p.system.A, p.system.B, Matrix::Identity(n, n),
                              cube(n, wbar));
  } else {
    out.system = LinearSystem(p.system.A, p.system.B);
  }
  return out;
}

Problem random_dynamics(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Matrix A(n, n), B(n, 1);
  for (;;) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) A(i, j) = unif(rng);
      B(i, 0) = unif(rng);
    }
    try {
      controllability_indices(A, B);
      break;
    } catch (const NotControllable&) {
    }
  }
  const HPolytope Sx = random_safe_polytope(n, 2 * n, rng);
  const double wbar = 0.3 * 0.5 * (unif(rng) + 1.0);
  Problem p;
  p.name = "random-n" + std::to_string(n) + "-s" + std::to_string(seed);
  p.system = LinearSystem(A, B, Matrix::Identity(n, n), cube(n, wbar));
  p.safe_set = state_input_set(Sx, 1.0);
  return p;
}

}  // namespace cis
