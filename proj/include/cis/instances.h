#pragma once

// Benchmark and test problem generators.

#include <cstdint>
#include <random>
#include <string>

#include "cis/system.h"

namespace cis {

struct Problem {
  std::string name;
  LinearSystem system;
  HPolytope safe_set;  // over (x, u)
};

/// x1+ = x2, x2+ = u with the cone 1.5 x2 <= x1 <= 2 x2 and |u| <= 1.
/// With `literal` the extra state constraint is -1 <= x1, which the cone
/// already implies, so the set is unbounded; otherwise it is x1 <= 1.
Problem cone_example(bool literal = false);

/// The cone example with the cone made strict by `eps`, which removes every fixed
/// point: 1.5 x2 + eps <= x1 <= 2 x2 - eps, with the x1 bound tightened by
/// eps as well.
Problem cone_example_shrunk(double eps = 0.01, bool literal = false);

/// Discretized double integrator with step dt, |x_i| <= x_bound,
/// |u| <= u_bound and, when wbar > 0, additive disturbance in
/// [-wbar, wbar]^2.
Problem double_integrator(double dt = 0.5, double x_bound = 1.0,
                          double u_bound = 0.2, double wbar = 0.0);

/// n x n shift matrix and last unit column (Brunovsky normal form).
Matrix brunovsky_A(int n);
Matrix brunovsky_B(int n);

/// k unit normals uniform on the sphere with offsets uniform in [0.5, 1.5],
/// intersected with the box [-5, 5]^n. Contains the origin; bounded.
HPolytope random_safe_polytope(int n, int k, std::mt19937_64& rng);

/// Brunovsky system with a random state polytope of k rows, |u| <= u_bound
/// and, when wbar > 0, E = I with W = [-wbar, wbar]^n.
Problem random_brunovsky(int n, int k, std::uint64_t seed,
                         double u_bound = 0.5, double wbar = 0.0);

/// Same safe set as random_brunovsky(n, k, seed, ...) with a different
/// disturbance bound.
Problem with_disturbance(const Problem& p, double wbar);

/// Random controllable (A, B) with A entries in [-1, 1], one input, a random
/// state polytope, |u| <= 1 and W = [-wbar, wbar]^n with wbar in [0, 0.3].
Problem random_dynamics(int n, std::uint64_t seed);

}  // namespace cis
