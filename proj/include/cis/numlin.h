#pragma once

// Dense linear algebra helpers plus the LP and convex QP solvers that the
// rest of the library is built on.

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cis {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solver ran out of its iteration budget or lost numerical consistency.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Numerical thresholds used throughout the library, gathered in one place.
struct Tolerances {
  double feasibility = 1e-8;      // LP/QP constraint satisfaction
  double optimality = 1e-8;       // LP objective accuracy
  double pivot = 1e-9;            // smallest admissible simplex pivot
  double reduced_cost = 1e-10;    // simplex optimality test on scaled data
  double kkt = 1e-6;              // QP stationarity residual
  double psd_floor = -1e-9;       // smallest eigenvalue accepted as PSD
  double qp_regularization = 1e-8;
  double rank = 1e-8;             // relative threshold for rank decisions
  double nilpotent = 1e-9;        // ||A^k||_inf below this counts as zero
  double periodic = 1e-9;         // ||P^tau - P^(tau+lambda)||_inf
  double containment = 1e-7;      // slack for set containment tests
  double redundancy = 1e-9;       // LP slack under which a row is redundant
  double membership = 1e-9;       // point-in-polytope slack
  int degenerate_pivots_before_bland = 50;
};

const Tolerances& default_tolerances();

/// Throws std::invalid_argument when `m` holds NaN or Inf.
void require_finite(const Matrix& m, const char* what);
void require_finite(const Vector& v, const char* what);

/// M^k by repeated multiplication; M^0 is the identity.
Matrix mat_power(const Matrix& m, int k);

/// Infinity norm (max absolute row sum).
double inf_norm(const Matrix& m);

// ---------------------------------------------------------------------------
// Linear programming
// ---------------------------------------------------------------------------

enum class Sense { kMinimize, kMaximize };

/// optimize c'x subject to Gx <= f, x free.
struct LpProblem {
  Vector c;
  Matrix G;
  Vector f;
  Sense sense = Sense::kMinimize;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpOutcome {
  LpStatus status = LpStatus::kInfeasible;
  double value = 0.0;
  Vector point;
  int iterations = 0;

  bool optimal() const { return status == LpStatus::kOptimal; }
};

std::string to_string(LpStatus s);

/// Two-phase dense simplex. Throws NumericalFailure when the pivot budget
/// (10 * (rows + cols) + 1000) is exhausted.
LpOutcome solve_lp(const LpProblem& p,
                   const Tolerances& tol = default_tolerances());

/// Convenience: is {x | Gx <= f} nonempty? Returns a witness when it is.
LpOutcome find_feasible_point(const Matrix& G, const Vector& f,
                              const Tolerances& tol = default_tolerances());

// ---------------------------------------------------------------------------
// Convex quadratic programming
// ---------------------------------------------------------------------------

/// minimize 1/2 z'Qz + c'z + constant subject to Gz <= f.
struct QpProblem {
  Matrix Q;
  Vector c;
  Matrix G;
  Vector f;
  double constant = 0.0;
};

enum class QpStatus { kOptimal, kInfeasible };

struct QpOutcome {
  QpStatus status = QpStatus::kInfeasible;
  double value = 0.0;
  Vector point;
  Vector multipliers;  // one per row of G, zero for inactive rows
  double kkt_residual = 0.0;
  int iterations = 0;

  bool optimal() const { return status == QpStatus::kOptimal; }
};

/// Primal active-set method started from an LP feasible point. Q must be
/// symmetric PSD; a PSD-but-singular Q gets the ridge
/// `tol.qp_regularization * I` so that the minimizer is unique.
QpOutcome solve_qp(const QpProblem& p,
                   const Tolerances& tol = default_tolerances());

/// Stationarity residual ||Qz + c + G'mu||_inf of a QP candidate.
double kkt_residual(const QpProblem& p, const Vector& z, const Vector& mu);

}  // namespace cis
