#pragma once

#include <optional>
#include <vector>

#include "marginlab/common.hpp"
#include "marginlab/rng.hpp"

namespace marginlab {

// ---------------------------------------------------------------------------
// Linear programming over free variables.
//
// Constraints are a . x >= c or a . x = c; x is unconstrained in sign. When an
// objective is given it is maximized, otherwise any feasible point is
// returned. Internally this runs a dense two-phase simplex on the standard
// form (x split into positive/negative parts), with lowest-index tie breaking
// on entering/leaving variables so runs are deterministic, and a pivot cap
// that reports the (rare) cycling case as NumericalFailure. Callers that act
// on a claimed optimum should re-check the returned point; the full-tableau
// update drifts on heavily degenerate inputs.
// ---------------------------------------------------------------------------

struct LinearConstraint {
  enum Rel { Ge, Eq };
  Vec a;
  double c = 0.0;
  Rel rel = Ge;
};

struct LpResult {
  enum Status { Feasible, Infeasible, Unbounded, NumericalFailure };
  Status status = NumericalFailure;
  Vec x;              // valid when status == Feasible
  double value = 0.0; // objective value when one was given
};

LpResult solve_linear_program(int dim, const std::vector<LinearConstraint>& constraints,
                              const std::optional<Vec>& objective = std::nullopt);

// ---------------------------------------------------------------------------
// Convex hull geometry.
// ---------------------------------------------------------------------------

struct HullProjection {
  double distance = 0.0;
  Vec closest;                  // point of conv(V) nearest to the query
  std::vector<double> weights;  // barycentric weights over V, sum to 1
  bool converged = true;
};

// Euclidean projection of x onto conv(V) by away-step Frank-Wolfe on the
// simplex of weights (exact line search; stops on the duality gap).
HullProjection distance_point_to_hull(const Vec& x, const std::vector<Vec>& V);

struct HullsDistance {
  double distance = 0.0;
  Vec closest_a, closest_b;     // realizing pair, closest_a in conv(A)
  std::vector<double> weights_a, weights_b;
  // Lower bound on the true distance certified by the final duality gap;
  // > 0 proves the hulls are disjoint.
  double certified_lower = 0.0;
  bool converged = true;
};

// Distance between conv(A) and conv(B). Works on the Minkowski difference
// implicitly (atoms are index pairs), so no quadratic vertex blowup.
HullsDistance hulls_distance(const std::vector<Vec>& A, const std::vector<Vec>& B);

enum class BoundaryMode { Exact, Sampled };

struct BoundaryDistance {
  double value = 0.0;
  bool exact = false;     // true when facet enumeration was used
  Vec facet_normal;       // outward normal of the nearest supporting hyperplane
};

// Distance from an interior point x to the boundary of conv(V).
//
// Exact mode enumerates d-subsets of V, keeps those whose affine hull supports
// the polytope (all of V weakly on one side) and minimizes the distance from x
// to these hyperplanes; requires C(|V|, d) <= budget. Sampled mode returns the
// upper bound min_u max_v <u, v - x> over random unit directions u.
// A degenerate (lower-dimensional) hull has boundary distance 0.
BoundaryDistance boundary_distance(const Vec& x, const std::vector<Vec>& V,
                                   BoundaryMode mode, std::size_t budget,
                                   SeededStream* stream = nullptr);

struct BallInHull {
  enum Status { Certified, Refuted, Unknown };
  Status status = Unknown;
  double boundary = 0.0;  // boundary distance estimate that was compared to rho
  Vec direction;          // refutation direction when status == Refuted
};

// Does the ball B(x, rho) fit inside conv(V)? Certification requires exact
// mode; sampled mode can only refute (some direction with support slack < rho)
// or answer Unknown.
BallInHull ball_in_hull(const Vec& x, double rho, const std::vector<Vec>& V,
                        BoundaryMode mode, std::size_t budget,
                        SeededStream* stream = nullptr);

struct MinBall {
  Vec center;
  double radius = 0.0;
  std::vector<int> support;  // input indices on the boundary sphere
};

// Minimum enclosing ball. Welzl move-to-front for d <= 10; an away-step
// Frank-Wolfe solve of the dual quadratic above that (relative radius error
// <= 1e-7).
MinBall circumradius(const std::vector<Vec>& A);

struct Hemisphere {
  bool inside = false;
  Vec direction;  // unit witness with <direction, z> > 0 for all z when inside
};

// Is there an open hemisphere containing every z_i? Decided by feasibility of
// { <z_i / |z_i|, u> >= 1 }: normalizing makes the test exactly invariant
// under positive rescaling of each point, and the homogeneous cone makes
// strict positivity equivalent to this LP.
Hemisphere in_common_hemisphere(const std::vector<Vec>& Z);

}  // namespace marginlab
