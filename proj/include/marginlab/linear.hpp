#pragma once

#include <optional>

#include "marginlab/dataset.hpp"
#include "marginlab/geom.hpp"

namespace marginlab {

struct Hyperplane {
  Vec w;          // unit normal on every constructed output
  double b = 0.0; // decision value <w, x> + b
};

// Minimum distance from the sample to the hyperplane if it weakly separates
// (every point on its label's closed side), -inf otherwise.
double margin_of_hyperplane(const Hyperplane& h, const LabeledDataset& S);

struct Separability {
  bool separable = false;
  double hull_distance = 0.0;             // distance between class hulls
  std::optional<Hyperplane> witness;      // a weak separator when separable
};

// Weak separability with a nonzero normal. Positive certified hull distance
// settles it with the max-margin hyperplane as witness. Touching or
// overlapping hulls fall back to (a) a rank test: points spanning less than
// the full dimension are always separable by a hyperplane containing all of
// them, then (b) one LP maximizing the total constraint slack, which is
// positive iff a proper weak separator exists.
Separability is_separable(const AugmentedDataset& S_aug);

struct MaxMargin {
  enum Status { Ok, ZeroMargin, Inseparable };
  Status status = Inseparable;
  double gamma = 0.0;
  Hyperplane h;                 // valid when status == Ok
  Vec support_plus, support_minus;  // closest hull pair realizing 2*gamma
};

MaxMargin max_margin(const LabeledDataset& S);

// A weak separator of the augmented sample passing exactly through the given
// base point (margin 0 there), if one exists. LP: maximize the summed slack
// subject to all separation constraints plus the pinned equality; a positive
// optimum yields a separator, a zero optimum proves none exists (for
// full-dimensional data; degenerate data always separates improperly).
std::optional<Hyperplane> zero_margin_separator(const AugmentedDataset& S_aug, int pinned);

enum class MarginKind { Exact2d, SampledUpper, CertifiedLower, SampledLower };

struct MarginReport {
  MarginKind kind = MarginKind::Exact2d;
  double value = 0.0;               // -inf when inseparable, +inf when no
                                    // feasible direction was sampled
  std::vector<double> per_point;    // one entry per base point, same order
  std::optional<Hyperplane> witness;
};

// Exact worst-case margin over all weak separators of the augmented sample,
// evaluated on the base sample; planar inputs only.
//
// For a fixed unit direction w the adversary pushes the offset against the
// margin-deciding class, so the per-point value is <w, x> - min over same
// class augmented projections (sign-adjusted), and the direction is feasible
// iff min_+ >= max_-. The minimum over feasible directions is attained at one
// of: a support-argmin switch (an augmented hull edge normal), or a
// feasibility-arc endpoint (perpendicular of a hull-vertex pair across
// classes). Those finitely many candidate angles are enumerated and evaluated
// exactly.
MarginReport worst_case_margin_exact_2d(const AugmentedDataset& S_aug);

// Upper bound by direction sampling: the same per-direction evaluation at
// `budget` uniform unit directions; any feasible direction's value bounds the
// worst case from above. +inf when no sampled direction is feasible.
MarginReport worst_case_margin_upper(const AugmentedDataset& S_aug, std::size_t budget,
                                     SeededStream& stream);

// Certified lower bound: any separator of the augmented sample keeps each
// base point at distance >= its boundary distance within its own class
// augmented hull, so min over base points of that distance bounds the worst
// case from below. Exact boundary mode certifies; sampled mode only
// estimates.
MarginReport worst_case_margin_lower(const AugmentedDataset& S_aug, BoundaryMode mode,
                                     std::size_t budget, SeededStream* stream = nullptr);

// Max-margin hyperplane translated toward the positive class to sit at
// distance eps from the positive support point: (w*, b* - gamma* + eps).
// Requires 0 <= eps <= gamma*.
Hyperplane shifted_separator(const LabeledDataset& S, double eps);

}  // namespace marginlab
