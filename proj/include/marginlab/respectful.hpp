#pragma once

#include <optional>

#include "marginlab/dataset.hpp"
#include "marginlab/geom.hpp"

namespace marginlab {

// Membership of x in the reach set A[eps] = union of conv(B) over B with
// circumradius(B) <= eps. By Caratheodory it is enough to search subsets of
// size <= d+1 (shrinking a subset never grows its circumradius), and any
// usable subset lies within 2*eps of x, which prunes the enumeration hard.
struct ReachWitness {
  bool contains = false;
  std::vector<int> subset;  // indices into A realizing membership
};
ReachWitness eps_reach_contains(const std::vector<Vec>& A, double eps, const Vec& x);

enum class Feasibility { Yes, No, Unknown };

// Is any eps-respectful separator of the augmented sample possible? Decided
// by disjointness of the two classes' reach sets. A common point forces every
// participating vertex pair across classes within 4*eps of each other, so
// only points with a cross-class neighbor that close can take part; the pair
// enumeration runs over those candidates and Unknown is returned when it
// would exceed `budget` subset pairs. eps = infinity reduces to hull
// disjointness.
Feasibility respectful_feasible(const AugmentedDataset& S_aug, double eps,
                                std::size_t budget = 2000000);

// Region classifier: predicts region_label on its region, the opposite label
// elsewhere. NearestNeighbor ignores region/region_label and uses both point
// sets with ties going to +1.
struct RegionClassifier {
  enum class Kind { NearestNeighbor, HullIndicator, ReachIndicator };
  Kind kind = Kind::NearestNeighbor;
  std::vector<Vec> plus, minus;  // NearestNeighbor references
  std::vector<Vec> region;       // HullIndicator / ReachIndicator vertex set
  int region_label = +1;
  double eps = kInf;             // ReachIndicator scale
};

RegionClassifier nearest_neighbor_classifier(const AugmentedDataset& S_aug);
RegionClassifier hull_indicator(std::vector<Vec> vertices, int region_label = +1);
RegionClassifier reach_indicator(std::vector<Vec> points, double eps, int region_label = +1);

int classify(const RegionClassifier& f, const Vec& x);

// Per-point upper bounds on d(x, f^{-1}(-y)): probe random rays from each
// training point, bisect the first bracketed sign change (30 halvings, bracket
// spanning the data diameter), take the smallest crossing. -inf marks a
// misclassified training point, +inf a point where no probe found the
// opposite region.
std::vector<double> region_margin_estimate(const RegionClassifier& f, const LabeledDataset& S,
                                           int probes, SeededStream& stream);

struct AdversarialMargin {
  RegionClassifier classifier;
  double margin = 0.0;             // min over target-class training points
  std::vector<double> per_point;   // +inf on non-target entries
  bool exact = true;               // false when a sampled boundary fell back
};

// The least generous hull-respecting classifier for one class: indicator of
// the target class's augmented hull. Its margin at each target training point
// is that point's exact distance to the hull boundary. Requires disjoint
// augmented hulls.
AdversarialMargin adversarial_margin_inf(const AugmentedDataset& S_aug, int target_class,
                                         std::size_t budget = 2000000);

// The least generous eps-respectful classifier: indicator of the target
// class's reach set. Margin estimated per target training point as the
// boundary distance within a maximal piece (greedily grown subset of
// circumradius <= eps around the point; several greedy seeds when the
// neighborhood is small), max over pieces, min over points. A sound lower
// bound on the classifier's true margin, exact on hull-shaped pieces.
AdversarialMargin adversarial_margin_eps(const AugmentedDataset& S_aug, double eps,
                                         int target_class, std::size_t budget = 2000000);

}  // namespace marginlab
