#pragma once

#include <optional>
#include <string>
#include <vector>

#include "marginlab/common.hpp"
#include "marginlab/rng.hpp"

namespace marginlab {

struct LabeledPoint {
  Vec x;
  int label = 1;  // +1 or -1
};

// Finite labeled sample. Invariants checked on construction/load: uniform
// dimension, labels in {+1, -1}, and no coordinate vector carrying both
// labels (duplicates within one class are fine).
struct LabeledDataset {
  int dim = 0;
  std::vector<LabeledPoint> points;

  void validate() const;
  std::vector<Vec> side(int label) const;
  int count(int label) const;
};

// Artificial point with provenance: source is the index of the dataset point
// it was generated from, or -1 for constructed points with no single source.
struct ArtificialPoint {
  Vec x;
  int label = 1;
  int source = -1;
};

struct AugmentedDataset {
  LabeledDataset base;
  std::vector<ArtificialPoint> artificial;
  double radius = 0.0;  // perturbation radius; 0 when not radius-based

  void validate() const;
  // base + artificial points of one class
  std::vector<Vec> side(int label) const;
  std::vector<LabeledPoint> all_points() const;
};

// --- I/O ------------------------------------------------------------------
// CSV: header x0,...,x{d-1},label with labels written literally as 1 / -1.
// JSON: {"dim": d, "points": [{"x": [...], "label": 1}, ...]}; an augmented
// file adds {"artificial": [{"x": [...], "label": -1, "source": 0|null}],
// "radius": r}. Doubles are written in shortest round-trip form, so
// save/load round-trips are bit-exact.

LabeledDataset load_dataset_csv(const std::string& path);
void save_dataset_csv(const LabeledDataset& ds, const std::string& path);

LabeledDataset load_dataset_json(const std::string& path);
void save_dataset_json(const LabeledDataset& ds, const std::string& path);

AugmentedDataset load_augmented_json(const std::string& path);
void save_augmented_json(const AugmentedDataset& ds, const std::string& path);

// Extension-dispatching load; .csv / .json. Plain files load with an empty
// artificial list.
AugmentedDataset load_any(const std::string& path);

// --- Constructions --------------------------------------------------------

// Two opposite points at distance 2*gamma on the first axis: {0} labeled +1
// and 2*gamma*e1 labeled -1; the best separating margin is exactly gamma.
LabeledDataset make_two_point(double gamma, int d);

// Planar adversarial family on the parabola y = x^2 (scaled by r): n positive
// points at s_0 = 3, s_{i+1} = 2 s_i + 4 placed so every tangent at one of
// them clears the others by more than r, plus m negative points on a deep
// horizontal line whose depth is the smallest multiple of r keeping every
// tangent more than r away from them.
LabeledDataset make_parabola_adversarial(int n, int m, double r);

// Gaussian-free cluster construction used by the cover experiments: k tight
// clusters per class, each of `per` points inside a ball of `cluster_radius`,
// cluster centers on two vertical lines at x = -+ separation/2 (d = 2) or on
// opposite axis-aligned faces in higher dimension.
LabeledDataset make_clusters(int k_per_class, int per, double cluster_radius,
                             double separation, int d, SeededStream& stream);

// min_{x+ in X+, x- in X-} |x+ - x-|
double class_distance(const LabeledDataset& ds);

double diameter(const std::vector<Vec>& pts);

}  // namespace marginlab
