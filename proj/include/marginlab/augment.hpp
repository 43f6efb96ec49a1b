#pragma once

#include <cstdint>
#include <string>

#include "marginlab/dataset.hpp"
#include "marginlab/rng.hpp"

namespace marginlab {

// Serializable description of one augmentation pass. Field names match the
// JSON config schema: strategy, N, r, tau, eps, seed. tau is derived for
// cover_spherical (negative = compute from N, d, r); eps is the simplex
// circumradius.
struct AugmentationPlan {
  enum class Strategy { Spherical, CoverSpherical, MaxMarginDPlus1, Simplex, None };
  Strategy strategy = Strategy::None;
  int N = 0;
  double r = 0.0;
  double tau = -1.0;
  double eps = 0.0;
  std::uint64_t seed = 0;
};

// Accepts the canonical names (spherical, cover_spherical, maxmargin_d_plus_1,
// simplex, none) plus the CLI short forms cover and maxmargin.
AugmentationPlan::Strategy strategy_from_string(const std::string& s);
std::string strategy_name(AugmentationPlan::Strategy s);

// N uniform samples from the radius-r sphere around every source point,
// labels inherited. Each source uses its own derived stream (child of
// `stream`, indexed by source position), so output is reproducible
// independently of evaluation order.
AugmentedDataset spherical_augment(const LabeledDataset& S, int N, double r,
                                   SeededStream& stream);

// Greedy farthest-point cover: start at index 0, repeatedly add the point
// farthest from the current cover (lowest index on ties) until every point is
// within tau. Returns selected indices in insertion order.
std::vector<int> tau_cover(const std::vector<Vec>& X, double tau);

// Cover radius (1/(4*sqrt(2))) * sqrt(ln(N/d)/d) * r (natural log). Requires
// N > d, otherwise the log is non-positive and the scheme is undefined.
double cover_tau(int N, int d, double r);

// Spherical augmentation restricted to a tau-cover of each class, tau from
// cover_tau. Source streams are still indexed by original dataset position,
// so the points a covered source generates do not depend on which other
// sources were selected.
AugmentedDataset cover_augment(const LabeledDataset& S, int N, double r, SeededStream& stream);

// The d+1 point construction pinning the max-margin hyperplane: d affinely
// independent points on H* (the projected dataset centroid plus circumradius-
// scaled orthonormal frame offsets), labeled +1, and their mean -- strictly
// inside their hull, still on H* -- labeled -1. The only separator of the
// result is H* itself. Requires d >= 2 and a positive max margin.
AugmentedDataset maxmargin_augment(const LabeledDataset& S);

// Vertices of a regular d-simplex with circumcenter `center` and circumradius
// exactly rho (d+1 points; inradius rho/d).
std::vector<Vec> regular_simplex(int d, const Vec& center, double rho);

// A regular d-simplex of circumradius rho around every source point, labels
// inherited; the source sits strictly inside its simplex.
AugmentedDataset simplex_augment(const LabeledDataset& S, double rho);

AugmentedDataset apply_plan(const LabeledDataset& S, const AugmentationPlan& plan);

}  // namespace marginlab
