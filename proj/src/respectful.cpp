#include "marginlab/respectful.hpp"

#include <algorithm>
#include <cmath>

namespace marginlab {

namespace {

double coord_scale(const std::vector<Vec>& pts, const Vec* extra = nullptr) {
  double m = extra ? extra->cwiseAbs().maxCoeff() : 0.0;
  for (const auto& p : pts) m = std::max(m, p.cwiseAbs().maxCoeff());
  return std::max(1.0, m);
}

bool comb_fits(std::size_t n, std::size_t k, double cap) {
  if (k > n) return true;
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    c *= static_cast<double>(n - k + i) / static_cast<double>(i);
    if (c > cap) return false;
  }
  return true;
}

// Sum of C(n, j) for j = 1..k, saturating at cap.
double subset_count(std::size_t n, std::size_t k, double cap) {
  double total = 0.0, c = 1.0;
  for (std::size_t j = 1; j <= std::min(k, n); ++j) {
    c *= static_cast<double>(n - j + 1) / static_cast<double>(j);
    total += c;
    if (total > cap) return cap + 1.0;
  }
  return total;
}

// All subsets of size <= max_size with circumradius <= eps_tol, grown
// depth-first; circumradius is monotone under insertion, so an oversized ball
// prunes the whole branch.
void collect_pieces(const std::vector<Vec>& pts, double eps_tol, std::size_t max_size,
                    std::size_t start, std::vector<int>& cur, std::vector<Vec>& cur_pts,
                    std::vector<std::vector<Vec>>& out) {
  for (std::size_t j = start; j < pts.size(); ++j) {
    cur_pts.push_back(pts[j]);
    if (circumradius(cur_pts).radius <= eps_tol) {
      out.push_back(cur_pts);
      if (cur_pts.size() < max_size)
        collect_pieces(pts, eps_tol, max_size, j + 1, cur, cur_pts, out);
    }
    cur_pts.pop_back();
  }
}

}  // namespace

ReachWitness eps_reach_contains(const std::vector<Vec>& A, double eps, const Vec& x) {
  if (!(eps >= 0.0)) throw invalid_input("eps must be nonnegative");
  if (A.empty()) return {};
  const int d = static_cast<int>(x.size());
  if (!comb_fits(A.size(), static_cast<std::size_t>(d) + 1, 1e7))
    throw invalid_input("reach enumeration budget exceeded");
  const double dist_tol = tol::distance * coord_scale(A, &x);
  const double eps_tol = eps * (1.0 + 1e-9) + dist_tol;

  std::vector<int> cand;
  for (std::size_t i = 0; i < A.size(); ++i)
    if ((A[i] - x).norm() <= 2.0 * eps + dist_tol) cand.push_back(static_cast<int>(i));
  for (int i : cand)
    if ((A[static_cast<std::size_t>(i)] - x).norm() <= dist_tol) return {true, {i}};

  ReachWitness found;
  std::vector<int> cur;
  std::vector<Vec> cur_pts;
  auto dfs = [&](auto&& self, std::size_t start) -> bool {
    for (std::size_t j = start; j < cand.size(); ++j) {
      cur.push_back(cand[j]);
      cur_pts.push_back(A[static_cast<std::size_t>(cand[j])]);
      if (circumradius(cur_pts).radius <= eps_tol) {
        if (cur_pts.size() >= 2 &&
            distance_point_to_hull(x, cur_pts).distance <= dist_tol) {
          found = {true, cur};
          return true;
        }
        if (cur_pts.size() < static_cast<std::size_t>(d) + 1 && self(self, j + 1)) return true;
      }
      cur.pop_back();
      cur_pts.pop_back();
    }
    return false;
  };
  dfs(dfs, 0);
  return found;
}

Feasibility respectful_feasible(const AugmentedDataset& S_aug, double eps, std::size_t budget) {
  S_aug.validate();
  const auto plus = S_aug.side(+1);
  const auto minus = S_aug.side(-1);
  if (plus.empty() || minus.empty()) throw invalid_input("both classes must be present");
  const double dist_tol =
      tol::distance * std::max(coord_scale(plus), coord_scale(minus));

  if (std::isinf(eps)) {
    const auto hd = hulls_distance(plus, minus);
    if (hd.certified_lower > dist_tol) return Feasibility::Yes;
    if (hd.distance <= dist_tol) return Feasibility::No;
    return Feasibility::Unknown;
  }
  if (!(eps >= 0.0)) throw invalid_input("eps must be nonnegative");

  // Reach sets live inside the class hulls, so certified disjoint hulls settle
  // any eps without enumeration.
  {
    const auto hd = hulls_distance(plus, minus);
    if (hd.certified_lower > dist_tol) return Feasibility::Yes;
  }

  // A shared reach point z sits in an eps-ball around each piece, so every
  // cross-class vertex pair of the two pieces is within 4*eps; points without
  // such a neighbor can be discarded outright.
  const double reach = 4.0 * eps + dist_tol;
  std::vector<Vec> cand_p, cand_m;
  for (const auto& p : plus) {
    for (const auto& q : minus)
      if ((p - q).norm() <= reach) {
        cand_p.push_back(p);
        break;
      }
  }
  if (cand_p.empty()) return Feasibility::Yes;
  for (const auto& q : minus) {
    for (const auto& p : plus)
      if ((p - q).norm() <= reach) {
        cand_m.push_back(q);
        break;
      }
  }
  if (cand_m.empty()) return Feasibility::Yes;

  const auto k = static_cast<std::size_t>(S_aug.base.dim) + 1;
  const double cap = static_cast<double>(budget);
  if (subset_count(cand_p.size(), k, cap) * subset_count(cand_m.size(), k, cap) > cap)
    return Feasibility::Unknown;

  const double eps_tol = eps * (1.0 + 1e-9) + dist_tol;
  std::vector<std::vector<Vec>> pieces_p, pieces_m;
  std::vector<int> cur;
  std::vector<Vec> cur_pts;
  collect_pieces(cand_p, eps_tol, k, 0, cur, cur_pts, pieces_p);
  collect_pieces(cand_m, eps_tol, k, 0, cur, cur_pts, pieces_m);

  bool uncertain = false;
  for (const auto& bp : pieces_p)
    for (const auto& bm : pieces_m) {
      const auto hd = hulls_distance(bp, bm);
      if (hd.distance <= dist_tol) return Feasibility::No;
      if (hd.certified_lower <= dist_tol) uncertain = true;
    }
  return uncertain ? Feasibility::Unknown : Feasibility::Yes;
}

RegionClassifier nearest_neighbor_classifier(const AugmentedDataset& S_aug) {
  S_aug.validate();
  RegionClassifier f;
  f.kind = RegionClassifier::Kind::NearestNeighbor;
  f.plus = S_aug.side(+1);
  f.minus = S_aug.side(-1);
  return f;
}

RegionClassifier hull_indicator(std::vector<Vec> vertices, int region_label) {
  if (region_label != 1 && region_label != -1) throw invalid_input("label must be +1 or -1");
  RegionClassifier f;
  f.kind = RegionClassifier::Kind::HullIndicator;
  f.region = std::move(vertices);
  f.region_label = region_label;
  return f;
}

RegionClassifier reach_indicator(std::vector<Vec> points, double eps, int region_label) {
  if (region_label != 1 && region_label != -1) throw invalid_input("label must be +1 or -1");
  if (!(eps >= 0.0)) throw invalid_input("eps must be nonnegative");
  RegionClassifier f;
  f.kind = RegionClassifier::Kind::ReachIndicator;
  f.region = std::move(points);
  f.region_label = region_label;
  f.eps = eps;
  return f;
}

int classify(const RegionClassifier& f, const Vec& x) {
  switch (f.kind) {
    case RegionClassifier::Kind::NearestNeighbor: {
      double dp = kInf, dm = kInf;
      for (const auto& p : f.plus) dp = std::min(dp, (x - p).norm());
      for (const auto& p : f.minus) dm = std::min(dm, (x - p).norm());
      return dp <= dm ? +1 : -1;
    }
    case RegionClassifier::Kind::HullIndicator: {
      if (f.region.empty()) return -f.region_label;
      const bool in =
          distance_point_to_hull(x, f.region).distance <= tol::membership * coord_scale(f.region, &x);
      return in ? f.region_label : -f.region_label;
    }
    case RegionClassifier::Kind::ReachIndicator: {
      if (f.region.empty()) return -f.region_label;
      if (std::isinf(f.eps)) {
        const bool in = distance_point_to_hull(x, f.region).distance <=
                        tol::membership * coord_scale(f.region, &x);
        return in ? f.region_label : -f.region_label;
      }
      return eps_reach_contains(f.region, f.eps, x).contains ? f.region_label : -f.region_label;
    }
  }
  throw invalid_input("unknown classifier kind");
}

std::vector<double> region_margin_estimate(const RegionClassifier& f, const LabeledDataset& S,
                                           int probes, SeededStream& stream) {
  S.validate();
  if (probes < 1) throw invalid_input("probe count must be at least 1");
  std::vector<Vec> all;
  for (const auto& p : S.points) all.push_back(p.x);
  all.insert(all.end(), f.plus.begin(), f.plus.end());
  all.insert(all.end(), f.minus.begin(), f.minus.end());
  all.insert(all.end(), f.region.begin(), f.region.end());
  const double bracket = 2.0 * std::max(diameter(all), 1.0);

  std::vector<double> out;
  out.reserve(S.points.size());
  for (const auto& p : S.points) {
    if (classify(f, p.x) != p.label) {
      out.push_back(-kInf);
      continue;
    }
    double best = kInf;
    for (int k = 0; k < probes; ++k) {
      const Vec u = stream.sphere(S.dim, 1.0);
      if (classify(f, p.x + bracket * u) == p.label) continue;
      double lo = 0.0, hi = bracket;
      for (int it = 0; it < 30; ++it) {
        const double mid = 0.5 * (lo + hi);
        (classify(f, p.x + mid * u) == p.label ? lo : hi) = mid;
      }
      best = std::min(best, hi);
    }
    out.push_back(best);
  }
  return out;
}

namespace {

BoundaryDistance boundary_within(const Vec& x, const std::vector<Vec>& piece, std::size_t budget,
                                 std::uint64_t salt, bool& exact) {
  const auto d = static_cast<std::size_t>(x.size());
  if (comb_fits(piece.size(), d, static_cast<double>(budget)))
    return boundary_distance(x, piece, BoundaryMode::Exact, budget);
  exact = false;
  SeededStream fallback(0x6d67626f756e64ULL, salt);
  return boundary_distance(x, piece, BoundaryMode::Sampled, 4096, &fallback);
}

}  // namespace

AdversarialMargin adversarial_margin_inf(const AugmentedDataset& S_aug, int target_class,
                                         std::size_t budget) {
  S_aug.validate();
  if (target_class != 1 && target_class != -1) throw invalid_input("label must be +1 or -1");
  const auto plus = S_aug.side(+1);
  const auto minus = S_aug.side(-1);
  if (plus.empty() || minus.empty()) throw invalid_input("both classes must be present");
  const double dist_tol = tol::distance * std::max(coord_scale(plus), coord_scale(minus));
  const auto hd = hulls_distance(plus, minus);
  if (hd.certified_lower <= dist_tol)
    throw invalid_input("augmented hulls are not disjoint, no hull-respecting separator");

  const auto& T = target_class > 0 ? plus : minus;
  AdversarialMargin out;
  out.classifier = hull_indicator(T, target_class);
  out.per_point.assign(S_aug.base.points.size(), kInf);
  out.margin = kInf;
  for (std::size_t i = 0; i < S_aug.base.points.size(); ++i) {
    const auto& p = S_aug.base.points[i];
    if (p.label != target_class) continue;
    const auto bd = boundary_within(p.x, T, budget, i, out.exact);
    out.per_point[i] = bd.value;
    out.margin = std::min(out.margin, bd.value);
  }
  return out;
}

AdversarialMargin adversarial_margin_eps(const AugmentedDataset& S_aug, double eps,
                                         int target_class, std::size_t budget) {
  if (std::isinf(eps)) {
    auto out = adversarial_margin_inf(S_aug, target_class, budget);
    out.classifier =
        reach_indicator(S_aug.side(target_class), kInf, target_class);
    return out;
  }
  S_aug.validate();
  if (target_class != 1 && target_class != -1) throw invalid_input("label must be +1 or -1");
  switch (respectful_feasible(S_aug, eps, budget)) {
    case Feasibility::Yes: break;
    case Feasibility::No: throw invalid_input("no eps-respectful separator exists");
    case Feasibility::Unknown: throw invalid_input("feasibility enumeration budget exceeded");
  }

  const auto T = S_aug.side(target_class);
  const double dist_tol = tol::distance * coord_scale(T);
  const double eps_tol = eps * (1.0 + 1e-9) + dist_tol;

  AdversarialMargin out;
  out.classifier = reach_indicator(T, eps, target_class);
  out.per_point.assign(S_aug.base.points.size(), kInf);
  out.margin = kInf;

  for (std::size_t i = 0; i < S_aug.base.points.size(); ++i) {
    const auto& p = S_aug.base.points[i];
    if (p.label != target_class) continue;

    // Neighborhood that could share a piece with p, nearest first.
    std::vector<std::size_t> cand;
    for (std::size_t j = 0; j < T.size(); ++j)
      if ((T[j] - p.x).norm() <= 2.0 * eps + dist_tol) cand.push_back(j);
    std::sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
      const double da = (T[a] - p.x).norm(), db = (T[b] - p.x).norm();
      return da != db ? da < db : a < b;
    });

    // Greedy maximal piece around p: admit candidates in distance order while
    // the enclosing ball stays within eps. Extra seeds (p plus one forced
    // candidate) explore alternative maximal pieces when the neighborhood is
    // small enough to afford it.
    auto grow = [&](const std::vector<std::size_t>& seed) {
      std::vector<std::size_t> sel = seed;
      std::vector<Vec> pts{p.x};
      for (std::size_t s : seed) pts.push_back(T[s]);
      if (circumradius(pts).radius > eps_tol) return std::vector<std::size_t>{};
      for (std::size_t c : cand) {
        if (std::find(sel.begin(), sel.end(), c) != sel.end()) continue;
        pts.push_back(T[c]);
        if (circumradius(pts).radius <= eps_tol)
          sel.push_back(c);
        else
          pts.pop_back();
      }
      std::sort(sel.begin(), sel.end());
      return sel;
    };

    std::vector<std::vector<std::size_t>> pieces{grow({})};
    if (cand.size() <= 40)
      for (std::size_t c : cand) {
        auto piece = grow({c});
        if (!piece.empty() &&
            std::find(pieces.begin(), pieces.end(), piece) == pieces.end())
          pieces.push_back(std::move(piece));
      }

    double val = 0.0;
    for (const auto& piece : pieces) {
      std::vector<Vec> pts{p.x};
      for (std::size_t s : piece) pts.push_back(T[s]);
      const auto bd = boundary_within(p.x, pts, budget, i, out.exact);
      val = std::max(val, bd.value);
    }
    out.per_point[i] = val;
    out.margin = std::min(out.margin, val);
  }
  return out;
}

}  // namespace marginlab
