#include "marginlab/linear.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace marginlab {

namespace {

double max_abs_coord(const std::vector<LabeledPoint>& pts) {
  double m = 0.0;
  for (const auto& p : pts) m = std::max(m, p.x.cwiseAbs().maxCoeff());
  return m;
}

double decision(const Hyperplane& h, const Vec& x) { return h.w.dot(x) + h.b; }

Hyperplane unit_hyperplane(const Vec& w, double b) {
  const double n = w.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw numerical_error("degenerate hyperplane normal");
  return {w / n, b / n};
}

bool weakly_separates(const Hyperplane& h, const std::vector<LabeledPoint>& pts, double slack) {
  for (const auto& p : pts)
    if (p.label * decision(h, p.x) < -slack) return false;
  return true;
}

// Unit vector orthogonal to the affine span of the points, when the span is a
// proper subspace; a hyperplane with that normal contains every point.
std::optional<Vec> affine_null_direction(const std::vector<LabeledPoint>& pts, int dim) {
  if (pts.empty()) throw invalid_input("empty point set");
  if (pts.size() == 1) {
    Vec e = Vec::Zero(dim);
    e[0] = 1.0;
    return e;
  }
  Eigen::MatrixXd K(static_cast<Eigen::Index>(pts.size()) - 1, dim);
  for (std::size_t i = 1; i < pts.size(); ++i) K.row(i - 1) = (pts[i].x - pts[0].x).transpose();
  const double scale = K.cwiseAbs().maxCoeff();
  if (scale == 0.0) {  // all points coincide
    Vec e = Vec::Zero(dim);
    e[0] = 1.0;
    return e;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(K / scale, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-9 * sv[0]) ++rank;
  if (rank >= dim) return std::nullopt;
  Vec n = svd.matrixV().col(dim - 1);
  n.normalize();
  return n;
}

// Shared LP over variables (w, b, t): every point on its label's closed side,
// total slack at least t, t capped at 1. A positive optimum is exactly a weak
// separator with some strictly cleared point, which forces w != 0: w = 0 with
// both classes present pushes b to 0 and every slack with it.
std::vector<LinearConstraint> separation_constraints(const std::vector<LabeledPoint>& pts,
                                                     int dim) {
  const int dv = dim + 2;
  std::vector<LinearConstraint> cons;
  cons.reserve(pts.size() + 2);
  Vec sum = Vec::Zero(dv);
  for (const auto& p : pts) {
    LinearConstraint c;
    c.a = Vec::Zero(dv);
    c.a.head(dim) = p.label * p.x;
    c.a[dim] = p.label;
    c.c = 0.0;
    sum += c.a;
    cons.push_back(std::move(c));
  }
  LinearConstraint total;
  total.a = sum;
  total.a[dim + 1] = -1.0;
  total.c = 0.0;
  cons.push_back(std::move(total));
  LinearConstraint cap;
  cap.a = Vec::Zero(dv);
  cap.a[dim + 1] = -1.0;
  cap.c = -1.0;
  cons.push_back(std::move(cap));
  return cons;
}

Vec slack_objective(int dim) {
  Vec obj = Vec::Zero(dim + 2);
  obj[dim + 1] = 1.0;
  return obj;
}

}  // namespace

double margin_of_hyperplane(const Hyperplane& h, const LabeledDataset& S) {
  S.validate();
  if (S.points.empty()) throw invalid_input("empty sample");
  const Hyperplane hn = unit_hyperplane(h.w, h.b);
  const double slack = tol::feasibility * std::max(1.0, max_abs_coord(S.points));
  double m = kInf;
  for (const auto& p : S.points) {
    const double v = p.label * decision(hn, p.x);
    if (v < -slack) return -kInf;
    m = std::min(m, std::max(v, 0.0));
  }
  return m;
}

Separability is_separable(const AugmentedDataset& S_aug) {
  S_aug.validate();
  const auto pts = S_aug.all_points();
  const int dim = S_aug.base.dim;
  const auto plus = S_aug.side(+1);
  const auto minus = S_aug.side(-1);
  if (plus.empty() || minus.empty()) throw invalid_input("both classes must be present");
  const double scale = std::max(1.0, max_abs_coord(pts));

  Separability out;
  const auto hd = hulls_distance(plus, minus);
  out.hull_distance = hd.distance;
  if (hd.certified_lower > tol::distance * scale) {
    Vec w = hd.closest_a - hd.closest_b;
    if (w.norm() > 0.0) {
      Hyperplane h = unit_hyperplane(w, 0.0);
      h.b = -h.w.dot(0.5 * (hd.closest_a + hd.closest_b));
      if (weakly_separates(h, pts, tol::feasibility * scale)) {
        out.separable = true;
        out.witness = h;
        return out;
      }
    }
  }

  if (auto n = affine_null_direction(pts, dim)) {
    out.separable = true;
    out.witness = Hyperplane{*n, -n->dot(pts.front().x)};
    return out;
  }

  const auto lp =
      solve_linear_program(dim + 2, separation_constraints(pts, dim), slack_objective(dim));
  // A claimed positive optimum is only a candidate: the tableau drifts on
  // heavily degenerate inputs (every row tight at the origin), so accept the
  // witness only after re-checking it against the raw points.
  if (lp.status == LpResult::Feasible && lp.value > 0.5 && lp.x.head(dim).norm() > 0.0) {
    Hyperplane h = unit_hyperplane(lp.x.head(dim), lp.x[dim]);
    if (weakly_separates(h, pts, tol::feasibility * scale)) {
      out.separable = true;
      out.witness = h;
    }
  }
  return out;
}

MaxMargin max_margin(const LabeledDataset& S) {
  S.validate();
  const auto plus = S.side(+1);
  const auto minus = S.side(-1);
  if (plus.empty() || minus.empty()) throw invalid_input("both classes must be present");
  MaxMargin mm;
  const auto hd = hulls_distance(plus, minus);
  if (hd.certified_lower > tol::distance * std::max(1.0, max_abs_coord(S.points))) {
    mm.status = MaxMargin::Ok;
    mm.gamma = 0.5 * hd.distance;
    mm.h = unit_hyperplane(hd.closest_a - hd.closest_b, 0.0);
    mm.h.b = -mm.h.w.dot(0.5 * (hd.closest_a + hd.closest_b));
    mm.support_plus = hd.closest_a;
    mm.support_minus = hd.closest_b;
    return mm;
  }
  const auto sep = is_separable(AugmentedDataset{S, {}, 0.0});
  mm.status = sep.separable ? MaxMargin::ZeroMargin : MaxMargin::Inseparable;
  mm.gamma = 0.0;
  if (sep.witness) mm.h = *sep.witness;
  return mm;
}

std::optional<Hyperplane> zero_margin_separator(const AugmentedDataset& S_aug, int pinned) {
  S_aug.validate();
  if (pinned < 0 || pinned >= static_cast<int>(S_aug.base.points.size()))
    throw invalid_input("pinned index out of range");
  const auto pts = S_aug.all_points();
  const int dim = S_aug.base.dim;
  const Vec& xp = S_aug.base.points[static_cast<std::size_t>(pinned)].x;

  if (auto n = affine_null_direction(pts, dim)) return Hyperplane{*n, -n->dot(xp)};

  auto cons = separation_constraints(pts, dim);
  LinearConstraint pin;
  pin.a = Vec::Zero(dim + 2);
  pin.a.head(dim) = xp;
  pin.a[dim] = 1.0;
  pin.c = 0.0;
  pin.rel = LinearConstraint::Eq;
  cons.push_back(std::move(pin));

  const auto lp = solve_linear_program(dim + 2, cons, slack_objective(dim));
  if (lp.status != LpResult::Feasible || lp.value <= 0.5) return std::nullopt;
  Hyperplane h = unit_hyperplane(lp.x.head(dim), lp.x[dim]);
  const double slack = tol::feasibility * std::max(1.0, max_abs_coord(pts));
  if (!weakly_separates(h, pts, slack) || std::abs(decision(h, xp)) > slack) return std::nullopt;
  return h;
}

namespace {

// Per-direction evaluation shared by the exact planar sweep and the sampled
// upper bound. For unit w, the adversary's tightest legal offset puts the
// boundary through the extreme augmented projection of one class, so a base
// point's worst margin in direction w is its projection gap to that extreme.
struct DirectionScan {
  Eigen::MatrixXd plus, minus, train;
  std::vector<int> label;
  double feas_slack = 0.0;
  Eigen::VectorXd bp, bm, bt;

  explicit DirectionScan(const AugmentedDataset& S_aug) {
    const auto vp = S_aug.side(+1);
    const auto vm = S_aug.side(-1);
    if (vp.empty() || vm.empty()) throw invalid_input("both classes must be present");
    const auto& base = S_aug.base.points;
    if (base.empty()) throw invalid_input("empty sample");
    const int dim = S_aug.base.dim;
    plus.resize(static_cast<Eigen::Index>(vp.size()), dim);
    for (std::size_t i = 0; i < vp.size(); ++i)
      plus.row(static_cast<Eigen::Index>(i)) = vp[i].transpose();
    minus.resize(static_cast<Eigen::Index>(vm.size()), dim);
    for (std::size_t i = 0; i < vm.size(); ++i)
      minus.row(static_cast<Eigen::Index>(i)) = vm[i].transpose();
    train.resize(static_cast<Eigen::Index>(base.size()), dim);
    label.reserve(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      train.row(static_cast<Eigen::Index>(i)) = base[i].x.transpose();
      label.push_back(base[i].label);
    }
    // Twice the per-point slack: a separator that only weakly clears both
    // extremes can sit up to two tolerances inside the gap.
    feas_slack = 2.0 * tol::feasibility * std::max(1.0, max_abs_coord(S_aug.all_points()));
    bp.resize(plus.rows());
    bm.resize(minus.rows());
    bt.resize(train.rows());
  }

  // Returns false for infeasible directions; otherwise updates the running
  // per-point minima and the best (value, witness) pair.
  bool scan(const Vec& w, std::vector<double>& per_point, double& best,
            std::optional<Hyperplane>& witness) {
    bp.noalias() = plus * w;
    bm.noalias() = minus * w;
    const double mplus = bp.minCoeff();
    const double mminus = bm.maxCoeff();
    if (mplus - mminus < -feas_slack) return false;
    bt.noalias() = train * w;
    for (Eigen::Index i = 0; i < bt.size(); ++i) {
      const bool pos = label[static_cast<std::size_t>(i)] > 0;
      double v = pos ? bt[i] - mplus : mminus - bt[i];
      if (v < 0.0) v = 0.0;
      auto& slot = per_point[static_cast<std::size_t>(i)];
      if (v < slot) slot = v;
      if (v < best) {
        best = v;
        witness = Hyperplane{w, pos ? -mplus : -mminus};
      }
    }
    return true;
  }
};

using P2 = Eigen::Vector2d;

double cross2(const P2& o, const P2& a, const P2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Monotone chain keeping collinear boundary points: every support-set switch
// angle is then an edge normal of the returned polygon.
std::vector<P2> hull2d(std::vector<P2> pts) {
  std::sort(pts.begin(), pts.end(), [](const P2& a, const P2& b) {
    return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const P2& a, const P2& b) { return a.x() == b.x() && a.y() == b.y(); }),
            pts.end());
  if (pts.size() <= 2) return pts;
  std::vector<P2> h;
  for (int pass = 0; pass < 2; ++pass) {
    const std::size_t lo = h.size();
    for (const auto& p : pts) {
      while (h.size() >= lo + 2 && cross2(h[h.size() - 2], h.back(), p) < 0.0) h.pop_back();
      h.push_back(p);
    }
    h.pop_back();
    std::reverse(pts.begin(), pts.end());
  }
  return h;
}

}  // namespace

MarginReport worst_case_margin_exact_2d(const AugmentedDataset& S_aug) {
  if (S_aug.base.dim != 2) throw invalid_input("exact sweep requires planar data");
  MarginReport rep;
  rep.kind = MarginKind::Exact2d;
  rep.per_point.assign(S_aug.base.points.size(), kInf);

  const auto sep = is_separable(S_aug);
  if (!sep.separable) {
    rep.value = -kInf;
    std::fill(rep.per_point.begin(), rep.per_point.end(), -kInf);
    return rep;
  }

  const auto vp = S_aug.side(+1);
  const auto vm = S_aug.side(-1);
  std::vector<P2> plus2, minus2;
  plus2.reserve(vp.size());
  minus2.reserve(vm.size());
  for (const auto& v : vp) plus2.emplace_back(v[0], v[1]);
  for (const auto& v : vm) minus2.emplace_back(v[0], v[1]);
  const auto hp = hull2d(plus2);
  const auto hm = hull2d(minus2);

  std::vector<Vec> dirs;
  auto push_dir = [&dirs](const P2& v) {
    const double n = v.norm();
    if (n <= 0.0) return;
    Vec w(2);
    w << v.x() / n, v.y() / n;
    dirs.push_back(std::move(w));
  };
  auto push_perp = [&push_dir](const P2& e) {
    push_dir(P2(-e.y(), e.x()));
    push_dir(P2(e.y(), -e.x()));
  };
  auto edge_events = [&push_perp](const std::vector<P2>& h) {
    if (h.size() < 2) return;
    const std::size_t edges = h.size() == 2 ? 1 : h.size();
    for (std::size_t i = 0; i < edges; ++i) push_perp(h[(i + 1) % h.size()] - h[i]);
  };
  edge_events(hp);
  edge_events(hm);
  for (const auto& u : hp)
    for (const auto& v : hm) push_perp(u - v);
  if (sep.witness) dirs.push_back(sep.witness->w);
  {
    const auto hd = hulls_distance(vp, vm);
    Vec w = hd.closest_a - hd.closest_b;
    if (w.norm() > 0.0) dirs.push_back(w.normalized());
  }

  DirectionScan scan(S_aug);
  double best = kInf;
  for (const auto& w : dirs) scan.scan(w, rep.per_point, best, rep.witness);
  rep.value = best;
  return rep;
}

MarginReport worst_case_margin_upper(const AugmentedDataset& S_aug, std::size_t budget,
                                     SeededStream& stream) {
  MarginReport rep;
  rep.kind = MarginKind::SampledUpper;
  rep.per_point.assign(S_aug.base.points.size(), kInf);
  DirectionScan scan(S_aug);
  double best = kInf;
  for (std::size_t k = 0; k < budget; ++k)
    scan.scan(stream.sphere(S_aug.base.dim, 1.0), rep.per_point, best, rep.witness);
  rep.value = best;  // +inf sentinel when no sampled direction was feasible
  return rep;
}

MarginReport worst_case_margin_lower(const AugmentedDataset& S_aug, BoundaryMode mode,
                                     std::size_t budget, SeededStream* stream) {
  MarginReport rep;
  rep.kind = mode == BoundaryMode::Exact ? MarginKind::CertifiedLower : MarginKind::SampledLower;
  const auto plus = S_aug.side(+1);
  const auto minus = S_aug.side(-1);
  const auto& base = S_aug.base.points;
  if (base.empty()) throw invalid_input("empty sample");
  rep.per_point.assign(base.size(), kInf);
  double best = kInf;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const auto& own = base[i].label > 0 ? plus : minus;
    const auto bd = boundary_distance(base[i].x, own, mode, budget, stream);
    rep.per_point[i] = bd.value;
    best = std::min(best, bd.value);
  }
  rep.value = best;
  return rep;
}

Hyperplane shifted_separator(const LabeledDataset& S, double eps) {
  const auto mm = max_margin(S);
  if (mm.status != MaxMargin::Ok)
    throw invalid_input("shifted separator requires a positive max margin");
  if (!(eps >= 0.0) || eps > mm.gamma * (1.0 + 1e-9))
    throw invalid_input("shift must lie in [0, gamma*]");
  return {mm.h.w, mm.h.b - mm.gamma + std::min(eps, mm.gamma)};
}

}  // namespace marginlab
