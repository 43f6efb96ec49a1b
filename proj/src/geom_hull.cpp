#include <algorithm>
#include <cmath>

#include "marginlab/geom.hpp"

namespace marginlab {

namespace {

constexpr std::size_t kFwIterCap = 1000000;
constexpr double kGapTol = 1e-12;   // in the unit-scaled frame
constexpr double kFMin = 1e-28;

// Minimum-norm point of conv({a_i - b_j}) by away-step Frank-Wolfe with exact
// line search. Atoms are explicit index pairs so away steps stay valid on the
// product of simplices; the linear minimization splits over the two vertex
// lists, which keeps the Minkowski difference implicit. Inputs are assumed
// pre-shifted/scaled to roughly the unit ball. Entering ties resolve to the
// lowest index.
struct PairFW {
  const std::vector<Vec>& A;
  const std::vector<Vec>& B;
  struct Atom { int i, j; double w; };
  std::vector<Atom> act;
  Vec p;
  double f = 0.0, gap = kInf;
  bool converged = false;

  PairFW(const std::vector<Vec>& a, const std::vector<Vec>& b) : A(a), B(b) {
    act.push_back({0, 0, 1.0});
    p = A[0] - B[0];
  }

  Vec atom_vec(const Atom& t) const { return A[t.i] - B[t.j]; }

  void recompute() {
    p = Vec::Zero(A.front().size());
    double sum = 0.0;
    for (const auto& t : act) {
      p += t.w * atom_vec(t);
      sum += t.w;
    }
    if (sum > 0.0 && std::abs(sum - 1.0) > 1e-12) {
      const double inv = 1.0 / sum;
      for (auto& t : act) t.w *= inv;
      p *= inv;
    }
  }

  void run() {
    // Intersecting hulls drive f toward zero without ever certifying a gap;
    // bail out once a long window shows no relative progress (the dual bound
    // f - gap stays valid at any iterate).
    double f_checkpoint = kInf;
    for (std::size_t iter = 0; iter < kFwIterCap; ++iter) {
      if ((iter & 63u) == 0) recompute();
      f = p.squaredNorm();
      if (f <= kFMin) { gap = 2.0 * f; converged = true; return; }
      if ((iter & 4095u) == 0) {
        if (f > f_checkpoint * (1.0 - 1e-6)) break;
        f_checkpoint = f;
      }
      // LMO: min <2p, a_i> over A, max over B.
      int si = 0, sj = 0;
      double best_a = p.dot(A[0]), best_b = p.dot(B[0]);
      for (int i = 1; i < static_cast<int>(A.size()); ++i) {
        const double v = p.dot(A[i]);
        if (v < best_a) { best_a = v; si = i; }
      }
      for (int j = 1; j < static_cast<int>(B.size()); ++j) {
        const double v = p.dot(B[j]);
        if (v > best_b) { best_b = v; sj = j; }
      }
      gap = 2.0 * (f - (best_a - best_b));
      if (gap <= kGapTol) { converged = true; return; }

      // Away atom among the active set.
      std::size_t ai = 0;
      double worst = -kInf;
      for (std::size_t k = 0; k < act.size(); ++k) {
        const double v = p.dot(A[act[k].i]) - p.dot(B[act[k].j]);
        if (v > worst) { worst = v; ai = k; }
      }
      const double gain_fw = f - (best_a - best_b);
      const double gain_away = worst - f;

      if (gain_fw >= gain_away) {
        const Vec s = A[si] - B[sj];
        const Vec dir = s - p;
        const double dd = dir.squaredNorm();
        if (dd <= 0.0) { converged = true; return; }
        const double step = std::clamp(-p.dot(dir) / dd, 0.0, 1.0);
        for (auto& t : act) t.w *= 1.0 - step;
        bool found = false;
        for (auto& t : act)
          if (t.i == si && t.j == sj) { t.w += step; found = true; break; }
        if (!found) act.push_back({si, sj, step});
        p += step * dir;
      } else {
        const Atom away = act[ai];
        const Vec dir = p - atom_vec(away);
        const double dd = dir.squaredNorm();
        if (dd <= 0.0) { converged = true; return; }
        const double cap = away.w >= 1.0 ? kInf : away.w / (1.0 - away.w);
        const double step = std::clamp(-p.dot(dir) / dd, 0.0, cap);
        for (auto& t : act) t.w *= 1.0 + step;
        act[ai].w -= step;
        p += step * dir;
      }
      act.erase(std::remove_if(act.begin(), act.end(),
                               [](const Atom& t) { return t.w <= 1e-16; }),
                act.end());
      if (act.empty()) { act.push_back({si, sj, 1.0}); recompute(); }
    }
    recompute();
    f = p.squaredNorm();
  }
};

void check_points(const std::vector<Vec>& V, const char* who) {
  if (V.empty()) throw invalid_input(std::string(who) + ": empty vertex list");
  const Eigen::Index d = V.front().size();
  if (d < 1) throw invalid_input(std::string(who) + ": zero-dimensional point");
  for (const auto& v : V)
    if (v.size() != d) throw invalid_input(std::string(who) + ": dimension mismatch");
}

}  // namespace

HullsDistance hulls_distance(const std::vector<Vec>& A, const std::vector<Vec>& B) {
  check_points(A, "hulls_distance");
  check_points(B, "hulls_distance");
  if (A.front().size() != B.front().size())
    throw invalid_input("hulls_distance: dimension mismatch");
  const int d = static_cast<int>(A.front().size());

  Vec center = Vec::Zero(d);
  for (const auto& v : A) center += v;
  for (const auto& v : B) center += v;
  center /= static_cast<double>(A.size() + B.size());
  double scale = 0.0;
  for (const auto& v : A) scale = std::max(scale, (v - center).norm());
  for (const auto& v : B) scale = std::max(scale, (v - center).norm());

  HullsDistance out;
  out.weights_a.assign(A.size(), 0.0);
  out.weights_b.assign(B.size(), 0.0);
  if (scale <= 0.0) {
    // every point of both lists coincides
    out.closest_a = A.front();
    out.closest_b = B.front();
    out.weights_a[0] = out.weights_b[0] = 1.0;
    return out;
  }

  std::vector<Vec> As(A.size()), Bs(B.size());
  for (std::size_t i = 0; i < A.size(); ++i) As[i] = (A[i] - center) / scale;
  for (std::size_t j = 0; j < B.size(); ++j) Bs[j] = (B[j] - center) / scale;

  PairFW fw(As, Bs);
  fw.run();
  out.converged = fw.converged;
  for (const auto& t : fw.act) {
    out.weights_a[t.i] += t.w;
    out.weights_b[t.j] += t.w;
  }
  out.closest_a = Vec::Zero(d);
  out.closest_b = Vec::Zero(d);
  for (std::size_t i = 0; i < A.size(); ++i)
    if (out.weights_a[i] != 0.0) out.closest_a += out.weights_a[i] * A[i];
  for (std::size_t j = 0; j < B.size(); ++j)
    if (out.weights_b[j] != 0.0) out.closest_b += out.weights_b[j] * B[j];
  out.distance = (out.closest_a - out.closest_b).norm();
  out.certified_lower = scale * std::sqrt(std::max(0.0, fw.f - fw.gap));
  return out;
}

HullProjection distance_point_to_hull(const Vec& x, const std::vector<Vec>& V) {
  check_points(V, "distance_point_to_hull");
  if (x.size() != V.front().size())
    throw invalid_input("distance_point_to_hull: dimension mismatch");
  const auto hd = hulls_distance(V, {x});
  HullProjection out;
  out.distance = hd.distance;
  out.closest = hd.closest_a;
  out.weights = hd.weights_a;
  out.converged = hd.converged;
  return out;
}

namespace {

int affine_rank(const std::vector<Vec>& V) {
  const int d = static_cast<int>(V.front().size());
  if (V.size() == 1) return 0;
  Eigen::MatrixXd M(static_cast<Eigen::Index>(V.size()) - 1, d);
  for (std::size_t i = 1; i < V.size(); ++i) M.row(i - 1) = (V[i] - V[0]).transpose();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  qr.setThreshold(1e-9);
  return static_cast<int>(qr.rank());
}

// Appends the supporting-hyperplane candidate defined by the subset, if it is
// one. Returns the distance from x or +inf.
double facet_distance(const Vec& x, const std::vector<Vec>& V,
                      const std::vector<int>& idx, double side_tol, Vec* normal_out) {
  const int d = static_cast<int>(x.size());
  Vec n(d);
  if (d == 1) {
    n[0] = 1.0;
  } else if (d == 2) {
    const Vec e = V[idx[1]] - V[idx[0]];
    n[0] = -e[1];
    n[1] = e[0];
    const double nn = n.norm();
    if (nn <= 1e-14) return kInf;
    n /= nn;
  } else {
    Eigen::MatrixXd M(d - 1, d);
    for (int k = 1; k < d; ++k) M.row(k - 1) = (V[idx[k]] - V[idx[0]]).transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    lu.setThreshold(1e-9);
    if (lu.dimensionOfKernel() != 1) return kInf;
    n = lu.kernel().col(0);
    n /= n.norm();
  }
  const double c = n.dot(V[idx[0]]);
  double lo = 0.0, hi = 0.0;
  for (const auto& v : V) {
    const double s = n.dot(v) - c;
    lo = std::min(lo, s);
    hi = std::max(hi, s);
    if (lo < -side_tol && hi > side_tol) return kInf;  // cuts through the hull
  }
  if (normal_out) *normal_out = (hi <= side_tol) ? n : Vec(-n);
  return std::abs(n.dot(x) - c);
}

}  // namespace

BoundaryDistance boundary_distance(const Vec& x, const std::vector<Vec>& V,
                                   BoundaryMode mode, std::size_t budget,
                                   SeededStream* stream) {
  check_points(V, "boundary_distance");
  const int d = static_cast<int>(x.size());
  if (V.front().size() != d) throw invalid_input("boundary_distance: dimension mismatch");

  BoundaryDistance out;
  if (mode == BoundaryMode::Sampled) {
    if (!stream) throw invalid_input("boundary_distance: sampled mode needs a stream");
    out.exact = false;
    out.value = kInf;
    for (std::size_t t = 0; t < budget; ++t) {
      const Vec u = stream->sphere(d, 1.0);
      double support = -kInf;
      for (const auto& v : V) support = std::max(support, u.dot(v - x));
      if (support < out.value) {
        out.value = support;
        out.facet_normal = u;
      }
    }
    out.value = std::max(out.value, 0.0);
    return out;
  }

  out.exact = true;
  if (affine_rank(V) < d) {
    // lower-dimensional hull: everything is boundary
    out.value = 0.0;
    return out;
  }

  // C(|V|, d) within budget?
  double combos = 1.0;
  const std::size_t nv = V.size();
  for (int k = 0; k < d; ++k) combos *= static_cast<double>(nv - k) / (k + 1);
  if (combos > static_cast<double>(budget))
    throw invalid_input("boundary_distance: facet enumeration over budget");

  double scale = 1.0;
  for (const auto& v : V) scale = std::max(scale, v.lpNorm<Eigen::Infinity>());
  const double side_tol = tol::feasibility * scale;

  std::vector<int> idx(d);
  for (int k = 0; k < d; ++k) idx[k] = k;
  out.value = kInf;
  Vec normal;
  for (;;) {
    const double dist = facet_distance(x, V, idx, side_tol, &normal);
    if (dist < out.value) {
      out.value = dist;
      out.facet_normal = normal;
    }
    // next d-combination
    int k = d - 1;
    while (k >= 0 && idx[k] == static_cast<int>(nv) - d + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int j = k + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
  }
  if (!std::isfinite(out.value)) out.value = 0.0;  // no supporting facet found
  return out;
}

BallInHull ball_in_hull(const Vec& x, double rho, const std::vector<Vec>& V,
                        BoundaryMode mode, std::size_t budget, SeededStream* stream) {
  if (rho < 0.0) throw invalid_input("ball_in_hull: negative radius");
  BallInHull out;
  const auto proj = distance_point_to_hull(x, V);
  if (proj.distance > tol::distance) {
    out.status = BallInHull::Refuted;
    out.boundary = 0.0;
    out.direction = (x - proj.closest) / (x - proj.closest).norm();
    return out;
  }
  if (rho == 0.0) {
    out.status = BallInHull::Certified;
    return out;
  }
  const auto bd = boundary_distance(x, V, mode, budget, stream);
  out.boundary = bd.value;
  if (mode == BoundaryMode::Exact) {
    if (tol::ge(bd.value, rho, rho)) {
      out.status = BallInHull::Certified;
    } else {
      out.status = BallInHull::Refuted;
      out.direction = bd.facet_normal;
    }
  } else {
    if (!tol::ge(bd.value, rho, rho)) {
      out.status = BallInHull::Refuted;
      out.direction = bd.facet_normal;
    } else {
      out.status = BallInHull::Unknown;  // sampling can never certify
    }
  }
  return out;
}

}  // namespace marginlab
