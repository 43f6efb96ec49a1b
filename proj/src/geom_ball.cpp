#include <algorithm>
#include <cmath>

#include "marginlab/geom.hpp"

namespace marginlab {

namespace {

// Smallest ball with all support points on its sphere: the circumcenter lies
// in the affine hull of the (affinely independent) support; the SPD Gram
// system 2 M^T M beta = (|r_i - r_0|^2) gives the offsets.
struct SupportBall {
  Vec center;
  double r2 = -1.0;  // negative: empty ball, contains nothing

  bool contains(const Vec& p, double slack) const {
    if (r2 < 0.0) return false;
    return (p - center).squaredNorm() <= r2 + slack;
  }
};

SupportBall ball_from_support(const std::vector<Vec>& pts, const std::vector<int>& support) {
  SupportBall b;
  if (support.empty()) return b;
  const Vec& r0 = pts[support[0]];
  const int k = static_cast<int>(support.size()) - 1;
  if (k == 0) {
    b.center = r0;
    b.r2 = 0.0;
    return b;
  }
  Eigen::MatrixXd M(r0.size(), k);
  Eigen::VectorXd rhs(k);
  for (int i = 0; i < k; ++i) {
    const Vec diff = pts[support[i + 1]] - r0;
    M.col(i) = diff;
    rhs[i] = diff.squaredNorm();
  }
  const Eigen::MatrixXd G = 2.0 * M.transpose() * M;
  const Eigen::VectorXd beta = G.ldlt().solve(rhs);
  b.center = r0 + M * beta;
  b.r2 = (b.center - r0).squaredNorm();
  return b;
}

struct Welzl {
  const std::vector<Vec>& pts;
  const int d;
  std::vector<int> perm;
  std::vector<int> support;
  std::vector<int> result_support;  // support of the most recently built ball

  explicit Welzl(const std::vector<Vec>& p)
      : pts(p), d(static_cast<int>(p.front().size())), perm(p.size()) {
    for (std::size_t i = 0; i < pts.size(); ++i) perm[i] = static_cast<int>(i);
  }

  // Move-to-front recursion over the first `end` entries of perm with the
  // current boundary set fixed; depth is bounded by d + 1.
  SupportBall mtf(int end) {
    SupportBall ball = ball_from_support(pts, support);
    result_support = support;
    if (static_cast<int>(support.size()) == d + 1) return ball;
    for (int i = 0; i < end; ++i) {
      const int pi = perm[i];
      const double slack = tol::support_slack * std::max(1.0, ball.r2);
      if (!ball.contains(pts[pi], slack)) {
        support.push_back(pi);
        ball = mtf(i);
        support.pop_back();
        std::rotate(perm.begin(), perm.begin() + i, perm.begin() + i + 1);
      }
    }
    return ball;
  }
};

// Dual quadratic for dimensions above the Welzl range:
//   min over the simplex of |A lambda|^2 - sum_i lambda_i |a_i|^2,
// whose optimum gives center = A lambda and radius^2 = -optimum. Same
// away-step Frank-Wolfe pattern as the hull projection.
MinBall minball_dual(const std::vector<Vec>& A) {
  const int d = static_cast<int>(A.front().size());
  const int n = static_cast<int>(A.size());
  Vec centroid = Vec::Zero(d);
  for (const auto& a : A) centroid += a;
  centroid /= n;
  double scale = 0.0;
  for (const auto& a : A) scale = std::max(scale, (a - centroid).norm());
  if (scale <= 0.0) return {A.front(), 0.0, {0}};

  std::vector<Vec> S(n);
  std::vector<double> b(n);
  for (int i = 0; i < n; ++i) {
    S[i] = (A[i] - centroid) / scale;
    b[i] = S[i].squaredNorm();
  }
  std::vector<double> lam(n, 0.0);
  lam[0] = 1.0;
  Vec c = S[0];
  double linear = b[0];
  for (int iter = 0; iter < 200000; ++iter) {
    int s = 0, a = -1;
    double gs = kInf, ga = -kInf;
    for (int i = 0; i < n; ++i) {
      const double g = 2.0 * c.dot(S[i]) - b[i];
      if (g < gs) { gs = g; s = i; }
      if (lam[i] > 1e-16 && g > ga) { ga = g; a = i; }
    }
    const double glam = 2.0 * c.squaredNorm() - linear;  // <g, lambda>
    if (glam - gs <= 1e-13) break;
    const bool fw = (glam - gs >= ga - glam) || a < 0;
    const Vec dirv = fw ? Vec(S[s] - c) : Vec(c - S[a]);
    const double dirb = fw ? b[s] - linear : linear - b[a];
    const double cap = fw ? 1.0 : (lam[a] >= 1.0 ? kInf : lam[a] / (1.0 - lam[a]));
    const double den = dirv.squaredNorm();
    if (den <= 0.0) break;
    const double step = std::clamp((0.5 * dirb - c.dot(dirv)) / den, 0.0, cap);
    if (step <= 0.0) break;
    if (fw) {
      for (auto& l : lam) l *= 1.0 - step;
      lam[s] += step;
    } else {
      for (auto& l : lam) l *= 1.0 + step;
      lam[a] -= step;
    }
    c += step * dirv;
    linear += step * dirb;
  }
  MinBall out;
  out.center = centroid + scale * c;
  double r2 = 0.0;
  for (int i = 0; i < n; ++i) r2 = std::max(r2, (S[i] - c).squaredNorm());
  out.radius = scale * std::sqrt(r2);
  for (int i = 0; i < n; ++i)
    if ((A[i] - out.center).norm() >= out.radius - tol::support_slack * std::max(1.0, out.radius))
      out.support.push_back(i);
  return out;
}

}  // namespace

MinBall circumradius(const std::vector<Vec>& A) {
  if (A.empty()) throw invalid_input("circumradius: empty input");
  const int d = static_cast<int>(A.front().size());
  for (const auto& a : A)
    if (a.size() != d) throw invalid_input("circumradius: dimension mismatch");
  if (A.size() == 1) return {A.front(), 0.0, {0}};
  if (d > 10) return minball_dual(A);

  Welzl w(A);
  const SupportBall ball = w.mtf(static_cast<int>(A.size()));
  MinBall out;
  out.center = ball.center;
  out.radius = std::sqrt(std::max(0.0, ball.r2));
  out.support = w.result_support;
  std::sort(out.support.begin(), out.support.end());
  if (out.support.empty()) out.support.push_back(0);
  return out;
}

}  // namespace marginlab
