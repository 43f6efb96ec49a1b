#include "marginlab/augment.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "marginlab/geom.hpp"
#include "marginlab/linear.hpp"

namespace marginlab {

AugmentationPlan::Strategy strategy_from_string(const std::string& s) {
  using S = AugmentationPlan::Strategy;
  if (s == "spherical") return S::Spherical;
  if (s == "cover_spherical" || s == "cover") return S::CoverSpherical;
  if (s == "maxmargin_d_plus_1" || s == "maxmargin") return S::MaxMarginDPlus1;
  if (s == "simplex") return S::Simplex;
  if (s == "none") return S::None;
  throw invalid_input("unknown augmentation strategy: " + s);
}

std::string strategy_name(AugmentationPlan::Strategy s) {
  using St = AugmentationPlan::Strategy;
  switch (s) {
    case St::Spherical: return "spherical";
    case St::CoverSpherical: return "cover_spherical";
    case St::MaxMarginDPlus1: return "maxmargin_d_plus_1";
    case St::Simplex: return "simplex";
    case St::None: return "none";
  }
  throw invalid_input("unknown augmentation strategy");
}

namespace {

void augment_sources(const LabeledDataset& S, const std::vector<int>& sources, int N, double r,
                     SeededStream& stream, AugmentedDataset& out) {
  out.artificial.reserve(sources.size() * static_cast<std::size_t>(N));
  for (int idx : sources) {
    auto child = stream.child(static_cast<std::uint64_t>(idx));
    const auto& src = S.points[static_cast<std::size_t>(idx)];
    for (int j = 0; j < N; ++j)
      out.artificial.push_back({src.x + child.sphere(S.dim, r), src.label, idx});
  }
}

}  // namespace

AugmentedDataset spherical_augment(const LabeledDataset& S, int N, double r,
                                   SeededStream& stream) {
  S.validate();
  if (N < 1) throw invalid_input("perturbation count must be at least 1");
  if (!(r > 0.0)) throw invalid_input("perturbation radius must be positive");
  AugmentedDataset out{S, {}, r};
  std::vector<int> all(S.points.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  augment_sources(S, all, N, r, stream, out);
  out.validate();
  return out;
}

std::vector<int> tau_cover(const std::vector<Vec>& X, double tau) {
  if (!(tau >= 0.0)) throw invalid_input("cover radius must be nonnegative");
  if (X.empty()) return {};
  std::vector<int> cover{0};
  std::vector<double> dist(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) dist[i] = (X[i] - X[0]).norm();
  for (;;) {
    std::size_t far = 0;
    for (std::size_t i = 1; i < X.size(); ++i)
      if (dist[i] > dist[far]) far = i;
    if (dist[far] <= tau) break;
    cover.push_back(static_cast<int>(far));
    for (std::size_t i = 0; i < X.size(); ++i)
      dist[i] = std::min(dist[i], (X[i] - X[far]).norm());
  }
  return cover;
}

double cover_tau(int N, int d, double r) {
  if (N <= d)
    throw invalid_input("cover radius needs N > d (otherwise ln(N/d) is not positive)");
  return 1.0 / (4.0 * std::sqrt(2.0)) *
         std::sqrt(std::log(static_cast<double>(N) / d) / d) * r;
}

AugmentedDataset cover_augment(const LabeledDataset& S, int N, double r, SeededStream& stream) {
  S.validate();
  if (N < 1) throw invalid_input("perturbation count must be at least 1");
  if (!(r > 0.0)) throw invalid_input("perturbation radius must be positive");
  const double tau = cover_tau(N, S.dim, r);

  std::vector<int> sources;
  for (int label : {+1, -1}) {
    std::vector<Vec> side;
    std::vector<int> index;
    for (std::size_t i = 0; i < S.points.size(); ++i)
      if (S.points[i].label == label) {
        side.push_back(S.points[i].x);
        index.push_back(static_cast<int>(i));
      }
    for (int c : tau_cover(side, tau)) sources.push_back(index[static_cast<std::size_t>(c)]);
  }
  std::sort(sources.begin(), sources.end());

  AugmentedDataset out{S, {}, r};
  augment_sources(S, sources, N, r, stream, out);
  out.validate();
  return out;
}

AugmentedDataset maxmargin_augment(const LabeledDataset& S) {
  S.validate();
  const int d = S.dim;
  if (d < 2)
    throw invalid_input("the pinning construction needs d >= 2 (on a line the on-plane "
                        "points and their mean coincide)");
  const auto mm = max_margin(S);
  if (mm.status != MaxMargin::Ok)
    throw invalid_input("the pinning construction needs a positive max margin");

  // Orthonormal frame of the hyperplane's direction space: columns 1..d-1 of
  // the Householder Q whose first column spans w*.
  Eigen::MatrixXd wcol(d, 1);
  wcol.col(0) = mm.h.w;
  const Eigen::MatrixXd Q =
      Eigen::HouseholderQR<Eigen::MatrixXd>(wcol).householderQ() * Eigen::MatrixXd::Identity(d, d);

  Vec centroid = Vec::Zero(d);
  for (const auto& p : S.points) centroid += p.x;
  centroid /= static_cast<double>(S.points.size());
  const Vec on_plane = centroid - (mm.h.w.dot(centroid) + mm.h.b) * mm.h.w;

  std::vector<Vec> all;
  for (const auto& p : S.points) all.push_back(p.x);
  const double R = circumradius(all).radius;

  AugmentedDataset out{S, {}, 0.0};
  Vec mean = Vec::Zero(d);
  for (int i = 0; i < d; ++i) {
    Vec z = on_plane;
    if (i < d - 1) z += R * Q.col(i + 1);
    mean += z;
    out.artificial.push_back({std::move(z), +1, -1});
  }
  out.artificial.push_back({mean / static_cast<double>(d), -1, -1});
  out.validate();
  return out;
}

std::vector<Vec> regular_simplex(int d, const Vec& center, double rho) {
  if (d < 1) throw invalid_input("dimension must be positive");
  if (!(rho > 0.0)) throw invalid_input("circumradius must be positive");
  // Vertices e_i - 1/(d+1) of the standard simplex live in the hyperplane
  // orthogonal to the all-ones vector, all at distance sqrt(d/(d+1)) from
  // their mean; express them in an orthonormal basis of that hyperplane and
  // rescale to radius rho.
  Eigen::MatrixXd ones(d + 1, 1);
  ones.setOnes();
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(ones).householderQ() *
                            Eigen::MatrixXd::Identity(d + 1, d + 1);
  const Eigen::MatrixXd basis = Q.rightCols(d);  // orthonormal, orthogonal to ones
  const double scale = rho / std::sqrt(static_cast<double>(d) / (d + 1));
  std::vector<Vec> verts;
  verts.reserve(static_cast<std::size_t>(d) + 1);
  for (int i = 0; i <= d; ++i) {
    Vec v = Vec::Constant(d + 1, -1.0 / (d + 1));
    v[i] += 1.0;
    verts.push_back(center + scale * (basis.transpose() * v));
  }
  return verts;
}

AugmentedDataset simplex_augment(const LabeledDataset& S, double rho) {
  S.validate();
  if (!(rho > 0.0)) throw invalid_input("circumradius must be positive");
  AugmentedDataset out{S, {}, rho};
  out.artificial.reserve(S.points.size() * static_cast<std::size_t>(S.dim + 1));
  for (std::size_t i = 0; i < S.points.size(); ++i) {
    const auto& p = S.points[i];
    for (auto& v : regular_simplex(S.dim, p.x, rho))
      out.artificial.push_back({std::move(v), p.label, static_cast<int>(i)});
  }
  out.validate();
  return out;
}

AugmentedDataset apply_plan(const LabeledDataset& S, const AugmentationPlan& plan) {
  using St = AugmentationPlan::Strategy;
  SeededStream stream(plan.seed, 0);
  switch (plan.strategy) {
    case St::Spherical: return spherical_augment(S, plan.N, plan.r, stream);
    case St::CoverSpherical: return cover_augment(S, plan.N, plan.r, stream);
    case St::MaxMarginDPlus1: return maxmargin_augment(S);
    case St::Simplex: return simplex_augment(S, plan.eps);
    case St::None: return AugmentedDataset{S, {}, 0.0};
  }
  throw invalid_input("unknown augmentation strategy");
}

}  // namespace marginlab
