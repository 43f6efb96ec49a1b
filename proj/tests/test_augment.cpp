#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "marginlab/augment.hpp"
#include "marginlab/geom.hpp"
#include "marginlab/linear.hpp"

using namespace marginlab;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

LabeledDataset grid_set() {
  LabeledDataset ds;
  ds.dim = 2;
  ds.points = {{v2(0, 0), 1}, {v2(0.1, 0), 1}, {v2(3, 0), 1}, {v2(0, 5), -1}, {v2(0.05, 5), -1}};
  return ds;
}

}  // namespace

TEST_CASE("strategy names round trip, aliases accepted") {
  using S = AugmentationPlan::Strategy;
  for (S s : {S::Spherical, S::CoverSpherical, S::MaxMarginDPlus1, S::Simplex, S::None})
    CHECK(strategy_from_string(strategy_name(s)) == s);
  CHECK(strategy_from_string("cover") == S::CoverSpherical);
  CHECK(strategy_from_string("maxmargin") == S::MaxMarginDPlus1);
  CHECK(strategy_name(S::MaxMarginDPlus1) == "maxmargin_d_plus_1");
  CHECK_THROWS_AS(strategy_from_string("bogus"), invalid_input);
}

TEST_CASE("spherical augmentation: counts, radii, provenance") {
  const auto S = make_two_point(1.0, 3);
  SeededStream s(1, 0);
  const auto aug = spherical_augment(S, 5, 0.25, s);
  aug.validate();
  REQUIRE(aug.artificial.size() == 10);
  CHECK(aug.radius == 0.25);
  for (const auto& a : aug.artificial) {
    REQUIRE(a.source >= 0);
    REQUIRE(a.source < 2);
    CHECK(a.label == S.points[a.source].label);
    CHECK((a.x - S.points[a.source].x).norm() == doctest::Approx(0.25).epsilon(1e-12));
  }
  CHECK_THROWS_AS(spherical_augment(S, 0, 0.25, s), invalid_input);
  CHECK_THROWS_AS(spherical_augment(S, 5, -1.0, s), invalid_input);
}

TEST_CASE("spherical augmentation is reproducible per source position") {
  const auto S = make_two_point(1.0, 2);
  SeededStream s1(7, 3), s2(7, 3);
  const auto a = spherical_augment(S, 8, 0.5, s1);
  const auto b = spherical_augment(S, 8, 0.5, s2);
  for (std::size_t i = 0; i < a.artificial.size(); ++i)
    CHECK((a.artificial[i].x - b.artificial[i].x).norm() == 0.0);
}

TEST_CASE("tau_cover greedy order and cover property") {
  std::vector<Vec> X;
  for (double x : {0.0, 0.1, 1.0, 1.05, 2.0}) {
    Vec v(1);
    v << x;
    X.push_back(v);
  }
  const auto cover = tau_cover(X, 0.2);
  CHECK(cover == std::vector<int>{0, 4, 2});

  SeededStream s(5, 5);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<Vec> Y;
    for (int i = 0; i < 30; ++i) Y.push_back(s.sphere(2, 1.0));
    const double tau = 0.4;
    const auto c = tau_cover(Y, tau);
    for (const auto& y : Y) {
      double dmin = kInf;
      for (int idx : c) dmin = std::min(dmin, (y - Y[idx]).norm());
      CHECK(dmin <= tau + 1e-12);
    }
    // greedy centers are pairwise more than tau apart
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j)
        CHECK((Y[c[i]] - Y[c[j]]).norm() > tau);
  }
}

TEST_CASE("cover_tau formula and domain") {
  CHECK(cover_tau(128, 2, 1.0) == doctest::Approx(0.2549167475422022).epsilon(1e-12));
  CHECK(cover_tau(128, 2, 2.0) == doctest::Approx(2 * 0.2549167475422022).epsilon(1e-12));
  CHECK_THROWS_AS(cover_tau(2, 2, 1.0), invalid_input);
  CHECK_THROWS_AS(cover_tau(1, 2, 1.0), invalid_input);
}

TEST_CASE("cover augmentation reuses per-source clouds and covers both classes") {
  const auto S = grid_set();
  SeededStream s1(11, 0), s2(11, 0);
  const auto full = spherical_augment(S, 6, 1.5, s1);
  const auto covered = cover_augment(S, 6, 1.5, s2);
  covered.validate();

  std::set<int> sources;
  for (const auto& a : covered.artificial) sources.insert(a.source);
  CHECK(sources.size() < S.points.size());  // something was actually covered
  CHECK(covered.artificial.size() == sources.size() * 6);

  // a covered source's cloud is identical to the one full augmentation makes
  for (const auto& a : covered.artificial) {
    bool found = false;
    for (const auto& b : full.artificial)
      if (b.source == a.source && (a.x - b.x).norm() == 0.0) found = true;
    CHECK(found);
  }

  // every point of each class is within tau of a selected source of its class
  const double tau = cover_tau(6, 2, 1.5);
  for (std::size_t i = 0; i < S.points.size(); ++i) {
    double dmin = kInf;
    for (int src : sources)
      if (S.points[src].label == S.points[i].label)
        dmin = std::min(dmin, (S.points[i].x - S.points[src].x).norm());
    CHECK(dmin <= tau + 1e-12);
  }
}

TEST_CASE("regular simplex: circumradius, side, centroid, inradius") {
  SeededStream s(13, 0);
  for (int d = 1; d <= 8; ++d) {
    const Vec c = s.sphere(d, 2.0);
    const double rho = 0.7;
    const auto V = regular_simplex(d, c, rho);
    REQUIRE(V.size() == static_cast<std::size_t>(d + 1));

    Vec centroid = Vec::Zero(d);
    const double side = rho * std::sqrt(2.0 * (d + 1) / double(d));
    for (std::size_t i = 0; i < V.size(); ++i) {
      CHECK((V[i] - c).norm() == doctest::Approx(rho).epsilon(1e-9));
      centroid += V[i];
      for (std::size_t j = i + 1; j < V.size(); ++j)
        CHECK((V[i] - V[j]).norm() == doctest::Approx(side).epsilon(1e-9));
    }
    CHECK((centroid / (d + 1) - c).norm() < 1e-9);

    // inradius rho/d: distance from the center to every facet's hull
    for (std::size_t skip = 0; skip < V.size(); ++skip) {
      std::vector<Vec> facet;
      for (std::size_t i = 0; i < V.size(); ++i)
        if (i != skip) facet.push_back(V[i]);
      CHECK(distance_point_to_hull(c, facet).distance ==
            doctest::Approx(rho / d).epsilon(1e-6));
    }
  }
  CHECK(circumradius(regular_simplex(4, Vec::Zero(4), 1.25)).radius ==
        doctest::Approx(1.25).epsilon(1e-7));
}

TEST_CASE("simplex augmentation surrounds every source") {
  const auto S = make_two_point(1.0, 3);
  const double rho = 0.2;
  const auto aug = simplex_augment(S, rho);
  aug.validate();
  REQUIRE(aug.artificial.size() == S.points.size() * 4);  // d+1 per source
  for (std::size_t i = 0; i < S.points.size(); ++i) {
    std::vector<Vec> own;
    for (const auto& a : aug.artificial)
      if (a.source == static_cast<int>(i)) {
        CHECK(a.label == S.points[i].label);
        CHECK((a.x - S.points[i].x).norm() == doctest::Approx(rho).epsilon(1e-9));
        own.push_back(a.x);
      }
    REQUIRE(own.size() == 4);
    // source strictly inside its simplex: positive boundary distance
    CHECK(boundary_distance(S.points[i].x, own, BoundaryMode::Exact, 1000).value ==
          doctest::Approx(rho / 3.0).epsilon(1e-6));
  }
}

TEST_CASE("pinning augmentation builds d+1 points on the max-margin hyperplane") {
  for (int d = 2; d <= 5; ++d) {
    const auto S = make_two_point(1.0, d);
    const auto mm = max_margin(S);
    REQUIRE(mm.status == MaxMargin::Ok);
    const auto aug = maxmargin_augment(S);
    aug.validate();
    REQUIRE(aug.artificial.size() == static_cast<std::size_t>(d + 1));

    int plus = 0, minus = 0;
    for (const auto& a : aug.artificial) {
      CHECK(a.source == -1);
      (a.label > 0 ? plus : minus)++;
      CHECK(std::abs(mm.h.w.dot(a.x) + mm.h.b) < 1e-9);  // on H*
    }
    CHECK(plus == d);
    CHECK(minus == 1);

    // the negative point is the mean of the positives
    Vec mean = Vec::Zero(d);
    Vec neg;
    for (const auto& a : aug.artificial)
      if (a.label > 0)
        mean += a.x;
      else
        neg = a.x;
    CHECK((mean / d - neg).norm() < 1e-9);

    // still weakly separable, with margin exactly zero
    const auto sep = is_separable(aug);
    REQUIRE(sep.separable);
    const LabeledDataset all{d, aug.all_points()};
    CHECK(margin_of_hyperplane(*sep.witness, all) == doctest::Approx(0.0).scale(1.0));
  }

  CHECK_THROWS_AS(maxmargin_augment(make_two_point(1.0, 1)), invalid_input);

  LabeledDataset bad;  // inseparable input has no max-margin hyperplane to pin
  bad.dim = 2;
  bad.points = {{v2(0, 0), 1}, {v2(1, 1), 1}, {v2(1, 0), -1}, {v2(0, 1), -1}};
  CHECK_THROWS_AS(maxmargin_augment(bad), invalid_input);
}

TEST_CASE("apply_plan dispatches and records the plan parameters") {
  const auto S = make_two_point(1.0, 2);

  AugmentationPlan sph;
  sph.strategy = AugmentationPlan::Strategy::Spherical;
  sph.N = 4;
  sph.r = 0.3;
  sph.seed = 99;
  const auto a = apply_plan(S, sph);
  CHECK(a.artificial.size() == 8);
  CHECK(a.radius == 0.3);
  // same plan, same output
  const auto b = apply_plan(S, sph);
  for (std::size_t i = 0; i < a.artificial.size(); ++i)
    CHECK((a.artificial[i].x - b.artificial[i].x).norm() == 0.0);

  AugmentationPlan mm;
  mm.strategy = AugmentationPlan::Strategy::MaxMarginDPlus1;
  CHECK(apply_plan(S, mm).artificial.size() == 3);

  AugmentationPlan simp;
  simp.strategy = AugmentationPlan::Strategy::Simplex;
  simp.eps = 0.2;
  CHECK(apply_plan(S, simp).artificial.size() == 6);

  AugmentationPlan none;
  CHECK(apply_plan(S, none).artificial.empty());

  AugmentationPlan cov;
  cov.strategy = AugmentationPlan::Strategy::CoverSpherical;
  cov.N = 5;
  cov.r = 0.3;
  cov.seed = 1;
  const auto c = apply_plan(S, cov);
  CHECK(c.artificial.size() == 10);  // two isolated sources, both kept
}
