#include "marginlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "marginlab/augment.hpp"
#include "marginlab/geom.hpp"
#include "marginlab/linear.hpp"
#include "marginlab/respectful.hpp"

namespace marginlab {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Child index for the direction-sampling stream of a trial; source-indexed
// children stay far below this.
constexpr std::uint64_t kDirectionChild = 1u << 20;

const std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::SepThreshold, "sep_threshold"},
    {ExperimentKind::InsepThreshold, "insep_threshold"},
    {ExperimentKind::MarginLower, "margin_lower"},
    {ExperimentKind::MarginUpper, "margin_upper"},
    {ExperimentKind::BallInclusion, "ball_inclusion"},
    {ExperimentKind::Wendel, "wendel"},
    {ExperimentKind::CapTail, "cap_tail"},
    {ExperimentKind::RespectfulLower, "respectful_lower"},
    {ExperimentKind::RespectfulUpper, "respectful_upper"},
    {ExperimentKind::ParabolaZero, "parabola_zero"},
    {ExperimentKind::MaxmarginConstruction, "maxmargin_construction"},
};

[[noreturn]] void config_error(const std::string& pointer, const std::string& what) {
  throw invalid_input("config " + pointer + ": " + what);
}

std::vector<int> parse_int_list(const json& j, const std::string& ptr, long long lo) {
  std::vector<int> out;
  auto one = [&](const json& v, const std::string& p) {
    if (!v.is_number_integer()) config_error(p, "expected an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > 1000000000) config_error(p, "out of range");
    out.push_back(static_cast<int>(x));
  };
  if (j.is_array()) {
    if (j.empty()) config_error(ptr, "list must not be empty");
    for (std::size_t i = 0; i < j.size(); ++i) one(j[i], ptr + "/" + std::to_string(i));
  } else {
    one(j, ptr);
  }
  return out;
}

std::vector<double> parse_double_list(const json& j, const std::string& ptr) {
  std::vector<double> out;
  auto one = [&](const json& v, const std::string& p) {
    if (!v.is_number()) config_error(p, "expected a number");
    const double x = v.get<double>();
    if (!(x > 0.0) || !std::isfinite(x)) config_error(p, "must be positive and finite");
    out.push_back(x);
  };
  if (j.is_array()) {
    if (j.empty()) config_error(ptr, "list must not be empty");
    for (std::size_t i = 0; i < j.size(); ++i) one(j[i], ptr + "/" + std::to_string(i));
  } else {
    one(j, ptr);
  }
  return out;
}

double parse_scalar(const json& v, const std::string& p, double lo, double hi) {
  if (!v.is_number()) config_error(p, "expected a number");
  const double x = v.get<double>();
  if (!(x >= lo) || !(x <= hi)) config_error(p, "out of range");
  return x;
}

// ---- radius / inclusion formulas ------------------------------------------

double eq4_radius(double beta, int d, int N, double gstar) {
  return std::sqrt(double(d) / std::log(double(N))) / std::sqrt(beta) * gstar;
}

double blowup_radius(int d, double gstar) {
  return 8.0 * std::exp(2.0) * std::sqrt(2.0 * d) /
         std::pow(std::numbers::pi, 1.5) * gstar;
}

// Certified inclusion radius for N on-sphere samples in dimension d.
double inclusion_rho(int N, int d, double r) {
  return std::sqrt(std::log(double(N) / d) / d) / (2.0 * std::sqrt(2.0)) * r;
}

double gamma_star(const LabeledDataset& S) {
  const auto mm = max_margin(S);
  if (mm.status != MaxMargin::Ok)
    throw invalid_input("generated dataset has no positive max margin");
  return mm.gamma;
}

bool uses_beta_rule(ExperimentKind k) {
  return k == ExperimentKind::SepThreshold || k == ExperimentKind::MarginLower ||
         k == ExperimentKind::BallInclusion || k == ExperimentKind::RespectfulLower;
}

bool uses_rho(ExperimentKind k) {
  return k == ExperimentKind::MarginLower || k == ExperimentKind::BallInclusion ||
         k == ExperimentKind::RespectfulLower;
}

double resolve_radius(const ExperimentConfig& c, const GridPoint& gp, double gstar) {
  if (!std::isnan(gp.r)) return gp.r;
  switch (c.kind) {
    case ExperimentKind::SepThreshold:
    case ExperimentKind::MarginLower:
    case ExperimentKind::BallInclusion:
    case ExperimentKind::RespectfulLower:
      return eq4_radius(c.beta, gp.d, gp.N, gstar);
    case ExperimentKind::InsepThreshold:
      return blowup_radius(gp.d, gstar);
    case ExperimentKind::MarginUpper:
      return gstar;
    case ExperimentKind::RespectfulUpper:
      return 0.1 * gstar;
    default:
      throw invalid_input("no radius rule for this experiment kind");
  }
}

LabeledDataset make_dataset(const ExperimentConfig& c, const GridPoint& gp,
                            SeededStream& stream) {
  if (c.dataset == "two_point") return make_two_point(c.gamma, gp.d);
  if (c.dataset == "clusters")
    return make_clusters(c.clusters, c.per_cluster, c.cluster_radius, c.separation,
                         gp.d, stream);
  if (c.dataset == "parabola")
    return make_parabola_adversarial(gp.n, c.parabola_m, gp.r);
  if (c.dataset == "random_separable")
    return random_separable_instance(gp.d, gp.n / 2, stream);
  throw invalid_input("unknown dataset kind: " + c.dataset);
}

double cross_class_distance(const AugmentedDataset& aug) {
  const auto P = aug.side(1), M = aug.side(-1);
  double best = kInf;
  for (const auto& a : P)
    for (const auto& b : M) best = std::min(best, (a - b).norm());
  return best;
}

std::vector<int> distinct_sources(const AugmentedDataset& aug) {
  std::set<int> s;
  for (const auto& a : aug.artificial) s.insert(a.source);
  return {s.begin(), s.end()};
}

std::vector<Vec> source_cloud(const AugmentedDataset& aug, int source) {
  std::vector<Vec> out;
  for (const auto& a : aug.artificial)
    if (a.source == source) out.push_back(a.x);
  return out;
}

// ---- per-kind trial procedures --------------------------------------------

TrialRecord trial_separability(const ExperimentConfig& c, const GridPoint& gp,
                               SeededStream& stream, bool want_separable) {
  TrialRecord rec;
  const auto S = make_dataset(c, gp, stream);
  rec.r_used = resolve_radius(c, gp, gamma_star(S));
  const auto aug = spherical_augment(S, gp.N, rec.r_used, stream);
  const bool sep = is_separable(aug).separable;
  rec.statistic = (sep == want_separable) ? 1.0 : 0.0;
  return rec;
}

TrialRecord trial_margin_lower(const ExperimentConfig& c, const GridPoint& gp,
                               SeededStream& stream) {
  TrialRecord rec;
  const auto S = make_dataset(c, gp, stream);
  rec.r_used = resolve_radius(c, gp, gamma_star(S));
  const double rho = inclusion_rho(gp.N, gp.d, rec.r_used);
  const auto aug = spherical_augment(S, gp.N, rec.r_used, stream);
  const bool sep = is_separable(aug).separable;
  double lower = -kInf;
  if (sep) {
    lower = worst_case_margin_lower(aug, BoundaryMode::Exact, c.budget).value;
    if (gp.d == 2) {
      // The certificate must never exceed the exact value.
      const double alpha = worst_case_margin_exact_2d(aug).value;
      if (lower > alpha + 1e-9) rec.pass = false;
    }
  }
  rec.statistic = (sep && lower >= rho - 1e-12) ? 1.0 : 0.0;
  return rec;
}

TrialRecord trial_margin_upper(const ExperimentConfig& c, const GridPoint& gp,
                               SeededStream& stream) {
  TrialRecord rec;
  const auto S = make_dataset(c, gp, stream);
  const double gstar = gamma_star(S);
  rec.r_used = resolve_radius(c, gp, gstar);
  const int n = static_cast<int>(S.points.size());
  const auto aug = spherical_augment(S, gp.N / n, rec.r_used, stream);

  const double bound =
      std::sqrt((2.0 * std::log(double(gp.N)) + 2.0 * std::log(1.0 / c.delta)) / gp.d) *
      rec.r_used;
  auto dirs = stream.child(kDirectionChild);
  const auto upper = worst_case_margin_upper(aug, c.budget, dirs);
  const bool within = upper.value <= bound + 1e-12;

  // Witness half of the claim: the max-margin plane shifted to distance
  // min(bound, gamma*) from the positive support still weakly separates the
  // augmented sample.
  const auto shifted = shifted_separator(S, std::min(bound, gstar));
  LabeledDataset all{aug.base.dim, aug.all_points()};
  const bool separates = margin_of_hyperplane(shifted, all) != -kInf;

  rec.statistic = (within && separates) ? 1.0 : 0.0;
  return rec;
}

TrialRecord trial_ball_inclusion(const ExperimentConfig& c, const GridPoint& gp,
                                 SeededStream& stream) {
  TrialRecord rec;
  const auto S = make_dataset(c, gp, stream);
  rec.r_used = resolve_radius(c, gp, gamma_star(S));
  const double rho = inclusion_rho(gp.N, gp.d, rec.r_used);
  const double threshold = c.cover ? rho / 2.0 : rho;

  const auto aug = c.cover ? cover_augment(S, gp.N, rec.r_used, stream)
                           : spherical_augment(S, gp.N, rec.r_used, stream);

  const auto sources = distinct_sources(aug);
  if (c.cover) {
    const double tau = cover_tau(gp.N, gp.d, rec.r_used);
    const std::size_t m = sources.size();
    if (aug.artificial.size() != m * std::size_t(gp.N)) rec.pass = false;
    if (m >= S.points.size()) rec.pass = false;
    if (c.dataset == "clusters") {
      if (m != std::size_t(2 * c.clusters)) rec.pass = false;
      if (!(2.0 * c.cluster_radius < tau)) rec.pass = false;
    }
  }

  bool all_certified = true;
  for (int s : sources) {
    const auto cloud = source_cloud(aug, s);
    const auto cert = ball_in_hull(S.points[s].x, rho, cloud, BoundaryMode::Exact,
                                   c.budget, nullptr);
    if (cert.status != BallInHull::Status::Certified) all_certified = false;
  }

  const bool sep = is_separable(aug).separable;
  double alpha = -kInf;
  if (sep) alpha = worst_case_margin_exact_2d(aug).value;

  const bool held = sep && all_certified && alpha >= threshold - 1e-9;
  // Certified-but-below-threshold would contradict the lower-bound argument.
  if (sep && all_certified && !held) rec.pass = false;
  rec.statistic = held ? 1.0 : 0.0;
  return rec;
}

TrialRecord trial_wendel(const GridPoint& gp, SeededStream& stream) {
  TrialRecord rec;
  std::vector<Vec> zs;
  zs.reserve(gp.N);
  for (int i = 0; i < gp.N; ++i) zs.push_back(stream.sphere(gp.d, 1.0));
  rec.statistic = in_common_hemisphere(zs).inside ? 1.0 : 0.0;
  return rec;
}

TrialRecord trial_respectful_lower(const ExperimentConfig& c, const GridPoint& gp,
                                   SeededStream& stream) {
  TrialRecord rec;
  const auto S = make_dataset(c, gp, stream);
  rec.r_used = resolve_radius(c, gp, gamma_star(S));
  const double rho = inclusion_rho(gp.N, gp.d, rec.r_used);
  const double eps = std::isnan(gp.eps) ? rec.r_used : gp.eps;
  const auto aug = spherical_augment(S, gp.N, rec.r_used, stream);

  const auto feas = respectful_feasible(aug, eps, c.budget);
  // Disjointness margin of a quarter of the class distance always leaves the
  // reach sets disjoint, so feasibility must be decided Yes there.
  if (eps < cross_class_distance(aug) / 4.0 - 1e-12 && feas != Feasibility::Yes)
    rec.pass = false;

  double margin = -kInf;
  if (feas == Feasibility::Yes) {
    margin = std::min(adversarial_margin_eps(aug, eps, 1, c.budget).margin,
                      adversarial_margin_eps(aug, eps, -1, c.budget).margin);
  }
  rec.statistic = (feas == Feasibility::Yes && margin >= rho - 1e-12) ? 1.0 : 0.0;
  return rec;
}

TrialRecord trial_respectful_upper(const ExperimentConfig& c, const GridPoint& gp,
                                   SeededStream& stream) {
  TrialRecord rec;
  const auto S = make_dataset(c, gp, stream);
  const double gstar = gamma_star(S);
  rec.r_used = resolve_radius(c, gp, gstar);
  const auto aug = spherical_augment(S, gp.N, rec.r_used, stream);
  const double margin = std::min(adversarial_margin_inf(aug, 1, c.budget).margin,
                                 adversarial_margin_inf(aug, -1, c.budget).margin);
  rec.statistic = margin;
  // Hull-respecting adversaries must cost margin relative to gamma*.
  if (!(margin < gstar)) rec.pass = false;
  return rec;
}

TrialRecord trial_parabola_zero(const ExperimentConfig& c, const GridPoint& gp,
                                SeededStream& stream) {
  TrialRecord rec;
  const auto S = make_dataset(c, gp, stream);
  rec.r_used = gp.r;

  std::vector<std::size_t> positives;
  for (std::size_t i = 0; i < S.points.size(); ++i)
    if (S.points[i].label == 1) positives.push_back(i);

  // Each source keeps the same perturbation cloud no matter which point is
  // omitted, so the omit loop reuses identical draws.
  std::vector<std::vector<Vec>> clouds(positives.size());
  for (std::size_t k = 0; k < positives.size(); ++k) {
    auto child = stream.child(positives[k]);
    for (int i = 0; i < gp.N; ++i)
      clouds[k].push_back(S.points[positives[k]].x + child.sphere(S.dim, gp.r));
  }

  bool all_ok = true;
  for (std::size_t k = 0; k < positives.size(); ++k) {
    AugmentedDataset aug{S, {}, gp.r};
    for (std::size_t l = 0; l < positives.size(); ++l) {
      if (l == k) continue;
      for (const auto& x : clouds[l])
        aug.artificial.push_back({x, 1, static_cast<int>(positives[l])});
    }
    if (!zero_margin_separator(aug, static_cast<int>(positives[k])).has_value())
      all_ok = false;
  }
  rec.statistic = all_ok ? 1.0 : 0.0;
  return rec;
}

TrialRecord trial_maxmargin_construction(const ExperimentConfig& c, const GridPoint& gp,
                                         SeededStream& stream) {
  TrialRecord rec;
  const auto S = make_dataset(c, gp, stream);
  const auto mm = max_margin(S);
  if (mm.status != MaxMargin::Ok)
    throw invalid_input("generated dataset has no positive max margin");
  const auto aug = maxmargin_augment(S);
  if (aug.artificial.size() != std::size_t(gp.d) + 1) rec.pass = false;
  const double alpha = worst_case_margin_exact_2d(aug).value;
  rec.statistic = (std::abs(alpha - mm.gamma) <= 1e-6 * mm.gamma) ? 1.0 : 0.0;
  return rec;
}

TrialRecord run_trial_impl(const ExperimentConfig& c, const GridPoint& gp, int trial) {
  SeededStream stream(c.seed, (std::uint64_t(gp.index) << 32) |
                                  std::uint64_t(std::uint32_t(trial)));
  switch (c.kind) {
    case ExperimentKind::SepThreshold: return trial_separability(c, gp, stream, true);
    case ExperimentKind::InsepThreshold: return trial_separability(c, gp, stream, false);
    case ExperimentKind::MarginLower: return trial_margin_lower(c, gp, stream);
    case ExperimentKind::MarginUpper: return trial_margin_upper(c, gp, stream);
    case ExperimentKind::BallInclusion: return trial_ball_inclusion(c, gp, stream);
    case ExperimentKind::Wendel: return trial_wendel(gp, stream);
    case ExperimentKind::RespectfulLower: return trial_respectful_lower(c, gp, stream);
    case ExperimentKind::RespectfulUpper: return trial_respectful_upper(c, gp, stream);
    case ExperimentKind::ParabolaZero: return trial_parabola_zero(c, gp, stream);
    case ExperimentKind::MaxmarginConstruction:
      return trial_maxmargin_construction(c, gp, stream);
    case ExperimentKind::CapTail: break;
  }
  throw invalid_input("cap_tail has no per-trial procedure");
}

// ---- grid / aggregation ----------------------------------------------------

void validate_config(const ExperimentConfig& c) {
  if (c.trials < 1) config_error("/trials", "must be >= 1");
  if (c.budget < 1) config_error("/budget", "must be >= 1");
  if (!(c.delta > 0.0 && c.delta < 1.0)) config_error("/delta", "must lie in (0, 1)");
  if (!(c.gamma > 0.0)) config_error("/gamma", "must be positive");
  if (c.clusters < 1) config_error("/clusters", "must be >= 1");
  if (c.per_cluster < 1) config_error("/per_cluster", "must be >= 1");
  if (!(c.cluster_radius > 0.0)) config_error("/cluster_radius", "must be positive");
  if (!(c.separation > 0.0)) config_error("/separation", "must be positive");
  if (c.parabola_m < 1) config_error("/parabola_m", "must be >= 1");
  if (c.mc_d < 0) config_error("/mc_d", "must be >= 0");
  if (c.mc_d > 0 && !(c.mc_eps > 0.0 && c.mc_eps < 1.0))
    config_error("/mc_eps", "must lie in (0, 1)");

  static const std::set<std::string> datasets{"two_point", "clusters", "parabola",
                                              "random_separable"};
  if (!datasets.count(c.dataset)) config_error("/dataset", "unknown dataset kind");

  if (c.kind == ExperimentKind::CapTail) {
    if (c.eps.empty()) config_error("/eps", "cap_tail needs explicit eps values");
    for (std::size_t i = 0; i < c.eps.size(); ++i)
      if (!(c.eps[i] > 0.0 && c.eps[i] < 1.0))
        config_error("/eps/" + std::to_string(i), "must lie in (0, 1)");
    if (c.eps_equals_r) config_error("/eps", "\"r\" makes no sense for cap_tail");
    return;
  }

  if (uses_beta_rule(c.kind) && c.r.empty() && !(c.beta > 1.0))
    config_error("/beta", "must exceed 1 when r is not given");
  if (uses_rho(c.kind)) {
    for (int N : c.N)
      for (int d : c.d)
        if (N <= d) config_error("/N", "must exceed d for the inclusion radius");
  }
  if (c.cover) {
    for (int N : c.N)
      for (int d : c.d)
        if (N <= d) config_error("/N", "must exceed d for the cover radius");
  }
  if (c.kind == ExperimentKind::MarginUpper) {
    const int n = c.dataset == "two_point" ? 2 : c.n.front();
    for (int N : c.N)
      if (N % n != 0 || N / n < 1)
        config_error("/N", "total artificial count must divide across the sample");
  }
  for (int d : c.d) {
    if (d < 1) config_error("/d", "must be >= 1");
    if (c.dataset == "clusters" && d < 2) config_error("/d", "clusters need d >= 2");
  }
  if (c.kind == ExperimentKind::BallInclusion ||
      c.kind == ExperimentKind::MaxmarginConstruction ||
      c.kind == ExperimentKind::ParabolaZero) {
    for (int d : c.d)
      if (d != 2) config_error("/d", "this kind analyzes the exact planar margin; d must be 2");
  }
  if (c.kind == ExperimentKind::RespectfulLower && c.eps.empty() && !c.eps_equals_r)
    config_error("/eps", "required: a number, a list, or \"r\"");
  if (c.dataset == "random_separable") {
    for (int n : c.n)
      if (n < 2 || n % 2 != 0) config_error("/n", "random_separable needs an even n >= 2");
  }
  if (c.kind == ExperimentKind::ParabolaZero) {
    for (int n : c.n)
      if (n < 2 || n > 40) config_error("/n", "parabola omit game needs 2 <= n <= 40");
    if (c.r.empty() && c.eps_equals_r) config_error("/eps", "no radius to copy");
  }
}

std::vector<int> effective_n(const ExperimentConfig& c) {
  if (c.dataset == "two_point") return {2};
  if (c.dataset == "clusters") return {2 * c.clusters * c.per_cluster};
  return c.n;
}

std::vector<GridPoint> build_grid(const ExperimentConfig& c) {
  std::vector<double> rs = c.r;
  if (rs.empty())
    rs.push_back(c.kind == ExperimentKind::ParabolaZero ? 1.0 : kNaN);
  std::vector<double> epss = c.eps;
  if (epss.empty()) {
    if (c.eps_equals_r)
      epss.push_back(kNaN);
    else
      epss.push_back(c.kind == ExperimentKind::RespectfulUpper ? kInf : 0.0);
  }

  std::vector<GridPoint> grid;
  for (int d : c.d)
    for (int n : effective_n(c))
      for (int N : c.N)
        for (double r : rs)
          for (double eps : epss) {
            GridPoint gp;
            gp.d = d;
            gp.n = n;
            gp.N = N;
            gp.r = r;
            gp.eps = eps;
            gp.index = grid.size();
            grid.push_back(gp);
          }
  return grid;
}

struct Aggregate {
  int ok = 0;
  double mean = 0.0;
  double mean_r = 0.0;
  std::vector<double> values;
  bool side_ok = true;
};

Aggregate fold(const std::vector<TrialRecord>& recs) {
  Aggregate a;
  double sum = 0.0, sum_r = 0.0;
  for (const auto& rec : recs) {
    if (!rec.ok) continue;
    ++a.ok;
    sum += rec.statistic;
    sum_r += rec.r_used;
    a.values.push_back(rec.statistic);
    if (!rec.pass) a.side_ok = false;
  }
  if (a.ok > 0) {
    a.mean = sum / a.ok;
    a.mean_r = sum_r / a.ok;
  }
  return a;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double binom_se(double p, int trials) {
  if (trials <= 0) return 0.0;
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / trials);
}

GridRow aggregate_row(const ExperimentConfig& c, const GridPoint& gp,
                      const std::vector<TrialRecord>& recs) {
  const Aggregate a = fold(recs);
  GridRow row;
  row.kind = kind_name(c.kind);
  row.d = gp.d;
  row.n = gp.n;
  row.N = gp.N;
  row.beta = c.beta;
  row.trials = a.ok;
  row.errors = static_cast<int>(recs.size()) - a.ok;
  row.r = std::isnan(gp.r) ? a.mean_r : gp.r;
  row.eps = std::isnan(gp.eps) ? row.r : gp.eps;
  row.statistic = a.mean;
  row.std_err = binom_se(a.mean, a.ok);
  if (a.ok == 0) {
    row.pass = false;
    return row;
  }

  switch (c.kind) {
    case ExperimentKind::SepThreshold:
      row.bound = 1.0 - gp.n * std::pow(double(gp.N), 1.0 - c.beta);
      row.pass = a.side_ok && row.statistic >= row.bound - 4.0 * row.std_err;
      break;
    case ExperimentKind::InsepThreshold:
      row.bound = 1.0 - 2.0 * std::exp(-gp.d / 6.0);
      // The analytic floor minus sampling slack would allow dipping below the
      // headline rate; hold the empirical frequency to 0.9 outright.
      row.pass = a.side_ok && row.statistic >= 0.9;
      break;
    case ExperimentKind::MarginLower:
    case ExperimentKind::BallInclusion:
    case ExperimentKind::RespectfulLower: {
      double rho = inclusion_rho(gp.N, gp.d, row.r);
      if (c.kind == ExperimentKind::BallInclusion && c.cover) rho /= 2.0;
      row.bound = rho;
      row.pass = a.side_ok && row.statistic >= 0.8;
      break;
    }
    case ExperimentKind::MarginUpper:
      row.bound = std::sqrt((2.0 * std::log(double(gp.N)) +
                             2.0 * std::log(1.0 / c.delta)) /
                            gp.d) *
                  row.r;
      row.pass = a.side_ok && row.statistic >= 0.85;
      break;
    case ExperimentKind::Wendel:
      row.bound = wendel_probability(gp.d, gp.N);
      row.std_err = binom_se(row.bound, a.ok);
      row.pass = a.side_ok &&
                 std::abs(row.statistic - row.bound) <= 4.0 * row.std_err + 1e-12;
      break;
    case ExperimentKind::RespectfulUpper:
      row.statistic = median_of(a.values);
      row.std_err = 0.0;
      row.bound = c.gamma;  // two-point gamma*; the scaling check runs post-hoc
      row.pass = a.side_ok;
      break;
    case ExperimentKind::ParabolaZero:
    case ExperimentKind::MaxmarginConstruction:
      row.bound = 1.0;
      row.pass = a.side_ok && row.statistic == 1.0;
      break;
    case ExperimentKind::CapTail:
      break;
  }
  return row;
}

// Median growth across N must follow the sqrt(log) law within 25%.
void apply_scaling_rule(ExperimentReport& report) {
  auto& rows = report.rows;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (i == j) continue;
      const GridRow &lo = rows[i], &hi = rows[j];
      if (lo.d != hi.d || lo.n != hi.n || lo.N >= hi.N) continue;
      const double expected = std::sqrt(std::log(double(hi.n) * hi.N / hi.d) /
                                        std::log(double(lo.n) * lo.N / lo.d));
      const double ratio = hi.statistic / lo.statistic;
      if (!(std::abs(ratio / expected - 1.0) <= 0.25)) {
        rows[i].pass = false;
        rows[j].pass = false;
      }
    }
}

ExperimentReport run_cap_tail(const ExperimentConfig& c) {
  ExperimentReport report;
  for (int d : c.d)
    for (double eps : c.eps) {
      GridRow row;
      row.kind = kind_name(c.kind);
      row.d = d;
      row.eps = eps;
      row.statistic = cap_fraction(d, eps);
      row.bound = std::exp(-d * eps * eps / 2.0);
      row.pass = row.statistic <= row.bound * (1.0 + 1e-12);
      report.rows.push_back(row);
      report.raw.emplace_back();
    }

  if (c.mc_d > 0) {
    SeededStream stream(c.seed, 0);
    int hits = 0;
    for (int t = 0; t < c.trials; ++t)
      if (stream.sphere(c.mc_d, 1.0)[0] >= c.mc_eps) ++hits;
    GridRow row;
    row.kind = kind_name(c.kind);
    row.d = c.mc_d;
    row.eps = c.mc_eps;
    row.trials = c.trials;
    row.statistic = double(hits) / c.trials;
    row.bound = cap_fraction(c.mc_d, c.mc_eps);
    row.std_err = binom_se(row.bound, c.trials);
    row.pass = std::abs(row.statistic - row.bound) <= 4.0 * row.std_err;
    report.rows.push_back(row);
    report.raw.emplace_back();
  }
  return report;
}

std::string digest_text(const ExperimentConfig& c) {
  std::ostringstream s;
  s << kind_name(c.kind);
  for (int v : c.d) s << "|d" << v;
  for (int v : c.n) s << "|n" << v;
  for (int v : c.N) s << "|N" << v;
  for (double v : c.r) s << "|r" << format_double(v);
  for (double v : c.eps) s << "|e" << format_double(v);
  s << "|eqr" << c.eps_equals_r << "|b" << format_double(c.beta) << "|de"
    << format_double(c.delta) << "|t" << c.trials << "|s" << c.seed << "|bu"
    << c.budget << "|ds" << c.dataset << "|g" << format_double(c.gamma) << "|k"
    << c.clusters << "|p" << c.per_cluster << "|cr" << format_double(c.cluster_radius)
    << "|se" << format_double(c.separation) << "|m" << c.parabola_m << "|cv"
    << c.cover << "|md" << c.mc_d << "|me" << format_double(c.mc_eps);
  return s.str();
}

}  // namespace

ExperimentKind kind_from_string(const std::string& s) {
  for (const auto& [k, name] : kKindNames)
    if (s == name) return k;
  throw invalid_input("unknown experiment kind: " + s);
}

std::string kind_name(ExperimentKind k) {
  for (const auto& [kind, name] : kKindNames)
    if (kind == k) return name;
  throw invalid_input("unknown experiment kind");
}

LabeledDataset random_separable_instance(int d, int n_per, SeededStream& stream) {
  if (d < 1 || n_per < 1) throw invalid_input("random_separable_instance: bad shape");
  for (int attempt = 0; attempt < 100; ++attempt) {
    LabeledDataset S;
    S.dim = d;
    for (int side = 0; side < 2; ++side)
      for (int i = 0; i < n_per; ++i) {
        Vec x(d);
        for (int k = 0; k < d; ++k) x[k] = stream.gaussian();
        x[0] += side == 0 ? 1.5 : -1.5;
        S.points.push_back({x, side == 0 ? 1 : -1});
      }
    const auto gap = hulls_distance(S.side(1), S.side(-1));
    if (gap.certified_lower > 0.05) return S;
  }
  throw invalid_input("random_separable_instance: no separable draw in 100 attempts");
}

TrialRecord run_trial(const ExperimentConfig& config, const GridPoint& gp, int trial) {
  try {
    return run_trial_impl(config, gp, trial);
  } catch (const std::exception& e) {
    TrialRecord rec;
    rec.ok = false;
    rec.error = e.what();
    return rec;
  }
}

int max_threads() {
  if (const char* env = std::getenv("MARGINLAB_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string config_digest(const ExperimentConfig& config) {
  // FNV-1a over a canonical field serialization.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : digest_text(config)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream hex;
  hex << std::hex;
  for (int i = 15; i >= 0; --i) hex << ((h >> (4 * i)) & 0xF);
  return hex.str();
}

ExperimentConfig load_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    config_error("/", std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) config_error("/", "expected a JSON object");

  static const std::set<std::string> known{
      "kind",       "d",           "n",          "N",
      "r",          "eps",         "beta",       "delta",
      "trials",     "seed",        "budget",     "dataset",
      "gamma",      "clusters",    "per_cluster", "cluster_radius",
      "separation", "parabola_m",  "cover",      "mc_d",
      "mc_eps",     "out_csv",     "out_svg"};
  for (const auto& item : j.items())
    if (!known.count(item.key())) config_error("/" + item.key(), "unknown field");

  ExperimentConfig c;
  if (!j.contains("kind")) config_error("/kind", "required");
  if (!j["kind"].is_string()) config_error("/kind", "expected a string");
  try {
    c.kind = kind_from_string(j["kind"].get<std::string>());
  } catch (const invalid_input&) {
    config_error("/kind", "unknown experiment kind '" + j["kind"].get<std::string>() + "'");
  }

  if (j.contains("d")) c.d = parse_int_list(j["d"], "/d", 1);
  if (j.contains("n")) c.n = parse_int_list(j["n"], "/n", 1);
  if (j.contains("N")) c.N = parse_int_list(j["N"], "/N", 1);
  if (j.contains("r")) c.r = parse_double_list(j["r"], "/r");

  if (j.contains("eps")) {
    const json& e = j["eps"];
    auto one = [&](const json& v, const std::string& p) {
      if (v.is_string()) {
        if (v.get<std::string>() == "inf") return kInf;
        config_error(p, "expected a number, \"inf\", or \"r\"");
      }
      if (!v.is_number()) config_error(p, "expected a number, \"inf\", or \"r\"");
      const double x = v.get<double>();
      if (!(x > 0.0)) config_error(p, "must be positive");
      return x;
    };
    if (e.is_string() && e.get<std::string>() == "r") {
      c.eps_equals_r = true;
    } else if (e.is_array()) {
      if (e.empty()) config_error("/eps", "list must not be empty");
      for (std::size_t i = 0; i < e.size(); ++i)
        c.eps.push_back(one(e[i], "/eps/" + std::to_string(i)));
    } else {
      c.eps.push_back(one(e, "/eps"));
    }
  }

  if (j.contains("beta")) c.beta = parse_scalar(j["beta"], "/beta", 0.0, 1e6);
  if (j.contains("delta")) c.delta = parse_scalar(j["delta"], "/delta", 1e-12, 1.0);
  if (j.contains("trials")) {
    if (!j["trials"].is_number_integer() || j["trials"].get<long long>() < 1 ||
        j["trials"].get<long long>() > 100000000)
      config_error("/trials", "expected a positive integer");
    c.trials = j["trials"].get<int>();
  } else {
    c.trials = c.kind == ExperimentKind::Wendel ? 2000 : 200;
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0)
      config_error("/seed", "expected a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("budget")) {
    if (!j["budget"].is_number_integer() || j["budget"].get<long long>() < 1)
      config_error("/budget", "expected a positive integer");
    c.budget = j["budget"].get<std::size_t>();
  }
  if (j.contains("dataset")) {
    if (!j["dataset"].is_string()) config_error("/dataset", "expected a string");
    c.dataset = j["dataset"].get<std::string>();
  }
  if (c.kind == ExperimentKind::ParabolaZero) c.dataset = "parabola";
  if (j.contains("gamma")) c.gamma = parse_scalar(j["gamma"], "/gamma", 1e-12, 1e9);
  if (j.contains("clusters")) {
    if (!j["clusters"].is_number_integer()) config_error("/clusters", "expected an integer");
    c.clusters = j["clusters"].get<int>();
  }
  if (j.contains("per_cluster")) {
    if (!j["per_cluster"].is_number_integer())
      config_error("/per_cluster", "expected an integer");
    c.per_cluster = j["per_cluster"].get<int>();
  }
  if (j.contains("cluster_radius"))
    c.cluster_radius = parse_scalar(j["cluster_radius"], "/cluster_radius", 1e-12, 1e9);
  if (j.contains("separation"))
    c.separation = parse_scalar(j["separation"], "/separation", 1e-12, 1e9);
  if (j.contains("parabola_m")) {
    if (!j["parabola_m"].is_number_integer())
      config_error("/parabola_m", "expected an integer");
    c.parabola_m = j["parabola_m"].get<int>();
  }
  if (j.contains("cover")) {
    if (!j["cover"].is_boolean()) config_error("/cover", "expected a boolean");
    c.cover = j["cover"].get<bool>();
  }
  if (j.contains("mc_d")) {
    if (!j["mc_d"].is_number_integer()) config_error("/mc_d", "expected an integer");
    c.mc_d = j["mc_d"].get<int>();
  }
  if (j.contains("mc_eps")) c.mc_eps = parse_scalar(j["mc_eps"], "/mc_eps", 0.0, 1.0);
  if (j.contains("out_csv")) {
    if (!j["out_csv"].is_string()) config_error("/out_csv", "expected a string");
    c.out_csv = j["out_csv"].get<std::string>();
  }
  if (j.contains("out_svg")) {
    if (!j["out_svg"].is_string()) config_error("/out_svg", "expected a string");
    c.out_svg = j["out_svg"].get<std::string>();
  }

  validate_config(c);
  return c;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  const auto t0 = std::chrono::steady_clock::now();

  ExperimentReport report;
  if (config.kind == ExperimentKind::CapTail) {
    report = run_cap_tail(config);
  } else {
    const auto grid = build_grid(config);
    for (const auto& gp : grid) {
      std::vector<TrialRecord> recs(config.trials);
      const int threads = std::min(max_threads(), config.trials);
      if (threads <= 1) {
        for (int t = 0; t < config.trials; ++t) recs[t] = run_trial(config, gp, t);
      } else {
        std::atomic<int> next{0};
        auto worker = [&] {
          for (int t = next.fetch_add(1); t < config.trials; t = next.fetch_add(1))
            recs[t] = run_trial(config, gp, t);
        };
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
      }
      report.rows.push_back(aggregate_row(config, gp, recs));
      report.raw.push_back(std::move(recs));
    }
    if (config.kind == ExperimentKind::RespectfulUpper) apply_scaling_rule(report);
  }

  report.kind = kind_name(config.kind);
  report.digest = config_digest(config);
  report.seed = config.seed;
  for (const auto& row : report.rows) report.trial_errors += row.errors;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!config.out_csv.empty()) write_report_csv(report, config.out_csv);
  if (!config.out_svg.empty()) write_report_svg(report, config.out_svg);
  return report;
}

void write_report_csv(const ExperimentReport& report, const std::string& path) {
  std::ostringstream out;
  out << "kind,d,n,N,r,beta,eps,trials,statistic,std_err,bound,pass\n";
  for (const auto& row : report.rows) {
    out << row.kind << ',' << row.d << ',' << row.n << ',' << row.N << ','
        << format_double(row.r) << ',' << format_double(row.beta) << ','
        << format_double(row.eps) << ',' << row.trials << ','
        << format_double(row.statistic) << ',' << format_double(row.std_err) << ','
        << format_double(row.bound) << ',' << (row.pass ? 1 : 0) << '\n';
  }
  atomic_write_text(path, out.str());
}

}  // namespace marginlab
