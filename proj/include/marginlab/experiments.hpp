#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "marginlab/dataset.hpp"

namespace marginlab {

// Monte Carlo experiment kinds. Each binds a generator, an augmentation, an
// analyzer, and a pass rule; see run_trial for the per-kind procedure.
enum class ExperimentKind {
  SepThreshold,        // separability frequency under the beta radius rule
  InsepThreshold,      // inseparability frequency at the blow-up radius
  MarginLower,         // certified worst-case lower bound vs its formula
  MarginUpper,         // sampled worst-case upper bound vs its formula
  BallInclusion,       // per-point ball certificates, then exact alpha >= rho
  Wendel,              // common-hemisphere frequency vs the closed form
  CapTail,             // cap fraction vs its exponential tail bound
  RespectfulLower,     // adversarial eps-respectful margin vs rho
  RespectfulUpper,     // hull-respecting adversarial margin scaling in N
  ParabolaZero,        // zero-margin separator at the unaugmented point
  MaxmarginConstruction  // exact alpha equals gamma* after the d+1 pinning
};

ExperimentKind kind_from_string(const std::string& s);
std::string kind_name(ExperimentKind k);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Wendel;
  std::vector<int> d{2};
  std::vector<int> n{2};
  std::vector<int> N{1};
  std::vector<double> r;    // empty: use the kind's radius rule (beta / fixed formula)
  std::vector<double> eps;  // empty unless the kind needs it
  bool eps_equals_r = false;  // config "eps": "r"
  double beta = 0.0;
  double delta = 0.1;
  int trials = 200;
  std::uint64_t seed = 0;
  std::size_t budget = 10000;  // direction / enumeration budget

  // dataset selection (two_point | clusters | parabola | random_separable)
  std::string dataset = "two_point";
  double gamma = 1.0;       // two_point half-gap
  int clusters = 2;         // clusters per class
  int per_cluster = 6;      // points per cluster
  double cluster_radius = 0.02;
  double separation = 2.0;
  int parabola_m = 3;       // negative line points
  bool cover = false;       // cover_augment instead of spherical_augment

  int mc_d = 0;             // cap_tail Monte Carlo point; 0 disables
  double mc_eps = 0.0;

  std::string out_csv;
  std::string out_svg;
};

// Parses and validates a config file; error messages carry a JSON-pointer to
// the offending field.
ExperimentConfig load_config(const std::string& path);

// Stable content hash of the config (independent of field order in the file).
std::string config_digest(const ExperimentConfig& config);

struct GridPoint {
  int d = 0, n = 0, N = 0;
  double r = 0.0, eps = 0.0;
  std::size_t index = 0;  // position in the grid, used for stream derivation
};

struct TrialRecord {
  bool ok = true;
  std::string error;
  double statistic = 0.0;  // the scalar this kind aggregates
  bool pass = true;        // per-trial side conditions (construction checks)
  double r_used = 0.0;     // radius after per-trial rules resolved
};

TrialRecord run_trial(const ExperimentConfig& config, const GridPoint& gp, int trial);

struct GridRow {
  std::string kind;
  int d = 0, n = 0, N = 0;
  double r = 0.0, beta = 0.0, eps = 0.0;
  int trials = 0, errors = 0;
  double statistic = 0.0, std_err = 0.0, bound = 0.0;
  bool pass = false;
};

struct ExperimentReport {
  std::vector<GridRow> rows;
  std::vector<std::vector<TrialRecord>> raw;  // per row, trial order
  std::string kind;
  std::string digest;
  std::uint64_t seed = 0;
  int trial_errors = 0;     // total across rows
  double wall_seconds = 0.0;  // not serialized into the CSV
};

// Runs the whole grid; trials execute on a pool sized by MARGINLAB_THREADS
// (default hardware concurrency) and aggregate in trial order, so the report
// is identical at any thread count. Writes CSV/SVG when paths are configured.
ExperimentReport run_experiment(const ExperimentConfig& config);

void write_report_csv(const ExperimentReport& report, const std::string& path);
void write_report_svg(const ExperimentReport& report, const std::string& path);

int max_threads();

// Shared random instance generator: n_per points per class, gaussian clouds
// pulled apart along the first axis until the class hulls are certifiably
// disjoint. Used by the pinning and sandwich checks.
LabeledDataset random_separable_instance(int d, int n_per, SeededStream& stream);

}  // namespace marginlab
