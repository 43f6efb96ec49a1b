// End-to-end acceptance gate. Each criterion prints exactly one PASS/FAIL
// line with the measured numbers and its pinned tolerance; all criteria run
// even after a failure, and the exit code is zero only when every one passes.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "marginlab/augment.hpp"
#include "marginlab/experiments.hpp"
#include "marginlab/linear.hpp"
#include "marginlab/respectful.hpp"

using namespace marginlab;

namespace {

std::string fmt(double v) { return format_double(v); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

ExperimentConfig config_for(const std::string& name) {
  auto config = load_config(std::string(MARGINLAB_CONFIG_DIR) + "/" + name + ".json");
  config.out_csv.clear();  // acceptance runs in-process; no artifacts
  config.out_svg.clear();
  return config;
}

bool all_rows_pass(const ExperimentReport& report) {
  if (report.rows.empty()) return false;
  for (const auto& row : report.rows)
    if (!row.pass) return false;
  return true;
}

// 1. On random planar instances the three estimators sandwich correctly:
//    certified lower <= exact <= sampled upper <= gamma* + 1e-7.
Outcome ordering_chain() {
  int separable = 0, violations = 0;
  double min_headroom = kInf;
  for (int i = 0; i < 100; ++i) {
    SeededStream s(1001, std::uint64_t(i));
    const int n_per = 1 + int(s.uniform() * 3);
    const auto S = random_separable_instance(2, n_per, s);
    const double gstar = max_margin(S).gamma;
    const int N = 5 + int(s.uniform() * 26);
    const double r = s.uniform(0.05, 0.8) * gstar;
    const auto aug = spherical_augment(S, N, r, s);
    if (!is_separable(aug).separable) continue;
    ++separable;
    const double lower = worst_case_margin_lower(aug, BoundaryMode::Exact, 100000).value;
    const double exact = worst_case_margin_exact_2d(aug).value;
    auto dirs = s.child(1u << 20);
    const double upper = worst_case_margin_upper(aug, 10000, dirs).value;
    if (!(lower <= exact + 1e-9 && exact <= upper + 1e-9 && upper <= gstar + 1e-7))
      ++violations;
    min_headroom = std::min(min_headroom, gstar + 1e-7 - upper);
  }
  Outcome o;
  o.pass = violations == 0 && separable >= 80;
  o.detail = "lower <= exact <= upper <= gamma*+1e-7 on " + std::to_string(separable) +
             "/100 separable instances, " + std::to_string(violations) +
             " violations, min headroom " + fmt(min_headroom);
  return o;
}

// 2. With at most d artificial points the adversary still reaches a base
//    point: a zero-margin separator pinned at some original point exists.
Outcome sparse_zero_margin() {
  int found = 0;
  const int total = 50;
  for (int i = 0; i < total; ++i) {
    const int d = 2 + i % 4;
    SeededStream s(1002, std::uint64_t(i));
    const int n_per = 1 + int(s.uniform() * 3);
    const auto S = random_separable_instance(d, n_per, s);
    const double r = 0.4 * max_margin(S).gamma;
    const int k = 1 + int(s.uniform() * d);  // |S'| <= d
    AugmentedDataset aug{S, {}, r};
    for (int j = 0; j < k; ++j) {
      const int src = int(s.uniform() * double(S.points.size()));
      aug.artificial.push_back({S.points[src].x + s.sphere(d, r), S.points[src].label, src});
    }
    for (std::size_t pin = 0; pin < S.points.size(); ++pin)
      if (zero_margin_separator(aug, int(pin))) {
        ++found;
        break;
      }
  }
  Outcome o;
  o.pass = found == total;
  o.detail = "pinned zero-margin separator found in " + std::to_string(found) + "/" +
             std::to_string(total) + " instances with |S'| <= d";
  return o;
}

// 3. The d+1-point pinning augmentation forces alpha = gamma* exactly.
Outcome pinning_construction() {
  const auto report = run_experiment(config_for("maxmargin_construction"));
  const auto& row = report.rows.front();
  Outcome o;
  o.pass = all_rows_pass(report);
  o.detail = "alpha == gamma* (1e-6 relative) in " +
             std::to_string(int(row.statistic * row.trials + 0.5)) + "/" +
             std::to_string(row.trials) + " random planar instances";
  return o;
}

// 4. Augmenting every parabola point except one leaves a zero-margin
//    separator through the omitted point, for each choice of omission.
Outcome parabola_omission() {
  const auto report = run_experiment(config_for("parabola_zero"));
  const auto& row = report.rows.front();
  Outcome o;
  o.pass = all_rows_pass(report);
  o.detail = "all omit-one rounds kept a pinned separator in " +
             std::to_string(int(row.statistic * row.trials + 0.5)) + "/" +
             std::to_string(row.trials) + " trials (n=4, N=20, r=1)";
  return o;
}

// 5. Separability frequency under the beta radius rule stays above
//    1 - n N^{1-beta} minus four standard errors.
Outcome separability_threshold() {
  const auto report = run_experiment(config_for("sep_threshold"));
  const auto& row = report.rows.front();
  Outcome o;
  o.pass = all_rows_pass(report);
  o.detail = "separability " + fmt(row.statistic) + " >= " + fmt(row.bound) + " - 4*" +
             fmt(row.std_err) + " (d=" + std::to_string(row.d) +
             ", N=" + std::to_string(row.N) + ", " + std::to_string(row.trials) + " trials)";
  return o;
}

// 6. At the blow-up radius the augmented sample goes inseparable at least
//    90% of the time (analytic floor 1 - 2 e^{-d/6}).
Outcome inseparability_threshold() {
  const auto report = run_experiment(config_for("insep_threshold"));
  const auto& row = report.rows.front();
  Outcome o;
  o.pass = all_rows_pass(report);
  o.detail = "inseparability " + fmt(row.statistic) + " >= 0.9 (floor " + fmt(row.bound) +
             ", d=" + std::to_string(row.d) + ", N=" + std::to_string(row.N) + ", r = " +
             fmt(row.r) + ")";
  return o;
}

// 7. The sampled upper bound obeys its sqrt((2 ln N + 2 ln(1/delta))/d) * r
//    formula and the shifted witness separator works, in >= 85% of trials.
Outcome margin_upper_bound() {
  const auto report = run_experiment(config_for("margin_upper"));
  const auto& row = report.rows.front();
  Outcome o;
  o.pass = all_rows_pass(report);
  o.detail = "bound + shifted witness held in " + fmt(100.0 * row.statistic) + "% of " +
             std::to_string(row.trials) + " trials (floor 85%, bound " + fmt(row.bound) + ")";
  return o;
}

// 8. Ball-in-hull certificates give the certified lower bound rho, and the
//    exact planar margin never undercuts a certificate.
Outcome certified_lower_bound() {
  const auto balls = run_experiment(config_for("ball_inclusion"));
  const auto lower = run_experiment(config_for("margin_lower"));
  const auto& rb = balls.rows.front();
  const auto& rl = lower.rows.front();
  Outcome o;
  o.pass = all_rows_pass(balls) && all_rows_pass(lower);
  o.detail = "certificates + alpha >= rho in " + fmt(100.0 * rb.statistic) +
             "% (floor 80%, rho " + fmt(rb.bound) + "); certified estimator >= rho in " +
             fmt(100.0 * rl.statistic) + "% (floor 80%)";
  return o;
}

// 9. On clustered data the tau-cover contraction keeps the lower bound with
//    the halved constant rho/2.
Outcome cover_lower_bound() {
  const auto report = run_experiment(config_for("cover_inclusion"));
  const auto& row = report.rows.front();
  Outcome o;
  o.pass = all_rows_pass(report);
  o.detail = "cover certificates + alpha >= rho/2 in " + fmt(100.0 * row.statistic) +
             "% of " + std::to_string(row.trials) + " trials (floor 80%, rho/2 " +
             fmt(row.bound) + ")";
  return o;
}

// 10. Hemisphere frequencies match the closed form within four standard
//     errors on every (d, N) cell.
Outcome hemisphere_frequencies() {
  const auto report = run_experiment(config_for("wendel"));
  double worst_z = 0.0;
  for (const auto& row : report.rows)
    if (row.std_err > 0.0)
      worst_z = std::max(worst_z, std::abs(row.statistic - row.bound) / row.std_err);
  Outcome o;
  o.pass = all_rows_pass(report);
  o.detail = "max |frequency - closed form| = " + fmt(worst_z) + " SE over " +
             std::to_string(report.rows.size()) + " (d,N) cells (limit 4 SE)";
  return o;
}

// 11. The cap fraction sits under its exponential tail bound on the whole
//     analytic grid, and Monte Carlo agrees at (8, 0.3).
Outcome cap_tail_bound() {
  const auto report = run_experiment(config_for("cap_tail"));
  const auto& mc = report.rows.back();
  const double z = mc.std_err > 0.0 ? std::abs(mc.statistic - mc.bound) / mc.std_err : kInf;
  Outcome o;
  o.pass = all_rows_pass(report);
  o.detail = std::to_string(report.rows.size() - 1) +
             " analytic cells under e^(-d eps^2/2); monte carlo gap " + fmt(z) +
             " SE at (8, 0.3) over " + std::to_string(mc.trials) + " samples (limit 4 SE)";
  return o;
}

// 12. With eps = r the adversarial eps-respectful margin clears rho in at
//     least 80% of trials, and feasibility is decided Yes whenever the reach
//     sets are provably disjoint.
Outcome respectful_lower_bound() {
  const auto report = run_experiment(config_for("respectful_lower"));
  const auto& row = report.rows.front();
  Outcome o;
  o.pass = all_rows_pass(report);
  o.detail = "eps-respectful margin >= rho in " + fmt(100.0 * row.statistic) + "% of " +
             std::to_string(row.trials) + " trials (floor 80%, rho " + fmt(row.bound) + ")";
  return o;
}

// 13. The hull-respecting adversarial margin scales across N like
//     sqrt(log(nN/d)) within 25%, and stays strictly below gamma*.
Outcome respectful_scaling() {
  const auto report = run_experiment(config_for("respectful_upper"));
  Outcome o;
  o.pass = all_rows_pass(report) && report.rows.size() == 2;
  if (report.rows.size() == 2) {
    const auto& lo = report.rows[0];
    const auto& hi = report.rows[1];
    const double expected = std::sqrt(std::log(double(hi.n) * hi.N / hi.d) /
                                      std::log(double(lo.n) * lo.N / lo.d));
    o.detail = "median margin ratio N=400/N=50 is " + fmt(hi.statistic / lo.statistic) +
               " vs sqrt-log " + fmt(expected) + " (within 25%); medians " +
               fmt(lo.statistic) + ", " + fmt(hi.statistic) + " < gamma* 1";
  } else {
    o.detail = "expected two grid rows, got " + std::to_string(report.rows.size());
  }
  return o;
}

// 14. Simplex augmentation emits |S|(d+1) artificial points for d in 2..6,
//     and in the plane the adversarial eps-respectful margin equals the
//     regular-simplex inradius rho/d exactly.
Outcome simplex_construction() {
  const double rho = 0.2;
  bool counts_ok = true;
  for (int d = 2; d <= 6; ++d) {
    const auto S = make_two_point(1.0, d);
    const auto aug = simplex_augment(S, rho);
    if (aug.artificial.size() != S.points.size() * std::size_t(d + 1)) counts_ok = false;
  }
  const auto aug2 = simplex_augment(make_two_point(1.0, 2), rho);
  const double margin = std::min(adversarial_margin_eps(aug2, rho, 1, 200000).margin,
                                 adversarial_margin_eps(aug2, rho, -1, 200000).margin);
  const double inradius = rho / 2.0;
  Outcome o;
  o.pass = counts_ok && std::abs(margin - inradius) <= 1e-6;
  o.detail = std::string("|S'| = |S|(d+1) for d in 2..6: ") + (counts_ok ? "yes" : "no") +
             "; planar eps-respectful margin " + fmt(margin) + " vs inradius rho/d = " +
             fmt(inradius) + " (tol 1e-6)";
  return o;
}

// 15. Reports are byte-identical across thread counts: rerun the criterion 5
//     and 10 configs under MARGINLAB_THREADS=1 and =2 and compare the CSVs.
Outcome thread_determinism() {
  namespace fs = std::filesystem;
  const auto tmp = fs::temp_directory_path() / "marginlab_acceptance";
  fs::create_directories(tmp);
  bool identical = true;
  std::string names;
  for (const std::string name : {"sep_threshold", "wendel"}) {
    std::string bytes[2];
    for (int t = 0; t < 2; ++t) {
      ::setenv("MARGINLAB_THREADS", t == 0 ? "1" : "2", 1);
      auto config = config_for(name);
      config.out_csv = (tmp / (name + "_t" + std::to_string(t) + ".csv")).string();
      run_experiment(config);
      bytes[t] = read_text_file(config.out_csv);
    }
    if (bytes[0] != bytes[1] || bytes[0].empty()) identical = false;
    names += (names.empty() ? "" : ", ") + name;
  }
  ::unsetenv("MARGINLAB_THREADS");
  fs::remove_all(tmp);
  Outcome o;
  o.pass = identical;
  o.detail = "CSV bytes for " + names + " identical under MARGINLAB_THREADS=1 and =2: " +
             (identical ? "yes" : "no");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* label;
    Outcome (*run)();
  };
  const std::vector<Criterion> criteria = {
      {"margin estimate ordering", ordering_chain},
      {"sparse augmentation keeps alpha at zero", sparse_zero_margin},
      {"pinning augmentation recovers gamma*", pinning_construction},
      {"parabola omission keeps a zero-margin separator", parabola_omission},
      {"separability under the beta radius rule", separability_threshold},
      {"inseparability at the blow-up radius", inseparability_threshold},
      {"sampled worst-case margin upper bound", margin_upper_bound},
      {"ball certificates give the lower bound", certified_lower_bound},
      {"cover augmentation keeps the halved bound", cover_lower_bound},
      {"hemisphere frequencies match the closed form", hemisphere_frequencies},
      {"cap fraction under its tail bound", cap_tail_bound},
      {"eps-respectful margin lower bound", respectful_lower_bound},
      {"hull-respecting margin scaling", respectful_scaling},
      {"simplex augmentation count and inradius", simplex_construction},
      {"byte-identical reports across thread counts", thread_determinism},
  };

  int passed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (o.pass) ++passed;
    std::printf("%s criterion %2zu: %s — %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].label, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", passed, criteria.size());
  return passed == int(criteria.size()) ? 0 : 1;
}
