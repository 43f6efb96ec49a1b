// Command-line front end: gen | augment | analyze | experiment | caps.
// Exit codes: 0 success, 1 analysis answered "no", 2 usage/config error,
// 3 runtime failure.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "marginlab/augment.hpp"
#include "marginlab/dataset.hpp"
#include "marginlab/experiments.hpp"
#include "marginlab/linear.hpp"
#include "marginlab/respectful.hpp"
#include "marginlab/rng.hpp"

namespace {

using namespace marginlab;

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void save_dataset(const LabeledDataset& ds, const std::string& path) {
  if (ends_with(path, ".csv"))
    save_dataset_csv(ds, path);
  else if (ends_with(path, ".json"))
    save_dataset_json(ds, path);
  else
    throw invalid_input("--out must end in .csv or .json");
}

LabeledDataset load_dataset(const std::string& path) {
  if (ends_with(path, ".csv")) return load_dataset_csv(path);
  if (ends_with(path, ".json")) return load_dataset_json(path);
  throw invalid_input("--in must end in .csv or .json");
}

double parse_eps(const std::string& s) {
  if (s == "inf") return kInf;
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() || !(v > 0.0)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw invalid_input("--eps expects a positive number or \"inf\"");
  }
}

struct GenOpts {
  double gamma = 1.0, r = 1.0, cluster_radius = 0.02, separation = 2.0;
  int dim = 2, n = 4, m = 3, clusters = 2, per = 6;
  std::uint64_t seed = 0;
  std::string out;
};

struct AugmentOpts {
  std::string in, strategy, out;
  int N = 1;
  double r = 0.0, eps = 0.0;
  std::uint64_t seed = 0;
};

struct AnalyzeOpts {
  std::string in, what, mode = "exact2d", eps, json_out;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
};

struct ExperimentOpts {
  std::string config, out_dir;
  std::int64_t seed = -1;
};

struct CapsOpts {
  int d = 0, N = 0;
  double eps = 0.0;
};

int run_gen(const std::string& kind, const GenOpts& o) {
  LabeledDataset ds;
  if (kind == "two_point") {
    ds = make_two_point(o.gamma, o.dim);
  } else if (kind == "parabola") {
    ds = make_parabola_adversarial(o.n, o.m, o.r);
  } else {
    SeededStream stream(o.seed, 0);
    ds = make_clusters(o.clusters, o.per, o.cluster_radius, o.separation, o.dim,
                       stream);
  }
  save_dataset(ds, o.out);
  std::cout << kind << ": " << ds.points.size() << " points, dim " << ds.dim
            << " -> " << o.out << "\n";
  return 0;
}

int run_augment(const AugmentOpts& o) {
  if (!ends_with(o.out, ".json"))
    throw invalid_input("--out must end in .json for augmented data");
  const auto S = load_dataset(o.in);
  AugmentationPlan plan;
  plan.strategy = strategy_from_string(o.strategy);
  plan.N = o.N;
  plan.r = o.r;
  plan.eps = o.eps;
  plan.seed = o.seed;
  const auto aug = apply_plan(S, plan);
  save_augmented_json(aug, o.out);
  std::cout << strategy_name(plan.strategy) << ": " << aug.artificial.size()
            << " artificial points over " << S.points.size() << " sources -> "
            << o.out << "\n";
  return 0;
}

void write_analysis_json(const std::string& path, const std::string& what,
                         double value, const std::vector<double>* per_point) {
  nlohmann::json j;
  j["what"] = what;
  j["value"] = value;
  if (per_point) j["per_point"] = *per_point;
  atomic_write_text(path, j.dump(2) + "\n");
}

int run_analyze(const AnalyzeOpts& o) {
  const auto aug = load_any(o.in);

  if (o.what == "margin") {
    LabeledDataset all{aug.base.dim, aug.all_points()};
    const auto mm = max_margin(all);
    const double value = mm.status == MaxMargin::Inseparable ? -kInf : mm.gamma;
    std::cout << "gamma* = " << format_double(value) << "\n";
    if (mm.status == MaxMargin::Ok)
      std::cout << "support gap realized between the class hulls; unit normal "
                   "w[0] = "
                << format_double(mm.h.w[0]) << "\n";
    if (!o.json_out.empty()) write_analysis_json(o.json_out, "margin", value, nullptr);
    return value == -kInf ? 1 : 0;
  }

  if (o.what == "alpha") {
    MarginReport rep;
    if (o.mode == "exact2d") {
      rep = worst_case_margin_exact_2d(aug);
    } else if (o.mode == "upper") {
      SeededStream stream(o.seed, 0);
      rep = worst_case_margin_upper(aug, o.budget ? o.budget : 10000, stream);
    } else if (o.mode == "lower") {
      rep = worst_case_margin_lower(aug, BoundaryMode::Exact,
                                    o.budget ? o.budget : 2000000);
    } else {
      throw invalid_input("--mode must be exact2d, upper, or lower");
    }
    std::cout << "alpha (" << o.mode << ") = " << format_double(rep.value) << "\n";
    if (!o.json_out.empty())
      write_analysis_json(o.json_out, "alpha:" + o.mode, rep.value, &rep.per_point);
    return rep.value == -kInf ? 1 : 0;
  }

  if (o.what == "respectful") {
    if (o.eps.empty()) throw invalid_input("--what respectful requires --eps");
    const double eps = parse_eps(o.eps);
    const std::size_t budget = o.budget ? o.budget : 2000000;
    const auto feas = respectful_feasible(aug, eps, budget);
    if (feas == Feasibility::No) {
      std::cout << "no eps-respectful separator exists (reach sets intersect)\n";
      return 1;
    }
    if (feas == Feasibility::Unknown)
      throw io_error("feasibility undecided within the enumeration budget");
    const auto plus = adversarial_margin_eps(aug, eps, 1, budget);
    const auto minus = adversarial_margin_eps(aug, eps, -1, budget);
    const double margin = std::min(plus.margin, minus.margin);
    std::cout << "worst-case margin over eps-respectful separators "
              << (plus.exact && minus.exact ? "= " : ">= (sampled) ")
              << format_double(margin) << "\n"
              << "witness region: reach indicator around the "
              << (plus.margin <= minus.margin ? "+1" : "-1")
              << " class, eps = " << format_double(eps) << "\n";
    if (!o.json_out.empty())
      write_analysis_json(o.json_out, "respectful", margin, &plus.per_point);
    return 0;
  }

  throw invalid_input("--what must be margin, alpha, or respectful");
}

int run_experiment_cmd(const ExperimentOpts& o) {
  auto config = load_config(o.config);
  if (o.seed >= 0) config.seed = static_cast<std::uint64_t>(o.seed);
  if (!o.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(o.out_dir);
    auto join = [&](const std::string& p) {
      return fs::path(p).is_absolute() ? p : (fs::path(o.out_dir) / p).string();
    };
    config.out_csv = join(config.out_csv.empty() ? kind_name(config.kind) + ".csv"
                                                 : config.out_csv);
    if (!config.out_svg.empty()) config.out_svg = join(config.out_svg);
  }

  const auto report = run_experiment(config);
  std::cout << report.kind << " seed=" << report.seed << " config=" << report.digest
            << "\n";
  std::cout << "kind,d,n,N,r,beta,eps,trials,statistic,std_err,bound,pass\n";
  for (const auto& row : report.rows)
    std::cout << row.kind << ',' << row.d << ',' << row.n << ',' << row.N << ','
              << format_double(row.r) << ',' << format_double(row.beta) << ','
              << format_double(row.eps) << ',' << row.trials << ','
              << format_double(row.statistic) << ',' << format_double(row.std_err)
              << ',' << format_double(row.bound) << ',' << (row.pass ? 1 : 0)
              << '\n';
  if (report.trial_errors > 0)
    std::cerr << "warning: " << report.trial_errors
              << " trial(s) errored and were excluded from the statistics\n";
  if (!config.out_csv.empty()) std::cout << "csv: " << config.out_csv << "\n";
  if (!config.out_svg.empty()) std::cout << "svg: " << config.out_svg << "\n";

  bool all_pass = true;
  for (const auto& row : report.rows) all_pass = all_pass && row.pass;
  std::cout << (all_pass ? "PASS" : "FAIL") << " ("
            << format_double(report.wall_seconds) << " s)\n";
  return all_pass ? 0 : 1;
}

int run_caps(const CapsOpts& o) {
  if (o.d < 1) throw invalid_input("--d must be >= 1");
  bool did = false;
  if (o.eps > 0.0) {
    if (!(o.eps < 1.0)) throw invalid_input("--eps must lie in (0, 1)");
    std::cout << "cap_fraction(" << o.d << ", " << format_double(o.eps)
              << ") = " << format_double(cap_fraction(o.d, o.eps))
              << "  tail bound e^(-d eps^2/2) = "
              << format_double(std::exp(-o.d * o.eps * o.eps / 2.0)) << "\n";
    did = true;
  }
  if (o.N > 0) {
    std::cout << "wendel(" << o.d << ", " << o.N
              << ") = " << format_double(wendel_probability(o.d, o.N)) << "\n";
    did = true;
  }
  if (!did) throw invalid_input("caps needs --eps and/or --N");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"margin-lab: margins of augmented datasets under worst-case ERM"};
  app.require_subcommand(1);

  GenOpts gen;
  auto* cmd_gen = app.add_subcommand("gen", "generate a dataset file");
  cmd_gen->require_subcommand(1);
  auto* gen_two = cmd_gen->add_subcommand("two_point", "one point per class on the first axis");
  gen_two->add_option("--gamma", gen.gamma, "half distance between the points");
  gen_two->add_option("--dim", gen.dim, "ambient dimension");
  gen_two->add_option("--out", gen.out, "output .csv or .json")->required();
  auto* gen_par = cmd_gen->add_subcommand("parabola", "tangent-line adversarial construction");
  gen_par->add_option("--n", gen.n, "positive points on the parabola");
  gen_par->add_option("--m", gen.m, "negative points on the base line");
  gen_par->add_option("--r", gen.r, "scale (also the tolerated augmentation radius)");
  gen_par->add_option("--out", gen.out, "output .csv or .json")->required();
  auto* gen_clu = cmd_gen->add_subcommand("clusters", "random clustered classes");
  gen_clu->add_option("--clusters", gen.clusters, "clusters per class");
  gen_clu->add_option("--per", gen.per, "points per cluster");
  gen_clu->add_option("--cluster-radius", gen.cluster_radius, "cluster ball radius");
  gen_clu->add_option("--separation", gen.separation, "distance between class center lines");
  gen_clu->add_option("--dim", gen.dim, "ambient dimension");
  gen_clu->add_option("--seed", gen.seed, "rng seed");
  gen_clu->add_option("--out", gen.out, "output .csv or .json")->required();

  AugmentOpts aug;
  auto* cmd_aug = app.add_subcommand("augment", "add artificial points to a dataset");
  cmd_aug->add_option("--in", aug.in, "input dataset (.csv or .json)")->required();
  cmd_aug
      ->add_option("--strategy", aug.strategy,
                   "spherical | cover | maxmargin | simplex")
      ->required();
  cmd_aug->add_option("--N", aug.N, "artificial points per source");
  cmd_aug->add_option("--r", aug.r, "sphere radius");
  cmd_aug->add_option("--eps", aug.eps, "simplex circumradius");
  cmd_aug->add_option("--seed", aug.seed, "rng seed");
  cmd_aug->add_option("--out", aug.out, "output .json")->required();

  AnalyzeOpts ana;
  auto* cmd_ana = app.add_subcommand("analyze", "margins of a (possibly augmented) dataset");
  cmd_ana->add_option("--in", ana.in, "input file (.csv or .json)")->required();
  cmd_ana->add_option("--what", ana.what, "margin | alpha | respectful")->required();
  cmd_ana->add_option("--mode", ana.mode, "alpha mode: exact2d | upper | lower");
  cmd_ana->add_option("--eps", ana.eps, "respectful radius (number or \"inf\")");
  cmd_ana->add_option("--budget", ana.budget, "direction / enumeration budget");
  cmd_ana->add_option("--seed", ana.seed, "rng seed for sampled modes");
  cmd_ana->add_option("--json", ana.json_out, "also write the result as JSON");

  ExperimentOpts exp;
  auto* cmd_exp = app.add_subcommand("experiment", "run a Monte Carlo experiment config");
  cmd_exp->add_option("--config", exp.config, "JSON config file")->required();
  cmd_exp->add_option("--out-dir", exp.out_dir, "directory for CSV/SVG artifacts");
  cmd_exp->add_option("--seed", exp.seed, "override the config seed");

  CapsOpts caps;
  auto* cmd_caps = app.add_subcommand("caps", "spherical cap and hemisphere tables");
  cmd_caps->add_option("--d", caps.d, "dimension")->required();
  cmd_caps->add_option("--eps", caps.eps, "cap height");
  cmd_caps->add_option("--N", caps.N, "points for the hemisphere probability");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cmd_gen->parsed()) {
      for (auto* sub : {gen_two, gen_par, gen_clu})
        if (sub->parsed()) return run_gen(sub->get_name(), gen);
      return 2;
    }
    if (cmd_aug->parsed()) return run_augment(aug);
    if (cmd_ana->parsed()) return run_analyze(ana);
    if (cmd_exp->parsed()) return run_experiment_cmd(exp);
    if (cmd_caps->parsed()) return run_caps(caps);
  } catch (const invalid_input& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
