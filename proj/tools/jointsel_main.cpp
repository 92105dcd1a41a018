// Command-line front end: data synthesis, covariate selection, effect
// estimation, and the seeded experiment sweeps. Every run that writes
// results also writes a .meta sidecar in config format with all values
// resolved, so "--config run.meta" reproduces it bitwise.

#include "CLI11.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "jointsel/csv.hpp"
#include "jointsel/effects.hpp"
#include "jointsel/errors.hpp"
#include "jointsel/experiments.hpp"
#include "jointsel/selection.hpp"
#include "jointsel/synthgen.hpp"
#include "jointsel/version.hpp"

namespace js = jointsel;

namespace {

js::SelectionMode parse_mode(const std::string& s) {
  if (s == "joint") return js::SelectionMode::kJoint;
  if (s == "independent") return js::SelectionMode::kIndependent;
  if (s == "treatment-regression")
    return js::SelectionMode::kTreatmentRegression;
  throw js::DataError("unknown mode '" + s + "'");
}

js::Penalty parse_reg(const std::string& s) {
  if (s == "mcp") return js::Penalty::kMcp;
  if (s == "scad") return js::Penalty::kScad;
  if (s == "l1") return js::Penalty::kL1;
  throw js::DataError("unknown regularizer '" + s + "'");
}

js::LambdaPolicy parse_policy(const std::string& s) {
  if (s == "theory") return js::LambdaPolicy::kTheory;
  if (s == "cv") return js::LambdaPolicy::kCv;
  if (s == "fixed") return js::LambdaPolicy::kFixed;
  throw js::DataError("unknown lambda policy '" + s + "'");
}

double resolved_gamma(const std::string& reg, double gamma) {
  if (gamma > 0.0) return gamma;
  return reg == "scad" ? 3.7 : 3.0;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (int x : v) {
    if (!out.empty()) out += ',';
    out += std::to_string(x);
  }
  return out;
}

using Meta = std::vector<std::pair<std::string, std::string>>;

// The --config token itself is handled by expand_config_args below, which
// splices sidecar entries into the argument list before CLI11 parses it;
// this option only documents the flag and catches a missing file name.
void add_config_support(CLI::App* sub) {
  static std::string config_path;
  sub->add_option("--config", config_path,
                  "Apply options from a recorded .meta file; explicit flags win");
}

// Rewrites [sub, flags...] so every --config FILE is replaced by the file's
// entries as ordinary flags. Keys without a matching option (command,
// tool-version, notes, chosen-lambda) are informational and skipped, and a
// key already given explicitly on the command line is left alone.
std::vector<std::string> expand_config_args(const CLI::App& app, int argc,
                                            char** argv) {
  std::vector<std::string> in(argv + 1, argv + argc);
  if (in.empty()) return in;
  const CLI::App* sub = app.get_subcommand_no_throw(in[0]);
  if (sub == nullptr) return in;

  std::vector<std::string> rest;
  std::vector<std::string> files;
  for (std::size_t i = 1; i < in.size(); ++i) {
    if (in[i] == "--config" && i + 1 < in.size()) {
      files.push_back(in[++i]);
    } else if (in[i].rfind("--config=", 0) == 0) {
      files.push_back(in[i].substr(9));
    } else {
      rest.push_back(in[i]);
    }
  }
  if (files.empty()) return in;

  std::set<std::string> given;
  for (const std::string& tok : rest)
    if (tok.rfind("--", 0) == 0) given.insert(tok.substr(0, tok.find('=')));

  std::vector<std::string> out;
  out.push_back(in[0]);
  for (const std::string& file : files) {
    for (const auto& [key, value] : js::read_metadata(file)) {
      std::string flag = "--" + key;
      if (sub->get_option_no_throw(flag) == nullptr) continue;
      if (!given.insert(flag).second) continue;
      out.push_back(flag);
      out.push_back(value);
    }
  }
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

// Options shared by the synthetic-data commands.
struct GenOptions {
  int q = 2;
  int k = 10;
  int trials = 25;
  double sigma = 1.0;
  double coef_scale = 1.0;
  double phi_scale = 1.0;
  std::string reg = "mcp";
  double gamma = 0.0;
  std::uint64_t seed = 0;
  int threads = 0;
};

void add_gen_options(CLI::App* sub, GenOptions& g) {
  sub->add_option("--q", g.q, "Treatment arms");
  sub->add_option("--k", g.k, "True support size");
  sub->add_option("--trials", g.trials, "Trials per cell");
  sub->add_option("--sigma", g.sigma, "Outcome noise standard deviation");
  sub->add_option("--coef-scale", g.coef_scale, "Coefficient scale");
  sub->add_option("--phi-scale", g.phi_scale, "Treatment-assignment signal scale");
  sub->add_option("--reg", g.reg, "Regularizer")
      ->check(CLI::IsMember({"mcp", "scad", "l1"}));
  sub->add_option("--gamma", g.gamma, "Regularizer curvature; 0 = default");
  sub->add_option("--seed", g.seed, "Base seed");
  sub->add_option("--threads", g.threads, "Worker threads; 0 = all cores");
}

void append_gen_meta(Meta& meta, const GenOptions& g) {
  meta.emplace_back("q", std::to_string(g.q));
  meta.emplace_back("k", std::to_string(g.k));
  meta.emplace_back("trials", std::to_string(g.trials));
  meta.emplace_back("sigma", js::format_double(g.sigma));
  meta.emplace_back("coef-scale", js::format_double(g.coef_scale));
  meta.emplace_back("phi-scale", js::format_double(g.phi_scale));
  meta.emplace_back("reg", g.reg);
  meta.emplace_back("gamma", js::format_double(resolved_gamma(g.reg, g.gamma)));
  meta.emplace_back("seed", std::to_string(g.seed));
}

void write_meta_file(const std::string& out, const std::string& command,
                     const Meta& entries) {
  Meta full;
  full.emplace_back("command", command);
  full.emplace_back("tool-version", js::kVersion);
  full.insert(full.end(), entries.begin(), entries.end());
  js::write_metadata(out + ".meta", full);
}

// ---------------------------------------------------------------- synth ---

struct SynthOptions {
  int p = 16, q = 2, k = 2, n = 100;
  std::uint64_t seed = 0;
  double sigma = 1.0, coef_scale = 1.0, phi_scale = 1.0;
  std::string out;
};

void run_synth(const SynthOptions& o) {
  js::SynthSpec ss;
  ss.p = o.p;
  ss.q = o.q;
  ss.k = o.k;
  ss.n = o.n;
  ss.seed = o.seed;
  ss.noise_sigma = o.sigma;
  ss.coef_scale = o.coef_scale;
  ss.phi_scale = o.phi_scale;
  js::SynthDraw draw = js::generate(ss);

  js::export_csv(draw.data, o.out);
  js::write_truth_sidecar(draw, o.out + ".truth");
  Meta meta;
  meta.emplace_back("p", std::to_string(o.p));
  meta.emplace_back("q", std::to_string(o.q));
  meta.emplace_back("k", std::to_string(o.k));
  meta.emplace_back("n", std::to_string(o.n));
  meta.emplace_back("seed", std::to_string(o.seed));
  meta.emplace_back("sigma", js::format_double(o.sigma));
  meta.emplace_back("coef-scale", js::format_double(o.coef_scale));
  meta.emplace_back("phi-scale", js::format_double(o.phi_scale));
  write_meta_file(o.out, "synth", meta);

  std::cout << "wrote " << o.out << " (" << o.n << " rows), " << o.out
            << ".truth, " << o.out << ".meta\n";
}

// --------------------------------------------------------------- select ---

struct SelectOptions {
  std::string data;
  std::string treatment_col = "t";
  std::string outcome_col = "y";
  std::string mode = "joint";
  std::string reg = "mcp";
  double gamma = 0.0;
  double lambda = 0.0;  // 0 uses the default grid
  int cv_folds = 5;
  int top_m = 0;
  bool standardize = true;
  std::uint64_t seed = 0;
  std::string out;
};

js::SelectionConfig make_selection_config(const std::string& mode,
                                          const std::string& reg, double gamma,
                                          double lambda, int cv_folds,
                                          int top_m, bool standardize,
                                          std::uint64_t seed) {
  js::SelectionConfig cfg;
  cfg.mode = parse_mode(mode);
  cfg.reg_kind = parse_reg(reg);
  cfg.gamma = gamma;
  if (lambda > 0.0) cfg.lambda_grid = {lambda};
  cfg.cv_folds = cv_folds;
  cfg.top_m = top_m;
  cfg.standardize = standardize;
  cfg.seed = seed;
  return cfg;
}

void run_select(const SelectOptions& o) {
  js::PooledDataset data =
      js::ingest_csv(o.data, o.treatment_col, o.outcome_col);
  js::CohortDataset cohorts = js::partition_by_treatment(data);
  js::SelectionConfig cfg =
      make_selection_config(o.mode, o.reg, o.gamma, o.lambda, o.cv_folds,
                            o.top_m, o.standardize, o.seed);
  js::SelectionResult res = js::select(cohorts, cfg);

  std::ofstream sup(o.out);
  if (!sup) throw js::DataError("cannot write '" + o.out + "'");
  sup << "index,name\n";
  for (int i : res.support.indices)
    sup << i << ',' << data.covariate_names[i] << '\n';
  if (!sup) throw js::DataError("write to '" + o.out + "' failed");

  Meta meta;
  meta.emplace_back("data", o.data);
  meta.emplace_back("treatment-col", o.treatment_col);
  meta.emplace_back("outcome-col", o.outcome_col);
  meta.emplace_back("mode", o.mode);
  meta.emplace_back("reg", o.reg);
  meta.emplace_back("gamma", js::format_double(resolved_gamma(o.reg, o.gamma)));
  meta.emplace_back("lambda", js::format_double(o.lambda));
  meta.emplace_back("cv-folds", std::to_string(o.cv_folds));
  meta.emplace_back("top-m", std::to_string(o.top_m));
  meta.emplace_back("standardize", o.standardize ? "true" : "false");
  meta.emplace_back("seed", std::to_string(o.seed));
  meta.emplace_back("chosen-lambda", js::format_double(res.chosen_lambda));
  write_meta_file(o.out, "select", meta);

  std::cout << "selected " << res.support.size() << " of " << data.p()
            << " covariates";
  if (cfg.mode != js::SelectionMode::kTreatmentRegression)
    std::cout << " at lambda " << js::format_double(res.chosen_lambda);
  std::cout << "; support written to " << o.out << "\n";
}

// ------------------------------------------------------------- estimate ---

struct EstimateOptions {
  std::string data;
  std::string treatment_col = "t";
  std::string outcome_col = "y";
  std::string method = "dr";
  double selection_fraction = 0.2;
  int splits = 20;
  double propensity_ridge = 1e-3;
  std::string mode = "joint";
  std::string reg = "mcp";
  double gamma = 0.0;
  double lambda = 0.0;
  int cv_folds = 5;
  int top_m = 0;
  bool standardize = true;
  std::uint64_t seed = 0;
  std::string out;
};

void run_estimate(const EstimateOptions& o) {
  js::PooledDataset data =
      js::ingest_csv(o.data, o.treatment_col, o.outcome_col);
  js::EffectMethod method;
  if (o.method == "plugin")
    method = js::EffectMethod::kPlugin;
  else if (o.method == "dr")
    method = js::EffectMethod::kDoublyRobust;
  else
    throw js::DataError("unknown method '" + o.method + "'");

  js::PipelineConfig cfg;
  cfg.selection_fraction = o.selection_fraction;
  cfg.n_splits = o.splits;
  cfg.seed = o.seed;
  cfg.propensity_ridge = o.propensity_ridge;
  cfg.selection =
      make_selection_config(o.mode, o.reg, o.gamma, o.lambda, o.cv_folds,
                            o.top_m, o.standardize, 0);
  js::EffectEstimate est = js::two_stage_pipeline(data, method, cfg);

  std::ofstream csv(o.out);
  if (!csv) throw js::DataError("cannot write '" + o.out + "'");
  csv << "t,t_prime,estimate,std_dev\n";
  for (const auto& [key, value] : est.pairwise) {
    if (key.first == key.second) continue;
    csv << key.first << ',' << key.second << ',' << js::format_double(value)
        << ',';
    auto it = est.pairwise_std.find(key);
    if (it != est.pairwise_std.end()) csv << js::format_double(it->second);
    csv << '\n';
  }
  if (!csv) throw js::DataError("write to '" + o.out + "' failed");

  Meta meta;
  meta.emplace_back("data", o.data);
  meta.emplace_back("treatment-col", o.treatment_col);
  meta.emplace_back("outcome-col", o.outcome_col);
  meta.emplace_back("method", o.method);
  meta.emplace_back("selection-fraction",
                    js::format_double(o.selection_fraction));
  meta.emplace_back("splits", std::to_string(o.splits));
  meta.emplace_back("propensity-ridge", js::format_double(o.propensity_ridge));
  meta.emplace_back("mode", o.mode);
  meta.emplace_back("reg", o.reg);
  meta.emplace_back("gamma", js::format_double(resolved_gamma(o.reg, o.gamma)));
  meta.emplace_back("lambda", js::format_double(o.lambda));
  meta.emplace_back("cv-folds", std::to_string(o.cv_folds));
  meta.emplace_back("top-m", std::to_string(o.top_m));
  meta.emplace_back("standardize", o.standardize ? "true" : "false");
  meta.emplace_back("seed", std::to_string(o.seed));
  write_meta_file(o.out, "estimate", meta);

  std::cout << "method " << o.method << ", " << est.n_splits
            << " splits, mean support size " << est.mean_support_size << "\n";
  for (const auto& [c, value] : est.tau) {
    std::cout << "  tau(" << c << ") = " << js::format_double(value);
    auto it = est.tau_std.find(c);
    if (it != est.tau_std.end())
      std::cout << "  (std " << js::format_double(it->second) << ")";
    std::cout << "\n";
  }
  if (method == js::EffectMethod::kDoublyRobust) {
    std::cout << "  mean clip fraction " << est.mean_clip_fraction;
    if (est.clip_warnings > 0)
      std::cout << "  [" << est.clip_warnings
                << " splits above the clip warning threshold]";
    std::cout << "\n";
  }
  std::cout << "pairwise contrasts written to " << o.out << "\n";
}

// -------------------------------------------------------- phase-diagram ---

struct PhaseOptions {
  std::vector<int> n_grid;
  std::vector<int> p_grid;
  GenOptions gen;
  std::string mode = "joint";
  std::string policy = "theory";
  double lambda_c = 0.0;
  double lambda_fixed = 1.0;
  int cv_folds = 5;
  std::string out;
};

void run_phase(const PhaseOptions& o) {
  js::PhaseDiagramSpec spec;
  spec.n_grid = o.n_grid;
  spec.p_grid = o.p_grid;
  spec.q = o.gen.q;
  spec.k = o.gen.k;
  spec.trials = o.gen.trials;
  spec.mode = parse_mode(o.mode);
  spec.base_seed = o.gen.seed;
  spec.lambda_policy = parse_policy(o.policy);
  spec.lambda_c = o.lambda_c;
  spec.lambda_fixed = o.lambda_fixed;
  spec.cv_folds = o.cv_folds;
  spec.noise_sigma = o.gen.sigma;
  spec.coef_scale = o.gen.coef_scale;
  spec.phi_scale = o.gen.phi_scale;
  spec.reg_kind = parse_reg(o.gen.reg);
  spec.gamma = o.gen.gamma;
  spec.threads = o.gen.threads;

  js::PhaseDiagramResult result = js::run_phase_diagram(spec);

  std::ofstream csv(o.out);
  if (!csv) throw js::DataError("cannot write '" + o.out + "'");
  csv << "n,p,q,k,mode,trials,recovery_probability,mean_support_jaccard\n";
  for (const js::PhaseCell& cell : result.cells)
    csv << cell.n << ',' << cell.p << ',' << spec.q << ',' << spec.k << ','
        << o.mode << ',' << cell.trials << ','
        << js::format_double(cell.recovery_probability) << ','
        << js::format_double(cell.mean_support_jaccard) << '\n';
  if (!csv) throw js::DataError("write to '" + o.out + "' failed");

  Meta meta;
  meta.emplace_back("n", join_ints(o.n_grid));
  meta.emplace_back("p", join_ints(o.p_grid));
  append_gen_meta(meta, o.gen);
  meta.emplace_back("mode", o.mode);
  meta.emplace_back("policy", o.policy);
  meta.emplace_back("lambda-c", js::format_double(result.resolved_lambda_c));
  meta.emplace_back("lambda-fixed", js::format_double(o.lambda_fixed));
  meta.emplace_back("cv-folds", std::to_string(o.cv_folds));
  write_meta_file(o.out, "phase-diagram", meta);

  for (const std::string& note : result.notes) std::cout << note << "\n";
  std::cout << result.cells.size() << " cells written to " << o.out << "\n";
}

// -------------------------------------------------------------- scaling ---

struct ScalingOptions {
  int p = 128;
  std::vector<int> n_list;
  GenOptions gen;
  double lambda_c = 0.0;
  std::string out;
};

void run_scaling(const ScalingOptions& o) {
  js::ScalingSpec spec;
  spec.p = o.p;
  spec.k = o.gen.k;
  spec.q = o.gen.q;
  spec.n_list = o.n_list;
  spec.trials = o.gen.trials;
  spec.base_seed = o.gen.seed;
  spec.lambda_c = o.lambda_c;
  spec.noise_sigma = o.gen.sigma;
  spec.coef_scale = o.gen.coef_scale;
  spec.phi_scale = o.gen.phi_scale;
  spec.reg_kind = parse_reg(o.gen.reg);
  spec.gamma = o.gen.gamma;
  spec.threads = o.gen.threads;

  js::ScalingResult result = js::run_scaling_sweep(spec);

  std::ofstream csv(o.out);
  if (!csv) throw js::DataError("cannot write '" + o.out + "'");
  csv << "n,mean_err_inf_inf,recovery_rate\n";
  for (const js::ScalingRow& row : result.rows)
    csv << row.n << ',' << js::format_double(row.mean_error) << ','
        << js::format_double(row.recovery_rate) << '\n';
  if (!csv) throw js::DataError("write to '" + o.out + "' failed");

  std::string trials_path = o.out + ".trials.csv";
  std::ofstream det(trials_path);
  if (!det) throw js::DataError("cannot write '" + trials_path + "'");
  det << "n,trial,recovered,err_inf_inf,ate_err,ate_bound\n";
  for (const js::ScalingTrialRecord& rec : result.trials)
    det << rec.n << ',' << rec.trial << ',' << (rec.recovered ? 1 : 0) << ','
        << js::format_double(rec.err_inf_inf) << ','
        << js::format_double(rec.ate_err) << ','
        << js::format_double(rec.ate_bound) << '\n';
  if (!det) throw js::DataError("write to '" + trials_path + "' failed");

  Meta meta;
  meta.emplace_back("p", std::to_string(o.p));
  meta.emplace_back("n", join_ints(o.n_list));
  append_gen_meta(meta, o.gen);
  meta.emplace_back("lambda-c", js::format_double(result.resolved_lambda_c));
  write_meta_file(o.out, "scaling", meta);

  for (const std::string& note : result.notes) std::cout << note << "\n";
  if (result.slope.has_value())
    std::cout << "log-log error slope " << js::format_double(*result.slope)
              << "\n";
  else
    std::cout << "slope not defined for this sweep\n";
  std::cout << "means written to " << o.out << ", per-trial detail to "
            << trials_path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Row-sparse covariate selection and treatment-effect "
               "estimation across cohorts"};
  app.set_version_flag("--version", js::kVersion);
  app.require_subcommand(1);

  SynthOptions synth;
  CLI::App* s_synth =
      app.add_subcommand("synth", "Generate a synthetic dataset with ground truth");
  s_synth->add_option("--p", synth.p, "Covariates");
  s_synth->add_option("--q", synth.q, "Treatment arms");
  s_synth->add_option("--k", synth.k, "True support size");
  s_synth->add_option("--n", synth.n, "Samples");
  s_synth->add_option("--seed", synth.seed, "Seed");
  s_synth->add_option("--sigma", synth.sigma, "Outcome noise standard deviation");
  s_synth->add_option("--coef-scale", synth.coef_scale, "Coefficient scale");
  s_synth->add_option("--phi-scale", synth.phi_scale,
                      "Treatment-assignment signal scale");
  s_synth->add_option("--out", synth.out, "Output CSV path")->required();
  add_config_support(s_synth);
  s_synth->callback([&] { run_synth(synth); });

  SelectOptions sel;
  CLI::App* s_sel =
      app.add_subcommand("select", "Select an admissible covariate set");
  s_sel->add_option("--data", sel.data, "Input CSV")->required();
  s_sel->add_option("--treatment-col", sel.treatment_col, "Treatment column");
  s_sel->add_option("--outcome-col", sel.outcome_col, "Outcome column");
  s_sel->add_option("--mode", sel.mode, "Selection mode")
      ->check(CLI::IsMember({"joint", "independent", "treatment-regression"}));
  s_sel->add_option("--reg", sel.reg, "Regularizer")
      ->check(CLI::IsMember({"mcp", "scad", "l1"}));
  s_sel->add_option("--gamma", sel.gamma, "Regularizer curvature; 0 = default");
  s_sel->add_option("--lambda", sel.lambda,
                    "Fixed penalty level; 0 = data-driven grid");
  s_sel->add_option("--cv-folds", sel.cv_folds,
                    "Cross-validation folds; 0 = first grid value");
  s_sel->add_option("--top-m", sel.top_m,
                    "Support size for treatment-regression mode");
  s_sel->add_option("--standardize", sel.standardize, "Standardize before fitting");
  s_sel->add_option("--seed", sel.seed, "Seed for fold assignment");
  s_sel->add_option("--out", sel.out, "Support output path")->required();
  add_config_support(s_sel);
  s_sel->callback([&] { run_select(sel); });

  EstimateOptions est;
  CLI::App* s_est = app.add_subcommand(
      "estimate", "Two-stage treatment-effect estimation on pooled data");
  s_est->add_option("--data", est.data, "Input CSV")->required();
  s_est->add_option("--treatment-col", est.treatment_col, "Treatment column");
  s_est->add_option("--outcome-col", est.outcome_col, "Outcome column");
  s_est->add_option("--method", est.method, "Effect estimator")
      ->check(CLI::IsMember({"plugin", "dr"}));
  s_est->add_option("--selection-fraction", est.selection_fraction,
                    "Share of rows used for selection");
  s_est->add_option("--splits", est.splits, "Sample-split repetitions");
  s_est->add_option("--propensity-ridge", est.propensity_ridge,
                    "Ridge level for the propensity fit");
  s_est->add_option("--mode", est.mode, "Selection mode")
      ->check(CLI::IsMember({"joint", "independent", "treatment-regression"}));
  s_est->add_option("--reg", est.reg, "Regularizer")
      ->check(CLI::IsMember({"mcp", "scad", "l1"}));
  s_est->add_option("--gamma", est.gamma, "Regularizer curvature; 0 = default");
  s_est->add_option("--lambda", est.lambda,
                    "Fixed penalty level; 0 = data-driven grid");
  s_est->add_option("--cv-folds", est.cv_folds,
                    "Cross-validation folds; 0 = first grid value");
  s_est->add_option("--top-m", est.top_m,
                    "Support size for treatment-regression mode");
  s_est->add_option("--standardize", est.standardize,
                    "Standardize before fitting");
  s_est->add_option("--seed", est.seed, "Seed for splits and folds");
  s_est->add_option("--out", est.out, "Pairwise contrast CSV path")->required();
  add_config_support(s_est);
  s_est->callback([&] { run_estimate(est); });

  PhaseOptions phase;
  CLI::App* s_phase = app.add_subcommand(
      "phase-diagram", "Support recovery probability over an (n, p) grid");
  s_phase->add_option("--n", phase.n_grid, "Sample sizes, ascending")
      ->delimiter(',')
      ->required();
  s_phase->add_option("--p", phase.p_grid, "Covariate counts, ascending")
      ->delimiter(',')
      ->required();
  add_gen_options(s_phase, phase.gen);
  s_phase->add_option("--mode", phase.mode, "Selection mode")
      ->check(CLI::IsMember({"joint", "independent", "treatment-regression"}));
  s_phase->add_option("--policy", phase.policy, "Lambda policy")
      ->check(CLI::IsMember({"theory", "cv", "fixed"}));
  s_phase->add_option("--lambda-c", phase.lambda_c,
                      "Theory-rate constant; 0 = calibrate");
  s_phase->add_option("--lambda-fixed", phase.lambda_fixed,
                      "Penalty level for the fixed policy");
  s_phase->add_option("--cv-folds", phase.cv_folds,
                      "Folds for the cv policy");
  s_phase->add_option("--out", phase.out, "Output CSV path")->required();
  add_config_support(s_phase);
  s_phase->callback([&] { run_phase(phase); });

  ScalingOptions scaling;
  scaling.gen.trials = 30;
  CLI::App* s_scale = app.add_subcommand(
      "scaling", "Estimation error against sample size at fixed p");
  s_scale->add_option("--p", scaling.p, "Covariates");
  s_scale->add_option("--n", scaling.n_list, "Sample sizes, ascending")
      ->delimiter(',')
      ->required();
  add_gen_options(s_scale, scaling.gen);
  s_scale->add_option("--lambda-c", scaling.lambda_c,
                      "Theory-rate constant; 0 = calibrate");
  s_scale->add_option("--out", scaling.out, "Output CSV path")->required();
  add_config_support(s_scale);
  s_scale->callback([&] { run_scaling(scaling); });

  try {
    std::vector<std::string> args = expand_config_args(app, argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const js::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const js::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
