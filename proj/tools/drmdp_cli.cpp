// This file is part of drmdp, a solver library for distributionally robust
// Markov decision processes with discounted and average-reward objectives.
//
// SPDX-License-Identifier: MIT
//
// Command-line harness: instance generation, ergodicity diagnostics, one-off
// solves, and the sampling/convergence experiment pipeline.

#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drmdp/average.hpp"
#include "drmdp/bellman.hpp"
#include "drmdp/divergence.hpp"
#include "drmdp/ergodicity.hpp"
#include "drmdp/errors.hpp"
#include "drmdp/experiment.hpp"
#include "drmdp/instances.hpp"
#include "drmdp/json_io.hpp"
#include "drmdp/model.hpp"

namespace {

using namespace drmdp;

UncertaintySetSpec spec_from_flags(const std::string& divergence, double delta,
                                   double k) {
  UncertaintySetSpec spec;
  spec.divergence = divergence_from_string(divergence);
  spec.radius = delta;
  spec.k = k;
  spec.validate();
  return spec;
}

std::vector<long long> parse_n_grid(const std::string& text) {
  std::vector<long long> grid;
  std::string cur;
  for (char c : text + ",") {
    if (c == ',') {
      if (!cur.empty()) {
        grid.push_back(std::stoll(cur));
        cur.clear();
      }
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  return grid;
}

int run_gen(const std::string& family, double p, int states, int actions,
            std::uint64_t seed, double sigma_max, const std::string& out) {
  MdpModel model;
  if (family == "hard") {
    model = hard_mdp(HardMdpParams{p});
  } else if (family == "random") {
    RandomMdpParams params;
    params.n_states = states;
    params.n_actions = actions;
    params.seed = RngSeed{seed};
    params.sigma_max = sigma_max;
    model = random_mdp(params);
  } else {
    throw std::invalid_argument("unknown family: " + family);
  }
  if (out == "-") {
    std::cout << to_json(model).dump(2) << "\n";
  } else {
    save_model(model, out);
    std::cerr << "wrote " << out << "\n";
  }
  return 0;
}

int run_diagnose(const std::string& model_path, const std::string& policy_csv,
                 long long m_max, const std::string& divergence, double delta,
                 double k) {
  const MdpModel model = load_model(model_path);
  Policy policy;
  if (policy_csv.empty()) {
    policy.action_of.assign(model.n_states, 0);
  } else {
    for (long long a : parse_n_grid(policy_csv)) {
      policy.action_of.push_back(static_cast<int>(a));
    }
    if (policy.size() != model.n_states) {
      throw std::invalid_argument("--policy must list one action per state");
    }
  }
  const Matrix K = induced_kernel(model, policy);
  json out;
  out["policy"] = policy.action_of;
  out["report"] = to_json(ergodicity_report(K, m_max));
  out["p_min"] = min_support_probability(model);
  try {
    const ModelMinorization mm = model_minorization_time(model, m_max);
    out["model"] = json{{"t_minorize", mm.t_minorize},
                        {"m_vee", mm.m_vee},
                        {"policies_evaluated", mm.policies_evaluated}};
  } catch (const TooManyPolicies& e) {
    out["model"] = json{{"skipped", e.what()}};
  }
  if (delta > 0.0) {
    const UncertaintySetSpec spec = spec_from_flags(divergence, delta, k);
    try {
      out["adversarial_power"] = to_json(check_adversarial_power(model, spec));
    } catch (const TooManyPolicies& e) {
      out["adversarial_power"] = json{{"skipped", e.what()}};
    }
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_solve(const std::string& model_path, const std::string& divergence,
              double delta, double k, const std::string& method, long long n,
              double tol, int anchor_state, double gamma, double precision,
              const std::string& dump_duals) {
  const MdpModel model = load_model(model_path);
  const UncertaintySetSpec spec = spec_from_flags(divergence, delta, k);
  const KernelView kv = KernelView::of(model);

  json out;
  Vec values_for_duals;
  if (method == "reduction" || method == "anchored") {
    const AvgRewardSolution sol =
        method == "reduction"
            ? reduce_to_dmdp(kv, spec, n, tol)
            : anchored_amdp(kv, spec, n, anchor_state, tol);
    out = to_json(sol);
    values_for_duals = sol.bias;
  } else if (method == "discounted") {
    DiscountedSolveParams params;
    params.gamma = gamma;
    params.tol = tol;
    const DiscountedSolution sol = solve_dr_dmdp(kv, spec, params);
    out = json{{"values", sol.values},
               {"policy", sol.policy.action_of},
               {"iterations", sol.iterations},
               {"residual", sol.residual}};
    values_for_duals = sol.values;
  } else if (method == "ground-truth") {
    out = json{{"gain", ground_truth_gain(model, spec, precision)},
               {"precision", precision}};
  } else {
    throw std::invalid_argument("unknown method: " + method);
  }

  if (!dump_duals.empty() && !values_for_duals.empty() && delta > 0.0) {
    // Debugging dump: the worst-case transition row per (s, a) at the
    // returned value vector.
    json duals = json::array();
    for (int s = 0; s < model.n_states; ++s) {
      for (int a = 0; a < model.n_actions; ++a) {
        const DualSolution d =
            spec.divergence == Divergence::KL
                ? kl_worst_case(model.row(s, a), values_for_duals.data(),
                                model.n_states, spec.radius)
                : fk_worst_case(model.row(s, a), values_for_duals.data(),
                                model.n_states, spec.radius, spec.k);
        json entry = to_json(d);
        entry["s"] = s;
        entry["a"] = a;
        duals.push_back(std::move(entry));
      }
    }
    write_file(dump_duals, duals.dump(2) + "\n");
    std::cerr << "wrote " << dump_duals << "\n";
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

void warn_adversarial_power(const MdpModel& model,
                            const UncertaintySetSpec& spec) {
  if (!(spec.radius > 0.0)) return;
  try {
    const AdversarialPowerReport rep = check_adversarial_power(model, spec);
    if (!rep.satisfied) {
      std::fprintf(stderr,
                   "warning: radius %.17g exceeds the admissible bound %.17g "
                   "(p_min = %.17g, m_vee = %lld); error guarantees do not "
                   "apply\n",
                   spec.radius, rep.delta_max, rep.p_min,
                   static_cast<long long>(rep.m_vee));
    }
  } catch (const TooManyPolicies&) {
    std::fprintf(stderr,
                 "warning: admissible-radius bound not verifiable (policy "
                 "space too large to enumerate)\n");
  }
}

int run_experiment_cmd(const ExperimentConfig& config) {
  warn_adversarial_power(config.build_model(), config.spec);
  const std::vector<ExperimentRecord> records = run_experiment(config);

  std::map<Method, RegressionFit> fits;
  for (Method method : {Method::Reduction, Method::Anchored}) {
    std::vector<ExperimentRecord> subset;
    for (const auto& rec : records) {
      if (rec.algorithm == method) subset.push_back(rec);
    }
    if (subset.empty()) continue;
    try {
      fits[method] = fit_loglog(subset);
    } catch (const InsufficientData& e) {
      std::fprintf(stderr, "note: no %s regression: %s\n",
                   to_string(method).c_str(), e.what());
    }
  }
  const std::vector<std::string> written = emit_outputs(records, fits, config);
  for (const auto& path : written) std::cerr << "wrote " << path << "\n";
  for (const auto& [method, fit] : fits) {
    std::fprintf(stdout, "%s: slope %.4f (r^2 %.4f, %d points)\n",
                 to_string(method).c_str(), fit.slope, fit.r_squared,
                 fit.point_count);
  }
  long long failed = 0;
  for (const auto& rec : records) failed += rec.failed ? 1 : 0;
  if (failed > 0) {
    std::fprintf(stderr, "%lld record(s) failed\n", failed);
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drmdp: distributionally robust MDP solvers and experiments"};
  app.require_subcommand(1);

  // --- gen ---
  std::string gen_family = "hard", gen_out = "model.json";
  double gen_p = 0.25, gen_sigma_max = 100.0;
  int gen_states = 20, gen_actions = 30;
  std::uint64_t gen_seed = 1;
  auto* gen = app.add_subcommand("gen", "Generate a benchmark instance");
  gen->add_option("--family", gen_family, "Instance family: hard | random")
      ->check(CLI::IsMember({"hard", "random"}));
  gen->add_option("--p", gen_p, "Hard-instance switching probability");
  gen->add_option("--states", gen_states, "Random-instance state count");
  gen->add_option("--actions", gen_actions, "Random-instance action count");
  gen->add_option("--seed", gen_seed, "Random-instance seed");
  gen->add_option("--sigma-max", gen_sigma_max,
                  "Random-instance row-noise scale upper bound");
  gen->add_option("--out", gen_out, "Output path ('-' for stdout)");

  // --- diagnose ---
  std::string diag_model, diag_policy, diag_div = "kl";
  long long diag_m_max = 4096;
  double diag_delta = 0.0, diag_k = 2.0;
  auto* diag =
      app.add_subcommand("diagnose", "Ergodicity diagnostics for a model");
  diag->add_option("--model", diag_model, "Model JSON path")->required();
  diag->add_option("--policy", diag_policy,
                   "Comma-separated action per state (default: all zeros)");
  diag->add_option("--m-max", diag_m_max, "Largest horizon to scan");
  diag->add_option("--delta", diag_delta,
                   "Include the admissible-radius check for this radius");
  diag->add_option("--divergence", diag_div, "kl | fk")
      ->check(CLI::IsMember({"kl", "fk"}));
  diag->add_option("--k", diag_k, "Cressie-Read exponent");

  // --- solve ---
  std::string solve_model, solve_div = "kl", solve_method = "anchored";
  std::string solve_dump;
  double solve_delta = 0.0, solve_k = 2.0, solve_tol = 1e-6;
  double solve_gamma = 0.9, solve_precision = 1e-6;
  long long solve_n = 10000;
  int solve_anchor = 0;
  auto* solve = app.add_subcommand("solve", "Solve one model");
  solve->add_option("--model", solve_model, "Model JSON path")->required();
  solve->add_option("--divergence", solve_div, "kl | fk")
      ->check(CLI::IsMember({"kl", "fk"}));
  solve->add_option("--delta", solve_delta, "Ambiguity radius");
  solve->add_option("--k", solve_k, "Cressie-Read exponent");
  solve->add_option(
      "--method", solve_method,
      "reduction | anchored | discounted | ground-truth");
  solve->add_option("--n", solve_n,
                    "Sample count the average-reward methods assume");
  solve->add_option("--tol", solve_tol, "Solver tolerance");
  solve->add_option("--anchor-state", solve_anchor, "Anchor state index");
  solve->add_option("--gamma", solve_gamma, "Discount (method=discounted)");
  solve->add_option("--precision", solve_precision,
                    "Target accuracy (method=ground-truth)");
  solve->add_option("--dump-duals", solve_dump,
                    "Write per-(s,a) worst-case rows to this JSON path");

  // --- experiment ---
  std::string exp_config;
  std::optional<std::string> exp_family, exp_div, exp_algorithm, exp_out_dir;
  std::optional<std::string> exp_n_grid;
  std::optional<double> exp_p, exp_delta, exp_k, exp_tol, exp_precision;
  std::optional<int> exp_seeds, exp_anchor, exp_states, exp_actions;
  std::optional<std::uint64_t> exp_base_seed, exp_instance_seed;
  std::optional<double> exp_sigma_max;
  bool exp_plot = false;
  auto* exp = app.add_subcommand(
      "experiment", "Run a sampling/convergence experiment");
  exp->add_option("--config", exp_config, "TOML or JSON config file");
  exp->add_option("--family", exp_family, "hard | random");
  exp->add_option("--p", exp_p, "Hard-instance switching probability");
  exp->add_option("--states", exp_states, "Random-instance state count");
  exp->add_option("--actions", exp_actions, "Random-instance action count");
  exp->add_option("--instance-seed", exp_instance_seed,
                  "Random-instance seed");
  exp->add_option("--sigma-max", exp_sigma_max,
                  "Random-instance row-noise scale upper bound");
  exp->add_option("--divergence", exp_div, "kl | fk");
  exp->add_option("--delta", exp_delta, "Ambiguity radius");
  exp->add_option("--k", exp_k, "Cressie-Read exponent");
  exp->add_option("--algorithm", exp_algorithm,
                  "reduction | anchored | both");
  exp->add_option("--n-grid", exp_n_grid,
                  "Comma-separated sample sizes (default: half decades "
                  "100..100000)");
  exp->add_option("--seeds", exp_seeds, "Replicates per sample size");
  exp->add_option("--base-seed", exp_base_seed, "Base seed for sampling");
  exp->add_option("--solver-tol", exp_tol, "Solver tolerance");
  exp->add_option("--gt-precision", exp_precision, "Ground-truth precision");
  exp->add_option("--anchor-state", exp_anchor, "Anchor state index");
  exp->add_option("--out-dir", exp_out_dir, "Output directory");
  exp->add_flag("--plot", exp_plot, "Also write convergence.svg");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // config/usage errors exit 1
  }

  try {
    if (gen->parsed()) {
      return run_gen(gen_family, gen_p, gen_states, gen_actions, gen_seed,
                     gen_sigma_max, gen_out);
    }
    if (diag->parsed()) {
      return run_diagnose(diag_model, diag_policy, diag_m_max, diag_div,
                          diag_delta, diag_k);
    }
    if (solve->parsed()) {
      return run_solve(solve_model, solve_div, solve_delta, solve_k,
                       solve_method, solve_n, solve_tol, solve_anchor,
                       solve_gamma, solve_precision, solve_dump);
    }
    if (exp->parsed()) {
      ExperimentConfig config;
      if (!exp_config.empty()) config = config_from_file(exp_config);
      if (exp_family) config.family = *exp_family;
      if (exp_p) config.hard.p = *exp_p;
      if (exp_states) config.random.n_states = *exp_states;
      if (exp_actions) config.random.n_actions = *exp_actions;
      if (exp_instance_seed) config.random.seed.seed = *exp_instance_seed;
      if (exp_sigma_max) config.random.sigma_max = *exp_sigma_max;
      if (exp_div) {
        config.spec.divergence = divergence_from_string(*exp_div);
      }
      if (exp_delta) config.spec.radius = *exp_delta;
      if (exp_k) config.spec.k = *exp_k;
      if (exp_algorithm) {
        config.algorithm = algorithm_choice_from_string(*exp_algorithm);
      }
      if (exp_n_grid) config.n_grid = parse_n_grid(*exp_n_grid);
      if (exp_seeds) config.seeds_per_n = *exp_seeds;
      if (exp_base_seed) config.base_seed = *exp_base_seed;
      if (exp_tol) config.solver_tol = *exp_tol;
      if (exp_precision) config.ground_truth_precision = *exp_precision;
      if (exp_anchor) config.anchor_state = *exp_anchor;
      if (exp_out_dir) config.out_dir = *exp_out_dir;
      if (exp_plot) config.plot = true;
      config.validate();
      return run_experiment_cmd(config);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
