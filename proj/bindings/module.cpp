// This file is part of drmdp, a solver library for distributionally robust
// Markov decision processes with discounted and average-reward objectives.
//
// SPDX-License-Identifier: MIT

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "drmdp/average.hpp"
#include "drmdp/bellman.hpp"
#include "drmdp/divergence.hpp"
#include "drmdp/ergodicity.hpp"
#include "drmdp/errors.hpp"
#include "drmdp/experiment.hpp"
#include "drmdp/instances.hpp"
#include "drmdp/model.hpp"

namespace py = pybind11;
using namespace drmdp;

namespace {

UncertaintySetSpec make_spec(const std::string& divergence, double delta,
                             double k) {
  UncertaintySetSpec spec;
  spec.divergence = divergence_from_string(divergence);
  spec.radius = delta;
  spec.k = k;
  spec.validate();
  return spec;
}

}  // namespace

PYBIND11_MODULE(_drmdp, m) {
  m.doc() =
      "Distributionally robust MDP solvers: KL / Cressie-Read ambiguity "
      "balls, discounted and average-reward algorithms, ergodicity "
      "diagnostics and convergence experiments.";

  py::register_exception<NonErgodic>(m, "NonErgodic", PyExc_RuntimeError);
  py::register_exception<SupportTooLarge>(m, "SupportTooLarge",
                                          PyExc_RuntimeError);
  py::register_exception<MaxItersExceeded>(m, "MaxItersExceeded",
                                           PyExc_RuntimeError);
  py::register_exception<TooManyPolicies>(m, "TooManyPolicies",
                                          PyExc_RuntimeError);
  py::register_exception<InsufficientData>(m, "InsufficientData",
                                           PyExc_RuntimeError);

  py::class_<Policy>(m, "Policy")
      .def(py::init([](std::vector<int> actions) {
             return Policy{std::move(actions)};
           }),
           py::arg("actions"))
      .def_readwrite("actions", &Policy::action_of)
      .def("__call__", &Policy::operator())
      .def("__len__", &Policy::size);

  py::class_<Matrix>(m, "Matrix")
      .def_readonly("n", &Matrix::n)
      .def("row",
           [](const Matrix& k, int s) {
             return std::vector<double>(k.row(s), k.row(s) + k.n);
           })
      .def("__getitem__",
           [](const Matrix& k, std::pair<int, int> rc) {
             return k.at(rc.first, rc.second);
           });

  py::class_<MdpModel>(m, "MdpModel")
      .def(py::init([](int n_states, int n_actions, Vec reward, Vec kernel) {
             MdpModel model{n_states, n_actions, std::move(reward),
                            std::move(kernel)};
             model.validate_and_sanitize();
             return model;
           }),
           py::arg("n_states"), py::arg("n_actions"), py::arg("reward"),
           py::arg("kernel"))
      .def_readonly("n_states", &MdpModel::n_states)
      .def_readonly("n_actions", &MdpModel::n_actions)
      .def_readonly("reward", &MdpModel::reward)
      .def_readonly("kernel", &MdpModel::kernel)
      .def("r", &MdpModel::r, py::arg("s"), py::arg("a"))
      .def("row", [](const MdpModel& model, int s, int a) {
        return std::vector<double>(model.row(s, a),
                                   model.row(s, a) + model.n_states);
      });

  py::class_<EmpiricalKernel>(m, "EmpiricalKernel")
      .def_readonly("n_states", &EmpiricalKernel::n_states)
      .def_readonly("n_actions", &EmpiricalKernel::n_actions)
      .def_readonly("n", &EmpiricalKernel::n)
      .def_readonly("counts", &EmpiricalKernel::counts)
      .def_readonly("probs", &EmpiricalKernel::probs)
      .def("row", [](const EmpiricalKernel& e, int s, int a) {
        return std::vector<double>(e.row(s, a), e.row(s, a) + e.n_states);
      });

  py::class_<DualSolution>(m, "DualSolution")
      .def_readonly("value", &DualSolution::value)
      .def_readonly("multiplier", &DualSolution::multiplier)
      .def_readonly("any_ball_member", &DualSolution::any_ball_member)
      .def_readonly("worst_case", &DualSolution::worst_case)
      .def_readonly("achieved_divergence", &DualSolution::achieved_divergence);

  py::class_<AvgRewardSolution>(m, "AvgRewardSolution")
      .def_readonly("gain", &AvgRewardSolution::gain)
      .def_readonly("bias", &AvgRewardSolution::bias)
      .def_property_readonly(
          "policy",
          [](const AvgRewardSolution& s) { return s.policy.action_of; })
      .def_property_readonly(
          "method",
          [](const AvgRewardSolution& s) { return to_string(s.method); })
      .def_readonly("n", &AvgRewardSolution::n)
      .def_readonly("iterations", &AvgRewardSolution::iterations);

  py::class_<DiscountedSolution>(m, "DiscountedSolution")
      .def_readonly("values", &DiscountedSolution::values)
      .def_property_readonly(
          "policy",
          [](const DiscountedSolution& s) { return s.policy.action_of; })
      .def_readonly("iterations", &DiscountedSolution::iterations)
      .def_readonly("residual", &DiscountedSolution::residual);

  py::class_<DoeblinCertificate>(m, "DoeblinCertificate")
      .def_readonly("m", &DoeblinCertificate::m)
      .def_readonly("p", &DoeblinCertificate::p)
      .def_readonly("psi", &DoeblinCertificate::psi)
      .def_readonly("ratio", &DoeblinCertificate::ratio);

  py::class_<ErgodicityReport>(m, "ErgodicityReport")
      .def_readonly("t_minorize", &ErgodicityReport::t_minorize)
      .def_readonly("best_cert", &ErgodicityReport::best_cert)
      .def_readonly("t_mix", &ErgodicityReport::t_mix)
      .def_readonly("m_star", &ErgodicityReport::m_star);

  py::class_<AdversarialPowerReport>(m, "AdversarialPowerReport")
      .def_readonly("m_vee", &AdversarialPowerReport::m_vee)
      .def_readonly("p_min", &AdversarialPowerReport::p_min)
      .def_readonly("delta_max", &AdversarialPowerReport::delta_max)
      .def_readonly("satisfied", &AdversarialPowerReport::satisfied);

  py::class_<RegressionFit>(m, "RegressionFit")
      .def_readonly("slope", &RegressionFit::slope)
      .def_readonly("intercept", &RegressionFit::intercept)
      .def_readonly("r_squared", &RegressionFit::r_squared)
      .def_readonly("point_count", &RegressionFit::point_count);

  // Instance generators.
  m.def(
      "hard_mdp", [](double p) { return hard_mdp(HardMdpParams{p}); },
      py::arg("p") = 0.25,
      "Two-state slow-mixing benchmark instance (minorization time 1/(2p)).");
  m.def(
      "random_mdp",
      [](int n_states, int n_actions, std::uint64_t seed, double sigma_max) {
        return random_mdp(
            RandomMdpParams{n_states, n_actions, RngSeed{seed}, sigma_max});
      },
      py::arg("n_states") = 20, py::arg("n_actions") = 30, py::arg("seed") = 1,
      py::arg("sigma_max") = 100.0,
      "Dense random benchmark instance; deterministic per seed.");

  // Core model operations.
  m.def(
      "sample_transitions",
      [](const MdpModel& model, long long n, std::uint64_t seed) {
        return sample_transitions(model, n, RngSeed{seed});
      },
      py::arg("model"), py::arg("n"), py::arg("seed"),
      "Draw n generative-model samples per (s, a).");
  m.def("induced_kernel", &induced_kernel, py::arg("model"), py::arg("policy"));
  m.def(
      "stationary_distribution",
      [](const Matrix& k, double tol) {
        return stationary_distribution(k, tol);
      },
      py::arg("kernel"), py::arg("tol") = 1e-12);
  m.def("average_reward", &average_reward, py::arg("model"), py::arg("policy"));
  m.def("min_support_probability", &min_support_probability, py::arg("model"));

  // Robust expectations.
  m.def(
      "dual_value",
      [](const Vec& p, const Vec& V, const std::string& divergence,
         double delta, double k) {
        return dual_value(make_spec(divergence, delta, k), p, V);
      },
      py::arg("p"), py::arg("v"), py::arg("divergence"), py::arg("delta"),
      py::arg("k") = 2.0,
      "Robust expectation inf <q, v> over the ambiguity ball.");
  m.def(
      "kl_worst_case",
      [](const Vec& p, const Vec& V, double delta) {
        return kl_worst_case(p, V, delta);
      },
      py::arg("p"), py::arg("v"), py::arg("delta"));
  m.def(
      "fk_worst_case",
      [](const Vec& p, const Vec& V, double delta, double k) {
        return fk_worst_case(p, V, delta, k);
      },
      py::arg("p"), py::arg("v"), py::arg("delta"), py::arg("k") = 2.0);
  m.def(
      "brute_force_gamma",
      [](const Vec& p, const Vec& V, const std::string& divergence,
         double delta, double k, double grid_step) {
        return brute_force_gamma(p, V, make_spec(divergence, delta, k),
                                 grid_step);
      },
      py::arg("p"), py::arg("v"), py::arg("divergence"), py::arg("delta"),
      py::arg("k") = 2.0, py::arg("grid_step") = 1e-4,
      "Grid-search oracle for the robust expectation (support <= 4).");

  // Solvers.
  m.def(
      "solve_dr_dmdp",
      [](const MdpModel& model, const std::string& divergence, double delta,
         double k, double gamma, double tol) {
        DiscountedSolveParams params;
        params.gamma = gamma;
        params.tol = tol;
        return solve_dr_dmdp(KernelView::of(model),
                             make_spec(divergence, delta, k), params);
      },
      py::arg("model"), py::arg("divergence"), py::arg("delta"),
      py::arg("k") = 2.0, py::arg("gamma") = 0.9, py::arg("tol") = 1e-10,
      "Robust discounted value iteration on the model's own kernel.");
  m.def(
      "reduce_to_dmdp",
      [](const EmpiricalKernel& emp, const Vec& rewards,
         const std::string& divergence, double delta, double k, long long n,
         double tol) {
        if (n <= 0) n = emp.n;  // default: the kernel's own sample count
        return reduce_to_dmdp(emp, rewards, make_spec(divergence, delta, k), n,
                              tol);
      },
      py::arg("empirical"), py::arg("rewards"), py::arg("divergence"),
      py::arg("delta"), py::arg("k") = 2.0, py::arg("n") = 0,
      py::arg("tol") = 1e-6,
      "Average-reward estimation via the discounted reduction.");
  m.def(
      "anchored_amdp",
      [](const EmpiricalKernel& emp, const Vec& rewards,
         const std::string& divergence, double delta, double k, long long n,
         int anchor_state, double tol) {
        if (n <= 0) n = emp.n;  // default: the kernel's own sample count
        return anchored_amdp(emp, rewards, make_spec(divergence, delta, k), n,
                             anchor_state, tol);
      },
      py::arg("empirical"), py::arg("rewards"), py::arg("divergence"),
      py::arg("delta"), py::arg("k") = 2.0, py::arg("n") = 0,
      py::arg("anchor_state") = 0, py::arg("tol") = 1e-6,
      "Average-reward estimation via anchored relative value iteration.");
  m.def(
      "ground_truth_gain",
      [](const MdpModel& model, const std::string& divergence, double delta,
         double k, double precision) {
        return ground_truth_gain(model, make_spec(divergence, delta, k),
                                 precision);
      },
      py::arg("model"), py::arg("divergence"), py::arg("delta"),
      py::arg("k") = 2.0, py::arg("precision") = 1e-6,
      "High-precision robust average reward of the model's true kernel.");
  m.def(
      "check_adversarial_power",
      [](const MdpModel& model, const std::string& divergence, double delta,
         double k) {
        return check_adversarial_power(model, make_spec(divergence, delta, k));
      },
      py::arg("model"), py::arg("divergence"), py::arg("delta"),
      py::arg("k") = 2.0);

  // Diagnostics.
  m.def("doeblin_at_horizon", &doeblin_at_horizon, py::arg("kernel"),
        py::arg("m"));
  m.def(
      "ergodicity_report",
      [](const Matrix& k, long long m_max) {
        return ergodicity_report(k, m_max);
      },
      py::arg("kernel"), py::arg("m_max") = 4096);
  m.def(
      "mixing_time",
      [](const Matrix& k, long long m_max) { return mixing_time(k, m_max); },
      py::arg("kernel"), py::arg("m_max") = 4096);
  m.def("span_norm", &span_norm, py::arg("v"));

  // Experiment utilities.
  m.def(
      "fit_loglog",
      [](const std::vector<std::pair<long long, double>>& points) {
        std::vector<ExperimentRecord> records;
        for (const auto& [n, err] : points) {
          ExperimentRecord rec;
          rec.n = n;
          rec.abs_error = err;
          records.push_back(rec);
        }
        return fit_loglog(records);
      },
      py::arg("points"),
      "OLS fit of log10(error) on log10(n) over (n, error) pairs.");
}
