// This file is part of drmdp, a solver library for distributionally robust
// Markov decision processes with discounted and average-reward objectives.
//
// SPDX-License-Identifier: MIT

#pragma once

#include <string>

#include "drmdp/bellman.hpp"
#include "drmdp/divergence.hpp"
#include "drmdp/types.hpp"

namespace drmdp {

enum class Method { Reduction, Anchored };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct AvgRewardSolution {
  double gain = 0.0;  // robust long-run average reward estimate, in [0, 1]
  Vec bias;           // relative values (Reduction: the full V*/sqrt(n) vector)
  Policy policy;
  Method method = Method::Reduction;
  long long n = 0;    // samples per (s, a) used to build the input kernel
  long long iterations = 0;
};

struct AnchorParams {
  int anchor_state = 0;
  double xi = 0.0;  // in (0, 1)

  void validate(int n_states) const;
};

/// Average-reward estimation by reduction to the discounted problem: solves
/// the robust discounted Bellman equation at gamma = 1 - 1/sqrt(n) and
/// rescales. The per-state gain vector V*/sqrt(n) is kept in bias; the scalar
/// gain is its entry at state 0. Requires n >= 2 (n = 1 would give gamma = 0).
AvgRewardSolution reduce_to_dmdp(const KernelView& kv,
                                 const UncertaintySetSpec& spec, long long n,
                                 double tol = 1e-6);
AvgRewardSolution reduce_to_dmdp(const EmpiricalKernel& emp,
                                 const Vec& rewards,
                                 const UncertaintySetSpec& spec, long long n,
                                 double tol = 1e-6);

/// Robust expectation over the anchored ball
///   { (1 - xi) q + xi e_{s0} : D(q || p) <= delta },
/// which equals (1 - xi) Gamma_ball(v) + xi v(s0).
double anchored_gamma(const UncertaintySetSpec& spec, const double* p_row,
                      int size, const AnchorParams& anchor, const Vec& v);

/// Average-reward estimation by anchored relative value iteration with
/// xi = 1/sqrt(n):
///   v_{t+1} = T(omega_t),  omega_{t+1} = v_{t+1} - v_{t+1}(s0) e,
/// where T is the optimal operator with every ball anchored at s0. Stops when
/// ||omega_{t+1} - omega_t||_inf <= tol; the gain is the converged offset
/// v(s0). This is a genuinely distinct implementation from reduce_to_dmdp
/// (the two agree on the gain up to solver tolerance, which the tests use as
/// a strong cross-check). Requires n >= 2 (n = 1 would give xi = 1).
AvgRewardSolution anchored_amdp(const KernelView& kv,
                                const UncertaintySetSpec& spec, long long n,
                                int anchor_state = 0, double tol = 1e-6,
                                long long max_iters = 10000000);
AvgRewardSolution anchored_amdp(const EmpiricalKernel& emp, const Vec& rewards,
                                const UncertaintySetSpec& spec, long long n,
                                int anchor_state = 0, double tol = 1e-6,
                                long long max_iters = 10000000);

/// High-precision robust average reward of the model itself (the true
/// kernel): anchored relative value iteration with xi = precision and
/// tol = precision / 100. The result is within 18 * t_minorize * precision of
/// the exact robust gain.
double ground_truth_gain(const MdpModel& model, const UncertaintySetSpec& spec,
                         double precision);

/// Admissible-radius report: the adversary's power is limited enough for the
/// uniform-ergodicity machinery when
///   delta <= p_min / (8 m_vee^2)            (KL)
///   delta <= p_min / (max{8, 4k} m_vee^2)   (Cressie-Read).
struct AdversarialPowerReport {
  long long m_vee = 0;
  double p_min = 0.0;
  double delta_max = 0.0;
  bool satisfied = false;
};

/// Computes m_vee and p_min through the ergodicity diagnostics (policy
/// enumeration) and evaluates the bound above against spec.radius.
/// Propagates NonErgodic / TooManyPolicies.
AdversarialPowerReport check_adversarial_power(const MdpModel& model,
                                               const UncertaintySetSpec& spec,
                                               long long m_max = 4096);

}  // namespace drmdp
