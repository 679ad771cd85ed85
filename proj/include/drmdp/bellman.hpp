// This file is part of drmdp, a solver library for distributionally robust
// Markov decision processes with discounted and average-reward objectives.
//
// SPDX-License-Identifier: MIT

#pragma once

#include "drmdp/divergence.hpp"
#include "drmdp/types.hpp"

namespace drmdp {

struct DiscountedSolveParams {
  double gamma = 0.9;  // in (0, 1)
  double tol = 1e-10;  // guaranteed sup-norm accuracy of the returned values
  /// Iteration cap; 0 selects the default 200 * ceil(1/(1-gamma)) *
  /// log10(1/tol) sweeps.
  long long max_iters = 0;

  void validate() const;
  long long effective_max_iters() const;
};

struct DiscountedSolution {
  Vec values;       // fixed point of the robust optimal operator, within tol
  Policy policy;    // greedy w.r.t. values, lowest-index tie-breaking
  long long iterations = 0;
  double residual = 0.0;  // final ||V_{t+1} - V_t||_inf
};

/// Robust optimal Bellman operator:
///   T(V)(s) = max_a { r(s, a) + gamma * Gamma_{ball(s,a)}(V) },
/// where Gamma is the robust expectation of the (s, a) ambiguity ball.
/// Evaluated as one Jacobi sweep (all states from the same input V).
Vec optimal_operator(const KernelView& kv, const UncertaintySetSpec& spec,
                     double gamma, const Vec& V);

/// Robust policy-evaluation operator: the action is fixed by the policy.
Vec policy_operator(const KernelView& kv, const UncertaintySetSpec& spec,
                    double gamma, const Policy& policy, const Vec& V);

/// Greedy policy w.r.t. V (lowest action index wins ties).
Policy greedy_policy(const KernelView& kv, const UncertaintySetSpec& spec,
                     double gamma, const Vec& V);

/// Value iteration from V = 0 until ||V_{t+1} - V_t||_inf <=
/// tol (1 - gamma) / (2 gamma), which guarantees ||V - V*||_inf <= tol
/// because the operator is a gamma-contraction. Throws MaxItersExceeded
/// (carrying the last iterate and residual) if the cap is reached.
DiscountedSolution solve_dr_dmdp(const KernelView& kv,
                                 const UncertaintySetSpec& spec,
                                 const DiscountedSolveParams& params);

}  // namespace drmdp
