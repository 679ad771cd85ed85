// This file is part of drmdp, a solver library for distributionally robust
// Markov decision processes with discounted and average-reward objectives.
//
// SPDX-License-Identifier: MIT

#include "drmdp/bellman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "drmdp/errors.hpp"

namespace drmdp {

void DiscountedSolveParams::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("gamma must lie in (0, 1)");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  if (max_iters < 0) throw std::invalid_argument("max_iters must be >= 0");
}

long long DiscountedSolveParams::effective_max_iters() const {
  if (max_iters > 0) return max_iters;
  const double horizon = std::ceil(1.0 / (1.0 - gamma));
  const double digits = std::log10(1.0 / tol);
  return static_cast<long long>(200.0 * horizon * digits);
}

Vec optimal_operator(const KernelView& kv, const UncertaintySetSpec& spec,
                     double gamma, const Vec& V) {
  Vec out(kv.n_states);
  for (int s = 0; s < kv.n_states; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < kv.n_actions; ++a) {
      const double q =
          kv.r(s, a) +
          gamma * dual_value(spec, kv.row(s, a), V.data(),
                             kv.n_states);
      best = std::max(best, q);
    }
    out[s] = best;
  }
  return out;
}

Vec policy_operator(const KernelView& kv, const UncertaintySetSpec& spec,
                    double gamma, const Policy& policy, const Vec& V) {
  if (policy.size() != kv.n_states) {
    throw std::invalid_argument("policy size does not match the kernel");
  }
  Vec out(kv.n_states);
  for (int s = 0; s < kv.n_states; ++s) {
    const int a = policy(s);
    if (a < 0 || a >= kv.n_actions) {
      throw std::invalid_argument("policy action out of range");
    }
    out[s] = kv.r(s, a) +
             gamma * dual_value(spec, kv.row(s, a), V.data(), kv.n_states);
  }
  return out;
}

Policy greedy_policy(const KernelView& kv, const UncertaintySetSpec& spec,
                     double gamma, const Vec& V) {
  Policy pi;
  pi.action_of.assign(kv.n_states, 0);
  for (int s = 0; s < kv.n_states; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < kv.n_actions; ++a) {
      const double q =
          kv.r(s, a) +
          gamma * dual_value(spec, kv.row(s, a), V.data(), kv.n_states);
      if (q > best) {  // strict: ties keep the lowest action index
        best = q;
        pi.action_of[s] = a;
      }
    }
  }
  return pi;
}

DiscountedSolution solve_dr_dmdp(const KernelView& kv,
                                 const UncertaintySetSpec& spec,
                                 const DiscountedSolveParams& params) {
  params.validate();
  spec.validate();
  const double gamma = params.gamma;
  const double stop =
      params.tol * (1.0 - gamma) / (2.0 * gamma);
  const long long cap = params.effective_max_iters();

  Vec V(kv.n_states, 0.0);
  double residual = std::numeric_limits<double>::infinity();
  for (long long it = 1; it <= cap; ++it) {
    Vec next = optimal_operator(kv, spec, gamma, V);
    residual = 0.0;
    for (int s = 0; s < kv.n_states; ++s) {
      residual = std::max(residual, std::abs(next[s] - V[s]));
    }
    V.swap(next);
    if (residual <= stop) {
      DiscountedSolution sol;
      sol.values = std::move(V);
      sol.policy = greedy_policy(kv, spec, gamma, sol.values);
      sol.iterations = it;
      sol.residual = residual;
      return sol;
    }
  }
  throw MaxItersExceeded(
      "value iteration did not reach residual " + std::to_string(stop) +
          " within " + std::to_string(cap) + " sweeps",
      V, residual, cap);
}

}  // namespace drmdp
