// This file is part of drmdp, a solver library for distributionally robust
// Markov decision processes with discounted and average-reward objectives.
//
// SPDX-License-Identifier: MIT

#pragma once

#include "drmdp/types.hpp"

namespace drmdp {

/// Draws n i.i.d. next-states from kernel(s, a, .) for every (s, a) with a
/// generative model and returns the empirical counts/frequencies. Draws are
/// keyed by (seed, s, a), so the result is independent of evaluation order.
EmpiricalKernel sample_transitions(const MdpModel& model, long long n,
                                   RngSeed seed);

/// Kernel induced by a deterministic policy: row s is kernel(s, policy(s), .)
/// copied verbatim (no arithmetic).
Matrix induced_kernel(const MdpModel& model, const Policy& policy);

/// Stationary distribution by power iteration from the uniform distribution.
/// Returns rho with ||rho K - rho||_1 <= tol. Throws NonErgodic if the
/// iteration fails to contract within max_iters steps.
Vec stationary_distribution(const Matrix& kernel, double tol = 1e-12,
                            long long max_iters = 1000000);

/// Long-run average reward of a policy: <rho, r_pi> with rho the stationary
/// distribution of the induced kernel. Propagates NonErgodic.
double average_reward(const MdpModel& model, const Policy& policy);

/// Minimum over all (s, a, s') of the strictly positive kernel entries.
/// Requires at least one positive entry.
double min_support_probability(const MdpModel& model);

}  // namespace drmdp
