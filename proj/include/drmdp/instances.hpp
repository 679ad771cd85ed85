// This file is part of drmdp, a solver library for distributionally robust
// Markov decision processes with discounted and average-reward objectives.
//
// SPDX-License-Identifier: MIT

#pragma once

#include "drmdp/types.hpp"

namespace drmdp {

/// Two-state benchmark family on which average-reward estimation is
/// statistically hardest for a given minorization time.
struct HardMdpParams {
  double p = 0.25;  // in (0, 0.5]
};

/// Dense random benchmark family: per (s, a) the row is |S| draws from
/// Normal(1, sigma) with sigma ~ Uniform[0, sigma_max], floored and
/// normalized; rewards ~ Uniform[0, 1].
struct RandomMdpParams {
  int n_states = 20;
  int n_actions = 30;
  RngSeed seed{1};
  double sigma_max = 100.0;
};

/// Builds the two-state, two-action instance: from state 0 every action moves
/// to state 1 with probability p (stays with 1 - p), and symmetrically from
/// state 1; rewards are 1 in state 0 and 0 in state 1 for both actions. Both
/// actions of a state induce identical rows, the stationary distribution is
/// (1/2, 1/2) and the nominal gain is 1/2; the minorization time is 1/(2p),
/// attained at horizon 1.
MdpModel hard_mdp(const HardMdpParams& params);

/// Builds the random dense instance. Negative or tiny raw draws are floored
/// at 1e-3 before normalization so every row keeps full support (the model is
/// uniformly ergodic). Bit-identical output for identical params.
MdpModel random_mdp(const RandomMdpParams& params);

/// Floor applied to raw Normal draws before normalization.
inline constexpr double kRandomMdpFloor = 1e-3;

}  // namespace drmdp
