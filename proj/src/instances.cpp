// This file is part of drmdp, a solver library for distributionally robust
// Markov decision processes with discounted and average-reward objectives.
//
// SPDX-License-Identifier: MIT

#include "drmdp/instances.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "drmdp/rng.hpp"

namespace drmdp {

MdpModel hard_mdp(const HardMdpParams& params) {
  if (!(params.p > 0.0 && params.p <= 0.5)) {
    throw std::invalid_argument("hard_mdp needs p in (0, 0.5]");
  }
  MdpModel m;
  m.n_states = 2;
  m.n_actions = 2;
  m.reward = {1.0, 1.0,   // state 0: both actions pay 1
              0.0, 0.0};  // state 1: both actions pay 0
  m.kernel.assign(static_cast<size_t>(2) * 2 * 2, 0.0);
  // Both actions share the same row: stay with probability 1 - p, switch
  // with probability p. The two-point symmetric chain mixes slowly as p -> 0.
  for (int s = 0; s < 2; ++s) {
    for (int a = 0; a < 2; ++a) {
      double* row = m.mutable_row(s, a);
      row[s] = 1.0 - params.p;
      row[1 - s] = params.p;
    }
  }
  m.validate_and_sanitize();
  return m;
}

MdpModel random_mdp(const RandomMdpParams& params) {
  if (params.n_states < 1 || params.n_actions < 1) {
    throw std::invalid_argument("random_mdp needs at least one state and action");
  }
  if (!(params.sigma_max >= 0.0)) {
    throw std::invalid_argument("random_mdp needs sigma_max >= 0");
  }
  MdpModel m;
  m.n_states = params.n_states;
  m.n_actions = params.n_actions;
  m.reward.assign(static_cast<size_t>(m.n_states) * m.n_actions, 0.0);
  m.kernel.assign(
      static_cast<size_t>(m.n_states) * m.n_actions * m.n_states, 0.0);

  for (int s = 0; s < m.n_states; ++s) {
    for (int a = 0; a < m.n_actions; ++a) {
      auto stream = rng::Stream::keyed(params.seed.seed, rng::kPurposeInstance,
                                       static_cast<std::uint64_t>(s),
                                       static_cast<std::uint64_t>(a));
      m.reward[static_cast<size_t>(s) * m.n_actions + a] = stream.next_unit();
      const double sigma = stream.uniform(0.0, params.sigma_max);
      double* row = m.mutable_row(s, a);
      // Draw raw weights, clamp to the floor, and normalize. The floor keeps
      // every transition probability positive so the chain is uniformly
      // ergodic and the minimum support probability is bounded below.
      double sum = 0.0;
      for (int j = 0; j < m.n_states; ++j) {
        const double w = std::max(stream.normal(1.0, sigma), kRandomMdpFloor);
        row[j] = w;
        sum += w;
      }
      for (int j = 0; j < m.n_states; ++j) row[j] /= sum;
    }
  }
  m.validate_and_sanitize();
  return m;
}

}  // namespace drmdp
