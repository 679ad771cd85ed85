// This file is part of drmdp, a solver library for distributionally robust
// Markov decision processes with discounted and average-reward objectives.
//
// SPDX-License-Identifier: MIT

#pragma once

#include <cstdint>
#include <vector>

#include "drmdp/rng.hpp"

namespace drmdp {

using Vec = std::vector<double>;

/// Tolerance used when validating that probability rows sum to one.
inline constexpr double kRowSumTol = 1e-12;

/// Entries in [-1e-15, 0) are treated as floating-point roundoff and clamped
/// to zero (followed by renormalization); anything more negative is an error.
inline constexpr double kNegativeRoundoffTol = 1e-15;

/// Deterministic stationary policy: action_of[s] is the action in state s.
struct Policy {
  std::vector<int> action_of;

  int operator()(int s) const { return action_of[static_cast<size_t>(s)]; }
  int size() const { return static_cast<int>(action_of.size()); }
};

/// Dense row-major square matrix (used for policy-induced kernels and their
/// powers).
struct Matrix {
  int n = 0;
  Vec data;  // n * n entries, row-major

  Matrix() = default;
  explicit Matrix(int n_) : n(n_), data(static_cast<size_t>(n_) * n_, 0.0) {}

  double& at(int r, int c) { return data[static_cast<size_t>(r) * n + c]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * n + c]; }
  const double* row(int r) const { return data.data() + static_cast<size_t>(r) * n; }

  static Matrix identity(int n);
};

Matrix multiply(const Matrix& a, const Matrix& b);

/// Tabular MDP: rewards r(s, a) in [0, 1]; kernel(s, a, .) are probability
/// rows over states.
struct MdpModel {
  int n_states = 0;
  int n_actions = 0;
  Vec reward;  // [s * n_actions + a]
  Vec kernel;  // [(s * n_actions + a) * n_states + s']

  double r(int s, int a) const {
    return reward[static_cast<size_t>(s) * n_actions + a];
  }
  const double* row(int s, int a) const {
    return kernel.data() +
           (static_cast<size_t>(s) * n_actions + a) * n_states;
  }
  double* mutable_row(int s, int a) {
    return kernel.data() +
           (static_cast<size_t>(s) * n_actions + a) * n_states;
  }

  /// Enforces the type invariants (reward range, valid probability rows);
  /// clamps negative roundoff in kernel rows. Throws std::invalid_argument.
  void validate_and_sanitize();
};

/// Per-(s, a) empirical transition counts from n generative-model samples
/// each; probs are exactly counts / n.
struct EmpiricalKernel {
  int n_states = 0;
  int n_actions = 0;
  long long n = 0;
  std::vector<long long> counts;  // same layout as MdpModel::kernel
  Vec probs;                      // derived: counts / n

  const double* row(int s, int a) const {
    return probs.data() + (static_cast<size_t>(s) * n_actions + a) * n_states;
  }

  /// Recomputes probs from counts and checks that every row sums to n.
  void finalize();
};

/// Read-only (kernel rows, rewards) view: MdpModel and EmpiricalKernel plus a
/// reward table both present this surface to the Bellman solvers.
struct KernelView {
  int n_states = 0;
  int n_actions = 0;
  const double* probs = nullptr;    // [(s * n_actions + a) * n_states + s']
  const double* rewards = nullptr;  // [s * n_actions + a]

  static KernelView of(const MdpModel& m) {
    return {m.n_states, m.n_actions, m.kernel.data(), m.reward.data()};
  }
  static KernelView of(const EmpiricalKernel& e, const Vec& rewards) {
    return {e.n_states, e.n_actions, e.probs.data(), rewards.data()};
  }

  const double* row(int s, int a) const {
    return probs + (static_cast<size_t>(s) * n_actions + a) * n_states;
  }
  double r(int s, int a) const {
    return rewards[static_cast<size_t>(s) * n_actions + a];
  }
};

/// Clamps entries in [-1e-15, 0) to zero and renormalizes so the vector sums
/// to one. Throws std::invalid_argument if an entry is more negative than the
/// roundoff tolerance or the sum is off by more than kRowSumTol before
/// renormalization.
void sanitize_prob_vector(double* p, int size);
inline void sanitize_prob_vector(Vec& p) {
  sanitize_prob_vector(p.data(), static_cast<int>(p.size()));
}

/// Validates an already-sanitized probability vector (entries >= 0, sum
/// within kRowSumTol of one). Throws std::invalid_argument.
void validate_prob_vector(const double* p, int size);

}  // namespace drmdp
