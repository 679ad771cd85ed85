// This file is part of drmdp, a solver library for distributionally robust
// Markov decision processes with discounted and average-reward objectives.
//
// SPDX-License-Identifier: MIT

#include "drmdp/model.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "drmdp/errors.hpp"

namespace drmdp {

namespace {

std::string describe_entry(const char* what, int s, int a, double v) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s at state %d, action %d: %.17g", what, s,
                a, v);
  return buf;
}

}  // namespace

Matrix Matrix::identity(int n) {
  Matrix m(n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  Matrix c(a.n);
  for (int i = 0; i < a.n; ++i) {
    for (int k = 0; k < a.n; ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.row(k);
      double* crow = c.data.data() + static_cast<size_t>(i) * c.n;
      for (int j = 0; j < a.n; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

void sanitize_prob_vector(double* p, int size) {
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    if (p[i] < 0.0) {
      if (p[i] < -kNegativeRoundoffTol) {
        throw std::invalid_argument(
            "probability entry " + std::to_string(p[i]) +
            " is more negative than the roundoff tolerance");
      }
      p[i] = 0.0;  // clamp roundoff
    }
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > kRowSumTol) {
    throw std::invalid_argument("probability vector sums to " +
                                std::to_string(sum) + ", expected 1");
  }
  if (sum != 1.0 && sum > 0.0) {
    for (int i = 0; i < size; ++i) p[i] /= sum;
  }
}

void validate_prob_vector(const double* p, int size) {
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    if (p[i] < 0.0) {
      throw std::invalid_argument("negative probability entry " +
                                  std::to_string(p[i]));
    }
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > kRowSumTol) {
    throw std::invalid_argument("probability vector sums to " +
                                std::to_string(sum) + ", expected 1");
  }
}

void MdpModel::validate_and_sanitize() {
  if (n_states < 1 || n_actions < 1) {
    throw std::invalid_argument("MdpModel needs at least one state and one action");
  }
  if (reward.size() != static_cast<size_t>(n_states) * n_actions) {
    throw std::invalid_argument("MdpModel reward table has the wrong size");
  }
  if (kernel.size() != static_cast<size_t>(n_states) * n_actions * n_states) {
    throw std::invalid_argument("MdpModel kernel table has the wrong size");
  }
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      const double rv = r(s, a);
      if (!(rv >= 0.0 && rv <= 1.0)) {
        throw std::invalid_argument(
            describe_entry("reward outside [0, 1]", s, a, rv));
      }
      sanitize_prob_vector(mutable_row(s, a), n_states);
    }
  }
}

void EmpiricalKernel::finalize() {
  if (n < 1) throw std::invalid_argument("EmpiricalKernel needs n >= 1");
  const size_t rows = static_cast<size_t>(n_states) * n_actions;
  if (counts.size() != rows * n_states) {
    throw std::invalid_argument("EmpiricalKernel counts table has the wrong size");
  }
  probs.assign(counts.size(), 0.0);
  for (size_t row = 0; row < rows; ++row) {
    long long row_sum = 0;
    for (int j = 0; j < n_states; ++j) {
      const long long c = counts[row * n_states + j];
      if (c < 0) throw std::invalid_argument("negative empirical count");
      row_sum += c;
    }
    if (row_sum != n) {
      throw std::invalid_argument("empirical counts row sums to " +
                                  std::to_string(row_sum) + ", expected n = " +
                                  std::to_string(n));
    }
    for (int j = 0; j < n_states; ++j) {
      probs[row * n_states + j] =
          static_cast<double>(counts[row * n_states + j]) /
          static_cast<double>(n);
    }
  }
}

EmpiricalKernel sample_transitions(const MdpModel& model, long long n,
                                   RngSeed seed) {
  if (n < 1) throw std::invalid_argument("sample_transitions needs n >= 1");
  EmpiricalKernel e;
  e.n_states = model.n_states;
  e.n_actions = model.n_actions;
  e.n = n;
  e.counts.assign(
      static_cast<size_t>(model.n_states) * model.n_actions * model.n_states,
      0);
  for (int s = 0; s < model.n_states; ++s) {
    for (int a = 0; a < model.n_actions; ++a) {
      auto stream = rng::Stream::keyed(seed.seed, rng::kPurposeSampling,
                                       static_cast<std::uint64_t>(s),
                                       static_cast<std::uint64_t>(a));
      const double* row = model.row(s, a);
      long long* crow =
          e.counts.data() +
          (static_cast<size_t>(s) * model.n_actions + a) * model.n_states;
      for (long long i = 0; i < n; ++i) {
        ++crow[stream.categorical(row, model.n_states)];
      }
    }
  }
  e.finalize();
  return e;
}

Matrix induced_kernel(const MdpModel& model, const Policy& policy) {
  if (policy.size() != model.n_states) {
    throw std::invalid_argument("policy size does not match the model");
  }
  Matrix K(model.n_states);
  for (int s = 0; s < model.n_states; ++s) {
    const int a = policy(s);
    if (a < 0 || a >= model.n_actions) {
      throw std::invalid_argument("policy action out of range");
    }
    const double* row = model.row(s, a);
    for (int j = 0; j < model.n_states; ++j) K.at(s, j) = row[j];
  }
  return K;
}

Vec stationary_distribution(const Matrix& kernel, double tol,
                            long long max_iters) {
  const int n = kernel.n;
  if (n < 1) throw std::invalid_argument("empty kernel");
  Vec rho(n, 1.0 / n);
  Vec next(n);
  for (long long it = 0; it < max_iters; ++it) {
    // next = rho K
    for (int j = 0; j < n; ++j) next[j] = 0.0;
    for (int i = 0; i < n; ++i) {
      const double ri = rho[i];
      if (ri == 0.0) continue;
      const double* row = kernel.row(i);
      for (int j = 0; j < n; ++j) next[j] += ri * row[j];
    }
    // Clean roundoff so the iterate stays on the simplex.
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (next[j] < 0.0) next[j] = 0.0;
      sum += next[j];
    }
    for (int j = 0; j < n; ++j) next[j] /= sum;

    double res = 0.0;
    for (int j = 0; j < n; ++j) res += std::abs(next[j] - rho[j]);
    rho.swap(next);
    if (res <= tol) {
      // rho = previous * K; its own residual ||rho K - rho||_1 is what the
      // contract promises, so verify (and keep iterating if not yet there).
      for (int j = 0; j < n; ++j) next[j] = 0.0;
      for (int i = 0; i < n; ++i) {
        const double ri = rho[i];
        const double* row = kernel.row(i);
        for (int j = 0; j < n; ++j) next[j] += ri * row[j];
      }
      double fixed_res = 0.0;
      for (int j = 0; j < n; ++j) fixed_res += std::abs(next[j] - rho[j]);
      if (fixed_res <= tol) return rho;
    }
  }
  throw NonErgodic(
      "power iteration did not reach the requested stationary residual within "
      "the iteration cap");
}

double average_reward(const MdpModel& model, const Policy& policy) {
  const Matrix K = induced_kernel(model, policy);
  const Vec rho = stationary_distribution(K);
  double g = 0.0;
  for (int s = 0; s < model.n_states; ++s) {
    g += rho[s] * model.r(s, policy(s));
  }
  return g;
}

double min_support_probability(const MdpModel& model) {
  double best = 2.0;
  for (double v : model.kernel) {
    if (v > 0.0 && v < best) best = v;
  }
  if (best > 1.0) {
    throw std::invalid_argument("kernel has no positive entry");
  }
  return best;
}

}  // namespace drmdp
