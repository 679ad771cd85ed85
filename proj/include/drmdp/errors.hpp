// This file is part of drmdp, a solver library for distributionally robust
// Markov decision processes with discounted and average-reward objectives.
//
// SPDX-License-Identifier: MIT

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace drmdp {

/// A Markov kernel failed to exhibit the contraction / minorization structure
/// the caller required (power iteration did not converge, or no horizon with
/// positive Doeblin mass was found within the scan limit).
class NonErgodic : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// brute_force_gamma was asked to enumerate a simplex of dimension too large
/// for grid search (support size > 4).
class SupportTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver hit its iteration cap before meeting its stopping
/// rule. Carries the last iterate and the final residual so callers can
/// inspect or resume.
class MaxItersExceeded : public std::runtime_error {
 public:
  MaxItersExceeded(const std::string& what, std::vector<double> last_iterate,
                   double residual, long long iterations)
      : std::runtime_error(what),
        last_iterate(std::move(last_iterate)),
        residual(residual),
        iterations(iterations) {}

  std::vector<double> last_iterate;
  double residual = 0.0;
  long long iterations = 0;
};

/// Policy enumeration over |A|^|S| deterministic policies would exceed the
/// enumeration guard and no explicit policy list was supplied.
class TooManyPolicies : public std::runtime_error {
 public:
  TooManyPolicies(const std::string& what, double policy_count)
      : std::runtime_error(what), policy_count(policy_count) {}

  /// Number of deterministic policies (stored as double: it may overflow
  /// 64-bit integers for large models).
  double policy_count = 0.0;
};

/// A regression or estimate was requested with fewer usable data points than
/// the method needs.
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace drmdp
