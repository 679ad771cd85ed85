// This file is part of drmdp, a solver library for distributionally robust
// Markov decision processes with discounted and average-reward objectives.
//
// SPDX-License-Identifier: MIT

#pragma once

#include <vector>

#include "drmdp/types.hpp"

namespace drmdp {

/// Witness of a minorization K^m(s, .) >= p psi(.) for every s.
struct DoeblinCertificate {
  long long m = 0;
  double p = 0.0;  // minorization mass in [0, 1]; 0 means "no minorization
                   // at this horizon" (psi is then uniform by convention)
  Vec psi;
  double ratio = 0.0;  // m / p (infinity when p == 0)
};

struct MinorizationResult {
  double t_minorize = 0.0;          // min over scanned m of m / p(m)
  DoeblinCertificate best_cert;     // the attaining certificate
  long long m_star = 0;             // the attaining horizon
};

struct ErgodicityReport {
  double t_minorize = 0.0;
  DoeblinCertificate best_cert;
  long long t_mix = 0;
  long long m_star = 0;
};

struct ModelMinorization {
  double t_minorize = 0.0;      // max over policies of per-kernel t_minorize
  long long m_vee = 0;          // max over policies of the attaining horizon
  long long policies_evaluated = 0;
};

/// Best entrywise minorization of K^m: p(m) = sum_{s'} min_s K^m(s, s') with
/// psi proportional to the column minimums (this choice maximizes p at
/// horizon m). Returns a p = 0 certificate when all column minimums vanish.
DoeblinCertificate doeblin_at_horizon(const Matrix& K, long long m);

/// Minorization time: min over m in [1, m_max] of m / p(m), skipping p = 0
/// horizons. The scan stops early once m exceeds the best ratio found so far
/// (larger horizons cannot improve since p <= 1). Throws NonErgodic if
/// p(m) = 0 for every m <= m_max.
MinorizationResult minorization_time(const Matrix& K, long long m_max = 4096);

/// Mixing time: smallest m with max_s TV(K^m(s, .), rho) <= 1/4, where rho is
/// the stationary distribution and TV is half the l1 distance. Throws
/// NonErgodic if no such m <= m_max exists (or rho cannot be computed).
long long mixing_time(const Matrix& K, long long m_max = 4096);

/// Bundles minorization_time and mixing_time for one kernel.
ErgodicityReport ergodicity_report(const Matrix& K, long long m_max = 4096);

/// Worst-case minorization over deterministic policies: maximizes the
/// per-kernel t_minorize over all |A|^|S| policies (guard: at most 10^6
/// policies), or over a caller-supplied list for larger models. m_vee is the
/// maximum over policies of each policy's attaining horizon. Throws
/// TooManyPolicies (carrying the policy count) when the guard trips and no
/// list was supplied; propagates NonErgodic.
ModelMinorization model_minorization_time(
    const MdpModel& model, long long m_max = 4096,
    const std::vector<Policy>* policy_list = nullptr);

/// Span semi-norm: max(V) - min(V).
double span_norm(const Vec& V);

}  // namespace drmdp
