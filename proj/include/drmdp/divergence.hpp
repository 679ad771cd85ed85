// This file is part of drmdp, a solver library for distributionally robust
// Markov decision processes with discounted and average-reward objectives.
//
// SPDX-License-Identifier: MIT

#pragma once

#include <string>

#include "drmdp/types.hpp"

namespace drmdp {

enum class Divergence { KL, Fk };

/// One per-(s, a) ambiguity ball: all probability rows q with
/// D(q || p) <= radius, where D is either the Kullback-Leibler divergence or
/// the Cressie-Read divergence of exponent k (k = 2 is chi-square).
struct UncertaintySetSpec {
  Divergence divergence = Divergence::KL;
  double radius = 0.0;  // delta >= 0
  double k = 2.0;       // Cressie-Read exponent, used iff divergence == Fk

  /// Conjugate exponent k* = k / (k - 1).
  double k_star() const { return k / (k - 1.0); }
  /// Dual scaling constant c_k(delta) = (1 + k (k-1) delta)^(1/k); equals 1
  /// at delta = 0 and is strictly greater than 1 for delta > 0.
  double ck() const;

  /// Throws std::invalid_argument if radius < 0, or divergence == Fk with
  /// k <= 1.
  void validate() const;
};

/// Result of one robust-expectation evaluation on a (p, V, ball) triple.
struct DualSolution {
  /// The robust expectation: inf <q, V> over the ball.
  double value = 0.0;
  /// Optimal dual multiplier (alpha* >= 0 for KL; a real for Cressie-Read).
  double multiplier = 0.0;
  /// True in the degenerate constant-V case where every ball member attains
  /// the infimum; worst_case is then the center p itself.
  bool any_ball_member = false;
  /// Worst-case measure. Absolutely continuous w.r.t. the center p: entries
  /// outside supp(p) are exactly zero.
  Vec worst_case;
  /// Divergence of worst_case from p (0 when any_ball_member).
  double achieved_divergence = 0.0;
};

/// D_KL(q || p) over the support of p; q must vanish outside supp(p).
double kl_divergence(const double* q, const double* p, int size);

/// Cressie-Read divergence sum p_i f_k(q_i / p_i) over supp(p), with
/// f_k(t) = (t^k - k t + k - 1) / (k (k - 1)).
double fk_divergence(const double* q, const double* p, int size, double k);

/// Robust expectation under a KL ball via the one-dimensional concave dual
///   sup_{alpha >= 0} { -alpha delta - alpha log <p, e^{-V/alpha}> },
/// maximized by golden-section search over the sufficient bracket
/// [0, span(V)/delta]. The value lies in [ess-inf_p V, <p, V>].
double kl_dual_value(const double* p, const double* V, int size, double delta);

/// Robust expectation under a Cressie-Read ball via the concave dual
///   sup_alpha { alpha - c_k(delta) <p, (alpha - V)_+^{k*}>^{1/k*} },
/// maximized by golden-section search after doubling expansion of the upper
/// bracket end (termination guaranteed because c_k(delta) > 1 for delta > 0).
double fk_dual_value(const double* p, const double* V, int size, double delta,
                     double k);

/// Dispatch on spec.divergence.
double dual_value(const UncertaintySetSpec& spec, const double* p,
                  const double* V, int size);
inline double dual_value(const UncertaintySetSpec& spec, const Vec& p,
                         const Vec& V) {
  return dual_value(spec, p.data(), V.data(), static_cast<int>(p.size()));
}

/// Worst-case measure of the KL ball (delta > 0 required). If V is constant
/// on supp(p) the result is flagged any_ball_member with multiplier 0.
/// Otherwise, when the stationary point exists, the worst case is the
/// exponential tilt p(.) e^{-V(.)/alpha*} normalized, with achieved
/// divergence exactly delta (alpha* found by root-finding on the first-order
/// condition D_KL(q_alpha || p) = delta). When delta is so large that the
/// ball contains the conditional of p on the argmin set of V, that
/// conditional is returned (multiplier 0, achieved divergence <= delta).
DualSolution kl_worst_case(const double* p, const double* V, int size,
                           double delta);

/// Worst-case measure of the Cressie-Read ball (delta > 0, k > 1 required).
/// Interior case: p* proportional to p . (alpha* - V)_+^{k*-1}, where
/// alpha* > ess-inf_p V solves the stationarity condition
/// c_k(delta) = <p,(alpha*-V)_+^{k*}>^{1-1/k*} / <p,(alpha*-V)_+^{k*-1}>.
/// Boundary case (the ball contains it): the conditional of p on the argmin
/// set of V, with achieved divergence <= delta.
DualSolution fk_worst_case(const double* p, const double* V, int size,
                           double delta, double k);

/// Brute-force grid oracle for the primal inf <q, V> over the ball: scans
/// all simplex grid points (step grid_step) supported on supp(p) that lie in
/// the ball, plus q = p itself. Error is at most
/// Lipschitz(V) * grid_step * support (Lipschitz(V) = max |V| over supp(p)).
/// Cost grows as grid^(support-1); throws SupportTooLarge if supp(p) > 4.
double brute_force_gamma(const double* p, const double* V, int size,
                         const UncertaintySetSpec& spec, double grid_step);

// Vec convenience overloads (also used by the python bindings).
double kl_dual_value(const Vec& p, const Vec& V, double delta);
double fk_dual_value(const Vec& p, const Vec& V, double delta, double k);
DualSolution kl_worst_case(const Vec& p, const Vec& V, double delta);
DualSolution fk_worst_case(const Vec& p, const Vec& V, double delta, double k);
double brute_force_gamma(const Vec& p, const Vec& V,
                         const UncertaintySetSpec& spec, double grid_step);

std::string to_string(Divergence d);
Divergence divergence_from_string(const std::string& s);

}  // namespace drmdp
