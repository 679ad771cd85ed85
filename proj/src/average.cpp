// This file is part of drmdp, a solver library for distributionally robust
// Markov decision processes with discounted and average-reward objectives.
//
// SPDX-License-Identifier: MIT

#include "drmdp/average.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "drmdp/ergodicity.hpp"
#include "drmdp/errors.hpp"
#include "drmdp/model.hpp"

namespace drmdp {

namespace {

void require_sample_count(long long n) {
  if (n < 2) {
    throw std::invalid_argument(
        "average-reward solvers need n >= 2 samples per (s, a): n = 1 would "
        "put the derived discount / anchoring weight at the boundary");
  }
}

/// Anchored relative value iteration shared by anchored_amdp and
/// ground_truth_gain:
///   v_{t+1} = T(omega_t),  omega_{t+1} = v_{t+1} - v_{t+1}(s0) e,
/// where T(omega)(s) = max_a { r(s, a) + anchored_gamma(omega) }. Returns on
/// ||omega_{t+1} - omega_t||_inf <= tol with the converged offset v(s0) as
/// the gain.
AvgRewardSolution anchored_rvi(const KernelView& kv,
                               const UncertaintySetSpec& spec, double xi,
                               int anchor_state, double tol,
                               long long max_iters) {
  spec.validate();
  AnchorParams anchor{anchor_state, xi};
  anchor.validate(kv.n_states);
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");

  Vec omega(kv.n_states, 0.0);
  Vec v(kv.n_states, 0.0);
  double residual = std::numeric_limits<double>::infinity();
  for (long long it = 1; it <= max_iters; ++it) {
    double offset = 0.0;
    for (int s = 0; s < kv.n_states; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < kv.n_actions; ++a) {
        const double q = kv.r(s, a) + anchored_gamma(spec, kv.row(s, a),
                                                     kv.n_states, anchor,
                                                     omega);
        best = std::max(best, q);
      }
      v[s] = best;
    }
    offset = v[anchor_state];
    residual = 0.0;
    for (int s = 0; s < kv.n_states; ++s) {
      const double next = v[s] - offset;
      residual = std::max(residual, std::abs(next - omega[s]));
      omega[s] = next;
    }
    if (residual <= tol) {
      AvgRewardSolution sol;
      sol.gain = offset;
      sol.bias = omega;
      sol.method = Method::Anchored;
      sol.iterations = it;
      // Greedy extraction with lowest-index ties, from the converged
      // relative values.
      sol.policy.action_of.assign(kv.n_states, 0);
      for (int s = 0; s < kv.n_states; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < kv.n_actions; ++a) {
          const double q = kv.r(s, a) + anchored_gamma(spec, kv.row(s, a),
                                                       kv.n_states, anchor,
                                                       omega);
          if (q > best) {
            best = q;
            sol.policy.action_of[s] = a;
          }
        }
      }
      return sol;
    }
  }
  throw MaxItersExceeded(
      "anchored relative value iteration did not reach residual " +
          std::to_string(tol) + " within " + std::to_string(max_iters) +
          " sweeps",
      omega, residual, max_iters);
}

}  // namespace

std::string to_string(Method m) {
  return m == Method::Reduction ? "Reduction" : "Anchored";
}

Method method_from_string(const std::string& s) {
  if (s == "Reduction" || s == "reduction") return Method::Reduction;
  if (s == "Anchored" || s == "anchored") return Method::Anchored;
  throw std::invalid_argument("unknown method name: " + s);
}

void AnchorParams::validate(int n_states) const {
  if (anchor_state < 0 || anchor_state >= n_states) {
    throw std::invalid_argument("anchor state out of range");
  }
  if (!(xi > 0.0 && xi < 1.0)) {
    throw std::invalid_argument("anchoring weight xi must lie in (0, 1)");
  }
}

AvgRewardSolution reduce_to_dmdp(const KernelView& kv,
                                 const UncertaintySetSpec& spec, long long n,
                                 double tol) {
  require_sample_count(n);
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  DiscountedSolveParams params;
  params.gamma = 1.0 - 1.0 / sqrt_n;
  params.tol = tol;
  DiscountedSolution disc = solve_dr_dmdp(kv, spec, params);

  AvgRewardSolution sol;
  sol.method = Method::Reduction;
  sol.n = n;
  sol.iterations = disc.iterations;
  sol.policy = std::move(disc.policy);
  sol.bias.resize(disc.values.size());
  for (size_t s = 0; s < disc.values.size(); ++s) {
    sol.bias[s] = disc.values[s] / sqrt_n;
  }
  sol.gain = sol.bias[0];
  return sol;
}

AvgRewardSolution reduce_to_dmdp(const EmpiricalKernel& emp,
                                 const Vec& rewards,
                                 const UncertaintySetSpec& spec, long long n,
                                 double tol) {
  if (n != emp.n) {
    throw std::invalid_argument(
        "n must equal the sample count of the empirical kernel");
  }
  return reduce_to_dmdp(KernelView::of(emp, rewards), spec, n, tol);
}

double anchored_gamma(const UncertaintySetSpec& spec, const double* p_row,
                      int size, const AnchorParams& anchor, const Vec& v) {
  anchor.validate(size);
  return (1.0 - anchor.xi) * dual_value(spec, p_row, v.data(), size) +
         anchor.xi * v[anchor.anchor_state];
}

AvgRewardSolution anchored_amdp(const KernelView& kv,
                                const UncertaintySetSpec& spec, long long n,
                                int anchor_state, double tol,
                                long long max_iters) {
  require_sample_count(n);
  const double xi = 1.0 / std::sqrt(static_cast<double>(n));
  AvgRewardSolution sol =
      anchored_rvi(kv, spec, xi, anchor_state, tol, max_iters);
  sol.n = n;
  return sol;
}

AvgRewardSolution anchored_amdp(const EmpiricalKernel& emp, const Vec& rewards,
                                const UncertaintySetSpec& spec, long long n,
                                int anchor_state, double tol,
                                long long max_iters) {
  if (n != emp.n) {
    throw std::invalid_argument(
        "n must equal the sample count of the empirical kernel");
  }
  return anchored_amdp(KernelView::of(emp, rewards), spec, n, anchor_state,
                       tol, max_iters);
}

double ground_truth_gain(const MdpModel& model, const UncertaintySetSpec& spec,
                         double precision) {
  if (!(precision > 0.0 && precision < 1.0)) {
    throw std::invalid_argument("precision must lie in (0, 1)");
  }
  const AvgRewardSolution sol =
      anchored_rvi(KernelView::of(model), spec, precision, 0,
                   precision * 1e-2, 10000000);
  return sol.gain;
}

AdversarialPowerReport check_adversarial_power(const MdpModel& model,
                                               const UncertaintySetSpec& spec,
                                               long long m_max) {
  spec.validate();
  AdversarialPowerReport rep;
  const ModelMinorization mm = model_minorization_time(model, m_max);
  rep.m_vee = mm.m_vee;
  rep.p_min = min_support_probability(model);
  const double m2 = static_cast<double>(rep.m_vee) * rep.m_vee;
  const double denom =
      spec.divergence == Divergence::KL ? 8.0 : std::max(8.0, 4.0 * spec.k);
  rep.delta_max = rep.p_min / (denom * m2);
  rep.satisfied = spec.radius <= rep.delta_max;
  return rep;
}

}  // namespace drmdp
