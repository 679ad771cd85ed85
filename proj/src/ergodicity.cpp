// This file is part of drmdp, a solver library for distributionally robust
// Markov decision processes with discounted and average-reward objectives.
//
// SPDX-License-Identifier: MIT

#include "drmdp/ergodicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "drmdp/errors.hpp"
#include "drmdp/model.hpp"

namespace drmdp {

namespace {

DoeblinCertificate certificate_from_power(const Matrix& km, long long m) {
  DoeblinCertificate cert;
  cert.m = m;
  const int n = km.n;
  Vec col_min(n, std::numeric_limits<double>::infinity());
  for (int s = 0; s < n; ++s) {
    const double* row = km.row(s);
    for (int j = 0; j < n; ++j) col_min[j] = std::min(col_min[j], row[j]);
  }
  double p = 0.0;
  for (int j = 0; j < n; ++j) p += col_min[j];
  cert.p = p;
  if (p > 0.0) {
    cert.psi = col_min;
    for (int j = 0; j < n; ++j) cert.psi[j] /= p;
    cert.ratio = static_cast<double>(m) / p;
  } else {
    cert.psi.assign(n, 1.0 / n);  // conventional placeholder
    cert.ratio = std::numeric_limits<double>::infinity();
  }
  return cert;
}

}  // namespace

DoeblinCertificate doeblin_at_horizon(const Matrix& K, long long m) {
  if (m < 1) throw std::invalid_argument("horizon m must be >= 1");
  // K^m by binary exponentiation.
  Matrix result = Matrix::identity(K.n);
  Matrix base = K;
  long long e = m;
  while (e > 0) {
    if (e & 1) result = multiply(result, base);
    e >>= 1;
    if (e > 0) base = multiply(base, base);
  }
  return certificate_from_power(result, m);
}

MinorizationResult minorization_time(const Matrix& K, long long m_max) {
  if (m_max < 1) throw std::invalid_argument("m_max must be >= 1");
  MinorizationResult res;
  res.t_minorize = std::numeric_limits<double>::infinity();
  Matrix power = K;
  bool found = false;
  for (long long m = 1; m <= m_max; ++m) {
    if (m > 1) power = multiply(power, K);
    DoeblinCertificate cert = certificate_from_power(power, m);
    if (cert.p > 0.0 && cert.ratio < res.t_minorize) {
      res.t_minorize = cert.ratio;
      res.best_cert = std::move(cert);
      res.m_star = m;
      found = true;
    }
    // m / p >= m because p <= 1, so horizons beyond the best ratio found so
    // far cannot improve it.
    if (found && static_cast<double>(m) >= res.t_minorize) break;
  }
  if (!found) {
    throw NonErgodic("no horizon m <= " + std::to_string(m_max) +
                     " has positive Doeblin mass");
  }
  return res;
}

long long mixing_time(const Matrix& K, long long m_max) {
  if (m_max < 1) throw std::invalid_argument("m_max must be >= 1");
  const Vec rho = stationary_distribution(K);
  const int n = K.n;
  Matrix power = K;
  for (long long m = 1; m <= m_max; ++m) {
    if (m > 1) power = multiply(power, K);
    double worst_tv = 0.0;
    for (int s = 0; s < n; ++s) {
      const double* row = power.row(s);
      double l1 = 0.0;
      for (int j = 0; j < n; ++j) l1 += std::abs(row[j] - rho[j]);
      worst_tv = std::max(worst_tv, 0.5 * l1);
    }
    if (worst_tv <= 0.25) return m;
  }
  throw NonErgodic("worst-row total variation did not drop to 1/4 within " +
                   std::to_string(m_max) + " steps");
}

ErgodicityReport ergodicity_report(const Matrix& K, long long m_max) {
  ErgodicityReport rep;
  MinorizationResult mr = minorization_time(K, m_max);
  rep.t_minorize = mr.t_minorize;
  rep.best_cert = std::move(mr.best_cert);
  rep.m_star = mr.m_star;
  rep.t_mix = mixing_time(K, m_max);
  return rep;
}

ModelMinorization model_minorization_time(
    const MdpModel& model, long long m_max,
    const std::vector<Policy>* policy_list) {
  ModelMinorization out;
  const auto eval_policy = [&](const Policy& pi) {
    const Matrix K = induced_kernel(model, pi);
    const MinorizationResult mr = minorization_time(K, m_max);
    out.t_minorize = std::max(out.t_minorize, mr.t_minorize);
    out.m_vee = std::max(out.m_vee, mr.m_star);
    ++out.policies_evaluated;
  };

  if (policy_list != nullptr) {
    if (policy_list->empty()) {
      throw std::invalid_argument("supplied policy list is empty");
    }
    for (const Policy& pi : *policy_list) eval_policy(pi);
    return out;
  }

  const double count =
      std::pow(static_cast<double>(model.n_actions), model.n_states);
  if (count > 1e6) {
    throw TooManyPolicies(
        "policy enumeration would visit " + std::to_string(count) +
            " deterministic policies (guard: 1e6); supply a policy list",
        count);
  }
  Policy pi;
  pi.action_of.assign(model.n_states, 0);
  // Odometer enumeration of all |A|^|S| deterministic policies.
  while (true) {
    eval_policy(pi);
    int s = 0;
    while (s < model.n_states && ++pi.action_of[s] == model.n_actions) {
      pi.action_of[s] = 0;
      ++s;
    }
    if (s == model.n_states) break;
  }
  return out;
}

double span_norm(const Vec& V) {
  if (V.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(V.begin(), V.end());
  return *hi - *lo;
}

}  // namespace drmdp
