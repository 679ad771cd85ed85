// This file is part of drmdp, a solver library for distributionally robust
// Markov decision processes with discounted and average-reward objectives.
//
// SPDX-License-Identifier: MIT

#include "drmdp/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "drmdp/errors.hpp"

namespace drmdp {

namespace {

constexpr double kAlphaTol = 1e-10;   // bracket width tolerance on alpha
constexpr double kValueTol = 1e-12;   // tolerance on the dual value
constexpr double kSpanTol = 1e-12;    // below this V counts as constant
constexpr double kTinyAlpha = 1e-12;  // alpha -> 0 limit cutoff

/// Per-call view of the support of p: indices with p[i] > 0, the essential
/// infimum of V on that set, and the mass of the argmin set.
struct SupportView {
  std::vector<int> idx;     // states with p > 0
  double ess_inf = 0.0;     // min V over the support
  double ess_sup = 0.0;     // max V over the support
  double mean = 0.0;        // <p, V>
  double argmin_mass = 0.0; // total p-mass of the argmin set
  std::vector<int> argmin;  // support states attaining ess_inf (within ties)

  double span() const { return ess_sup - ess_inf; }
};

SupportView make_support_view(const double* p, const double* V, int size) {
  SupportView sv;
  sv.ess_inf = std::numeric_limits<double>::infinity();
  sv.ess_sup = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < size; ++i) {
    if (p[i] > 0.0) {
      sv.idx.push_back(i);
      sv.ess_inf = std::min(sv.ess_inf, V[i]);
      sv.ess_sup = std::max(sv.ess_sup, V[i]);
      sv.mean += p[i] * V[i];
    }
  }
  if (sv.idx.empty()) {
    throw std::invalid_argument("probability vector has empty support");
  }
  const double tie = kSpanTol * std::max(1.0, std::abs(sv.ess_inf));
  for (int i : sv.idx) {
    if (V[i] <= sv.ess_inf + tie) {
      sv.argmin.push_back(i);
      sv.argmin_mass += p[i];
    }
  }
  return sv;
}

/// Maximizes a concave function on [lo, hi] by golden-section search.
/// Stops when the bracket is narrower than the alpha tolerance (scaled by
/// the bracket magnitude so huge brackets still terminate) or the interior
/// values agree to the value tolerance. Returns the best abscissa found.
double golden_section_max(const std::function<double(double)>& f, double lo,
                          double hi) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  static const double inv_phi2 = (3.0 - std::sqrt(5.0)) / 2.0;
  double a = lo, b = hi;
  double x1 = a + inv_phi2 * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 400; ++it) {
    const double width_tol =
        std::max(kAlphaTol, 4.0 * std::numeric_limits<double>::epsilon() *
                                (std::abs(a) + std::abs(b)));
    if (b - a <= width_tol) break;
    if (std::abs(f1 - f2) <= kValueTol * std::max(1.0, std::abs(f1)) &&
        b - a <= 1e-6 * std::max(1.0, std::abs(b))) {
      break;
    }
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = a + inv_phi2 * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 >= f2 ? x1 : x2;
}

// ---------------------------------------------------------------------------
// KL machinery. All evaluations are shifted by the essential infimum:
// with W = V - ess_inf >= 0 the dual objective is
//   g(alpha) = -alpha delta + ess_inf - alpha log S(alpha),
//   S(alpha) = <p, e^{-W/alpha}>  in  [argmin_mass, 1],
// which avoids underflow for small alpha. Its derivative is
//   g'(alpha) = -delta + D_KL(q_alpha || p),
// where q_alpha is the exponential tilt, and D_KL(q_alpha || p) decreases
// monotonically from -log argmin_mass (alpha -> 0) to 0 (alpha -> inf).
// ---------------------------------------------------------------------------

struct KlEval {
  double log_s = 0.0;    // log S(alpha)
  double tilt_div = 0.0; // D_KL(q_alpha || p)
};

KlEval kl_eval(const SupportView& sv, const double* p, const double* V,
               double alpha) {
  KlEval e;
  if (alpha < kTinyAlpha) {
    e.log_s = std::log(sv.argmin_mass);
    e.tilt_div = -e.log_s;
    return e;
  }
  double s = 0.0;
  double qw = 0.0;  // <p e^{-W/alpha}, W>, unnormalized
  for (int i : sv.idx) {
    const double w = V[i] - sv.ess_inf;
    const double t = p[i] * std::exp(-w / alpha);
    s += t;
    qw += t * w;
  }
  e.log_s = std::log(s);
  e.tilt_div = -(qw / s) / alpha - e.log_s;
  return e;
}

double kl_objective(const SupportView& sv, const double* p, const double* V,
                    double delta, double alpha) {
  if (alpha < kTinyAlpha) return sv.ess_inf - alpha * delta;
  const KlEval e = kl_eval(sv, p, V, alpha);
  return -alpha * delta + sv.ess_inf - alpha * e.log_s;
}

/// Root of D_KL(q_alpha || p) = delta by bisection on [lo, hi], assuming
/// D(lo) > delta >= D(hi). The tilt divergence is monotone, so this is the
/// unique stationary point of the dual.
double kl_stationary_alpha(const SupportView& sv, const double* p,
                           const double* V, double delta, double lo,
                           double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double d = kl_eval(sv, p, V, mid).tilt_div;
    if (std::abs(d - delta) <= 1e-12 * std::max(1.0, delta)) return mid;
    if (d > delta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Vec kl_tilt(const SupportView& sv, const double* p, const double* V, int size,
            double alpha) {
  Vec q(size, 0.0);
  double s = 0.0;
  for (int i : sv.idx) {
    q[i] = p[i] * std::exp(-(V[i] - sv.ess_inf) / alpha);
    s += q[i];
  }
  for (int i : sv.idx) q[i] /= s;
  return q;
}

Vec conditional_on_argmin(const SupportView& sv, const double* p, int size) {
  Vec q(size, 0.0);
  for (int i : sv.argmin) q[i] = p[i] / sv.argmin_mass;
  return q;
}

// ---------------------------------------------------------------------------
// Cressie-Read machinery. The dual objective is
//   psi(alpha) = alpha - c_k(delta) B(alpha)^{1/k*},
//   B(alpha) = <p, (alpha - V)_+^{k*}>.
// Evaluations factor out M = alpha - ess_inf, the largest positive part, so
// the powers stay in [0, 1] and never overflow:
//   psi'(alpha) = 1 - c_k Bt^{1/k* - 1} At,  Bt = <p, u^{k*}>,
//   At = <p, u^{k*-1}>, u_i = (alpha - V_i)_+ / M.
// psi' decreases from 1 - c_k argmin_mass^{1/k*} (alpha -> ess_inf) to
// 1 - c_k < 0 (alpha -> inf), so the stationary point is bracketable.
// ---------------------------------------------------------------------------

double fk_objective(const SupportView& sv, const double* p, const double* V,
                    double ck, double k_star, double alpha) {
  const double m = alpha - sv.ess_inf;
  if (m <= 0.0) return alpha;  // all positive parts vanish
  double bt = 0.0;
  for (int i : sv.idx) {
    const double u = std::max(alpha - V[i], 0.0) / m;
    if (u > 0.0) bt += p[i] * std::pow(u, k_star);
  }
  return alpha - ck * m * std::pow(bt, 1.0 / k_star);
}

double fk_slope(const SupportView& sv, const double* p, const double* V,
                double ck, double k_star, double alpha) {
  const double m = alpha - sv.ess_inf;
  if (m <= 0.0) return 1.0;
  double bt = 0.0, at = 0.0;
  for (int i : sv.idx) {
    const double u = std::max(alpha - V[i], 0.0) / m;
    if (u > 0.0) {
      const double uk1 = std::pow(u, k_star - 1.0);
      at += p[i] * uk1;
      bt += p[i] * uk1 * u;
    }
  }
  return 1.0 - ck * std::pow(bt, 1.0 / k_star - 1.0) * at;
}

/// Expands the upper end of [lo, hi] by doubling the width until the dual
/// objective decreases between consecutive endpoints; concavity then places
/// the maximum inside the returned bracket.
double fk_expand_bracket(const SupportView& sv, const double* p,
                         const double* V, double ck, double k_star, double lo,
                         double hi) {
  double width = std::max(hi - lo, std::max(1.0, std::abs(lo)) * 1e-6);
  double f_prev = fk_objective(sv, p, V, ck, k_star, lo + width);
  for (int it = 0; it < 2000 && lo + width < 1e250; ++it) {
    const double f_next = fk_objective(sv, p, V, ck, k_star, lo + 2.0 * width);
    if (f_next < f_prev) break;
    width *= 2.0;
    f_prev = f_next;
  }
  return lo + 2.0 * width;
}

/// Root of psi'(alpha) = 0 by bisection, assuming psi'(lo) > 0 > psi'(hi).
double fk_stationary_alpha(const SupportView& sv, const double* p,
                           const double* V, double ck, double k_star,
                           double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double s = fk_slope(sv, p, V, ck, k_star, mid);
    if (std::abs(s) <= 1e-14) return mid;
    if (s > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Vec fk_reweight(const SupportView& sv, const double* p, const double* V,
                double k_star, int size, double alpha) {
  Vec q(size, 0.0);
  const double m = alpha - sv.ess_inf;
  double norm = 0.0;
  for (int i : sv.idx) {
    const double u = std::max(alpha - V[i], 0.0) / m;
    if (u > 0.0) {
      q[i] = p[i] * std::pow(u, k_star - 1.0);
      norm += q[i];
    }
  }
  for (int i : sv.idx) q[i] /= norm;
  return q;
}

}  // namespace

double UncertaintySetSpec::ck() const {
  return std::pow(1.0 + k * (k - 1.0) * radius, 1.0 / k);
}

void UncertaintySetSpec::validate() const {
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("uncertainty radius must be finite and >= 0");
  }
  if (divergence == Divergence::Fk && !(k > 1.0)) {
    throw std::invalid_argument("Cressie-Read exponent k must exceed 1");
  }
}

double kl_divergence(const double* q, const double* p, int size) {
  double d = 0.0;
  for (int i = 0; i < size; ++i) {
    if (q[i] > 0.0) {
      if (p[i] <= 0.0) return std::numeric_limits<double>::infinity();
      d += q[i] * std::log(q[i] / p[i]);
    }
  }
  return std::max(d, 0.0);
}

double fk_divergence(const double* q, const double* p, int size, double k) {
  double d = 0.0;
  for (int i = 0; i < size; ++i) {
    if (p[i] <= 0.0) {
      if (q[i] > 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    const double t = q[i] / p[i];
    d += p[i] * (std::pow(t, k) - k * t + k - 1.0);
  }
  return std::max(d / (k * (k - 1.0)), 0.0);
}

double kl_dual_value(const double* p, const double* V, int size,
                     double delta) {
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
  const SupportView sv = make_support_view(p, V, size);
  if (sv.span() < kSpanTol) return sv.ess_inf;
  if (delta == 0.0) return sv.mean;
  // Boundary regime: the ball already contains the conditional on the argmin
  // set, the supremum is the alpha -> 0 limit.
  if (-std::log(sv.argmin_mass) <= delta) return sv.ess_inf;

  const double hi = sv.span() / delta;
  const auto g = [&](double alpha) {
    return kl_objective(sv, p, V, delta, alpha);
  };
  double best_alpha = golden_section_max(g, 0.0, hi);
  double best = g(best_alpha);
  // Polish: the stationary point solves D_KL(q_alpha || p) = delta; a short
  // bisection recovers it to machine precision even when the curvature at
  // the optimum is too large for the bracket tolerance alone.
  double lo_b = kTinyAlpha;
  if (kl_eval(sv, p, V, lo_b).tilt_div > delta &&
      kl_eval(sv, p, V, hi).tilt_div <= delta) {
    const double star = kl_stationary_alpha(sv, p, V, delta, lo_b, hi);
    best = std::max(best, g(star));
  }
  return best;
}

double fk_dual_value(const double* p, const double* V, int size, double delta,
                     double k) {
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
  if (!(k > 1.0)) throw std::invalid_argument("k must exceed 1");
  const SupportView sv = make_support_view(p, V, size);
  if (sv.span() < kSpanTol) return sv.ess_inf;
  if (delta == 0.0) return sv.mean;
  const double k_star = k / (k - 1.0);
  const double ck = std::pow(1.0 + k * (k - 1.0) * delta, 1.0 / k);
  // Boundary regime: the slope already starts non-positive at the lower end.
  if (ck * std::pow(sv.argmin_mass, 1.0 / k_star) >= 1.0) return sv.ess_inf;

  const double lo = sv.ess_inf;
  const double hi = fk_expand_bracket(sv, p, V, ck, k_star, lo, sv.ess_sup);
  const auto psi = [&](double alpha) {
    return fk_objective(sv, p, V, ck, k_star, alpha);
  };
  double best_alpha = golden_section_max(psi, lo, hi);
  double best = psi(best_alpha);
  // Polish via the stationarity condition, as in the KL case.
  const double lo_b = lo + 1e-14 * std::max(1.0, sv.span());
  if (fk_slope(sv, p, V, ck, k_star, lo_b) > 0.0 &&
      fk_slope(sv, p, V, ck, k_star, hi) < 0.0) {
    const double star = fk_stationary_alpha(sv, p, V, ck, k_star, lo_b, hi);
    best = std::max(best, psi(star));
  }
  return best;
}

double dual_value(const UncertaintySetSpec& spec, const double* p,
                  const double* V, int size) {
  spec.validate();
  switch (spec.divergence) {
    case Divergence::KL:
      return kl_dual_value(p, V, size, spec.radius);
    case Divergence::Fk:
      return fk_dual_value(p, V, size, spec.radius, spec.k);
  }
  throw std::logic_error("unknown divergence");
}

DualSolution kl_worst_case(const double* p, const double* V, int size,
                           double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
  const SupportView sv = make_support_view(p, V, size);
  DualSolution sol;
  if (sv.span() < kSpanTol) {
    sol.value = sv.ess_inf;
    sol.multiplier = 0.0;
    sol.any_ball_member = true;
    sol.worst_case.assign(p, p + size);
    sol.achieved_divergence = 0.0;
    return sol;
  }
  const double w = sv.argmin_mass;
  if (-std::log(w) <= delta) {
    // The ball contains the conditional of p on the argmin set, which
    // attains the essential infimum exactly.
    sol.value = sv.ess_inf;
    sol.multiplier = 0.0;
    sol.worst_case = conditional_on_argmin(sv, p, size);
    sol.achieved_divergence = -std::log(w);
    return sol;
  }
  double lo = kTinyAlpha;
  double hi = sv.span() / delta;
  while (kl_eval(sv, p, V, lo).tilt_div <= delta && lo > 1e-300) lo *= 0.5;
  for (int it = 0; it < 200 && kl_eval(sv, p, V, hi).tilt_div > delta; ++it) {
    hi *= 2.0;
  }
  const double alpha = kl_stationary_alpha(sv, p, V, delta, lo, hi);
  sol.multiplier = alpha;
  sol.worst_case = kl_tilt(sv, p, V, size, alpha);
  sol.achieved_divergence =
      kl_divergence(sol.worst_case.data(), p, size);
  const KlEval e = kl_eval(sv, p, V, alpha);
  sol.value = -alpha * delta + sv.ess_inf - alpha * e.log_s;
  return sol;
}

DualSolution fk_worst_case(const double* p, const double* V, int size,
                           double delta, double k) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
  if (!(k > 1.0)) throw std::invalid_argument("k must exceed 1");
  const SupportView sv = make_support_view(p, V, size);
  DualSolution sol;
  if (sv.span() < kSpanTol) {
    sol.value = sv.ess_inf;
    sol.multiplier = sv.ess_inf;
    sol.any_ball_member = true;
    sol.worst_case.assign(p, p + size);
    sol.achieved_divergence = 0.0;
    return sol;
  }
  const double k_star = k / (k - 1.0);
  const double ck = std::pow(1.0 + k * (k - 1.0) * delta, 1.0 / k);
  const double w = sv.argmin_mass;
  if (ck * std::pow(w, 1.0 / k_star) >= 1.0) {
    // Boundary case: the multiplier sticks at the essential infimum and the
    // worst case is the conditional of p on the argmin set.
    sol.value = sv.ess_inf;
    sol.multiplier = sv.ess_inf;
    sol.worst_case = conditional_on_argmin(sv, p, size);
    sol.achieved_divergence =
        (std::pow(w, 1.0 - k) - 1.0) / (k * (k - 1.0));
    return sol;
  }
  const double lo = sv.ess_inf + 1e-14 * std::max(1.0, sv.span());
  double hi = sv.ess_sup;
  for (int it = 0; it < 2000 && fk_slope(sv, p, V, ck, k_star, hi) >= 0.0 &&
                   hi < 1e250;
       ++it) {
    hi = sv.ess_inf + 2.0 * (hi - sv.ess_inf);
  }
  const double alpha = fk_stationary_alpha(sv, p, V, ck, k_star, lo, hi);
  sol.multiplier = alpha;
  sol.worst_case = fk_reweight(sv, p, V, k_star, size, alpha);
  sol.achieved_divergence = fk_divergence(sol.worst_case.data(), p, size, k);
  sol.value = fk_objective(sv, p, V, ck, k_star, alpha);
  return sol;
}

double brute_force_gamma(const double* p, const double* V, int size,
                         const UncertaintySetSpec& spec, double grid_step) {
  spec.validate();
  if (!(grid_step > 0.0)) {
    throw std::invalid_argument("grid_step must be > 0");
  }
  const SupportView sv = make_support_view(p, V, size);
  const int m = static_cast<int>(sv.idx.size());
  if (m > 4) {
    throw SupportTooLarge("brute_force_gamma supports at most 4 states with "
                          "positive mass, got " +
                          std::to_string(m));
  }
  const long long n_cells = std::llround(1.0 / grid_step);
  if (n_cells < 1) throw std::invalid_argument("grid_step exceeds 1");

  const auto div_of = [&](const Vec& q) {
    return spec.divergence == Divergence::KL
               ? kl_divergence(q.data(), p, size)
               : fk_divergence(q.data(), p, size, spec.k);
  };

  // q = p is always feasible (divergence zero), which keeps the oracle exact
  // in the delta = 0 case where no other grid point may qualify.
  double best = sv.mean;
  Vec q(size, 0.0);
  // Recursive scan over compositions of n_cells into m parts.
  std::function<void(int, long long)> scan = [&](int pos, long long left) {
    if (pos == m - 1) {
      q[sv.idx[pos]] = static_cast<double>(left) / n_cells;
      if (div_of(q) <= spec.radius) {
        double val = 0.0;
        for (int i : sv.idx) val += q[i] * V[i];
        best = std::min(best, val);
      }
      return;
    }
    for (long long c = 0; c <= left; ++c) {
      q[sv.idx[pos]] = static_cast<double>(c) / n_cells;
      scan(pos + 1, left - c);
    }
  };
  scan(0, n_cells);
  return best;
}

double kl_dual_value(const Vec& p, const Vec& V, double delta) {
  return kl_dual_value(p.data(), V.data(), static_cast<int>(p.size()), delta);
}
double fk_dual_value(const Vec& p, const Vec& V, double delta, double k) {
  return fk_dual_value(p.data(), V.data(), static_cast<int>(p.size()), delta,
                       k);
}
DualSolution kl_worst_case(const Vec& p, const Vec& V, double delta) {
  return kl_worst_case(p.data(), V.data(), static_cast<int>(p.size()), delta);
}
DualSolution fk_worst_case(const Vec& p, const Vec& V, double delta,
                           double k) {
  return fk_worst_case(p.data(), V.data(), static_cast<int>(p.size()), delta,
                       k);
}
double brute_force_gamma(const Vec& p, const Vec& V,
                         const UncertaintySetSpec& spec, double grid_step) {
  return brute_force_gamma(p.data(), V.data(), static_cast<int>(p.size()),
                           spec, grid_step);
}

std::string to_string(Divergence d) {
  return d == Divergence::KL ? "kl" : "fk";
}

Divergence divergence_from_string(const std::string& s) {
  if (s == "kl" || s == "KL") return Divergence::KL;
  if (s == "fk" || s == "Fk" || s == "FK" || s == "cressie-read") {
    return Divergence::Fk;
  }
  throw std::invalid_argument("unknown divergence name: " + s);
}

}  // namespace drmdp
