// This file is part of drmdp, a solver library for distributionally robust
// Markov decision processes with discounted and average-reward objectives.
//
// SPDX-License-Identifier: MIT

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <limits>
#include <vector>

#include "drmdp/bellman.hpp"
#include "drmdp/divergence.hpp"
#include "drmdp/errors.hpp"
#include "drmdp/instances.hpp"
#include "drmdp/rng.hpp"
#include "drmdp/types.hpp"

using namespace drmdp;

namespace {

/// One Bellman sweep written out the slow way, with the per-ball robust
/// expectation taken from the primal grid oracle instead of the dual.
Vec slow_operator(const MdpModel& m, const UncertaintySetSpec& spec,
                  double gamma, const Vec& v, double grid_step) {
    Vec out(static_cast<std::size_t>(m.n_states));
    for (int s = 0; s < m.n_states; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < m.n_actions; ++a) {
            Vec p(m.row(s, a), m.row(s, a) + m.n_states);
            const double inner = brute_force_gamma(p, v, spec, grid_step);
            best = std::max(best, m.r(s, a) + gamma * inner);
        }
        out[static_cast<std::size_t>(s)] = best;
    }
    return out;
}

double linf(const Vec& a, const Vec& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

TEST_CASE("solve params validation and default cap") {
    DiscountedSolveParams p;
    p.gamma = 0.9;
    p.tol = 1e-10;
    CHECK_NOTHROW(p.validate());
    // Default cap is 200 * ceil(1/(1-gamma)) * log10(1/tol), up to floating
    // point in the ceil/log10 terms.
    CHECK(p.effective_max_iters() >= 200LL * 10LL * 9LL);
    CHECK(p.effective_max_iters() <= 200LL * 11LL * 10LL);

    p.gamma = 0.99;
    p.tol = 1e-6;
    CHECK(p.effective_max_iters() >= 200LL * 100LL * 5LL);
    CHECK(p.effective_max_iters() <= 200LL * 101LL * 6LL);

    p.max_iters = 1234;
    CHECK(p.effective_max_iters() == 1234);

    DiscountedSolveParams bad;
    bad.gamma = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.gamma = 0.9;
    bad.tol = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("non-robust operator on the hard instance") {
    MdpModel m = hard_mdp({0.25});
    KernelView kv = KernelView::of(m);
    UncertaintySetSpec spec{Divergence::KL, 0.0, 2.0};
    Vec zero = {0.0, 0.0};
    Vec t = optimal_operator(kv, spec, 0.9, zero);
    // T(0)(s) = max_a r(s, a): rewards are 1 in state 0 and 0 in state 1.
    CHECK(t[0] == doctest::Approx(1.0));
    CHECK(t[1] == doctest::Approx(0.0));
}

TEST_CASE("operator on constant values adds the discounted constant") {
    MdpModel m = random_mdp({4, 3, {9}, 2.0});
    KernelView kv = KernelView::of(m);
    for (auto divergence : {Divergence::KL, Divergence::Fk}) {
        UncertaintySetSpec spec{divergence, 0.12, 2.0};
        Vec c(4, 0.6);
        Vec t = optimal_operator(kv, spec, 0.95, c);
        for (int s = 0; s < 4; ++s) {
            double best = 0.0;
            for (int a = 0; a < 3; ++a) best = std::max(best, m.r(s, a));
            CHECK(t[static_cast<std::size_t>(s)] ==
                  doctest::Approx(best + 0.95 * 0.6).epsilon(1e-12));
        }
    }
}

TEST_CASE("operator matches the grid-oracle sweep") {
    MdpModel m = random_mdp({3, 2, {14}, 3.0});
    KernelView kv = KernelView::of(m);
    UncertaintySetSpec spec{Divergence::KL, 0.05, 2.0};
    rng::Stream st = rng::Stream::keyed(100, rng::kPurposeTesting, 0, 0);
    Vec v = {st.next_unit(), st.next_unit(), st.next_unit()};
    Vec fast = optimal_operator(kv, spec, 0.9, v);
    Vec slow = slow_operator(m, spec, 0.9, v, 2e-4);
    CHECK(linf(fast, slow) <= 1e-3);

    UncertaintySetSpec fk{Divergence::Fk, 0.05, 2.0};
    Vec fast2 = optimal_operator(kv, fk, 0.9, v);
    Vec slow2 = slow_operator(m, fk, 0.9, v, 2e-4);
    CHECK(linf(fast2, slow2) <= 1e-3);
}

TEST_CASE("policy operator and greedy policy are consistent") {
    MdpModel m = random_mdp({4, 3, {33}, 2.0});
    KernelView kv = KernelView::of(m);
    UncertaintySetSpec spec{Divergence::Fk, 0.08, 2.5};
    rng::Stream st = rng::Stream::keyed(101, rng::kPurposeTesting, 0, 0);
    Vec v(4);
    for (auto& x : v) x = 2.0 * st.next_unit();
    Policy g = greedy_policy(kv, spec, 0.9, v);
    Vec tv = optimal_operator(kv, spec, 0.9, v);
    Vec pv = policy_operator(kv, spec, 0.9, g, v);
    CHECK(linf(tv, pv) <= 1e-12);  // greedy achieves the max
    // And no other policy beats it.
    for (int a = 0; a < 3; ++a) {
        Policy fixed;
        fixed.action_of = {a, a, a, a};
        Vec fv = policy_operator(kv, spec, 0.9, fixed, v);
        for (int s = 0; s < 4; ++s) {
            CHECK(fv[static_cast<std::size_t>(s)] <=
                  tv[static_cast<std::size_t>(s)] + 1e-12);
        }
    }
}

TEST_CASE("greedy tie-breaking picks the lowest action index") {
    // Two identical actions everywhere: ties must resolve to action 0.
    MdpModel m = hard_mdp({0.3});
    KernelView kv = KernelView::of(m);
    UncertaintySetSpec spec{Divergence::KL, 0.02, 2.0};
    Policy g = greedy_policy(kv, spec, 0.9, {0.4, 0.2});
    CHECK(g.action_of[0] == 0);
    CHECK(g.action_of[1] == 0);
}

TEST_CASE("golden fixed point: non-robust hard instance at gamma 0.9") {
    // V*(0) = 1 + 0.9 (0.75 V*(0) + 0.25 V*(1)), V*(1) = 0.9 (0.25 V*(0) +
    // 0.75 V*(1)) has the solution V* = (65/11, 45/11).
    MdpModel m = hard_mdp({0.25});
    DiscountedSolveParams params;
    params.gamma = 0.9;
    params.tol = 1e-10;
    UncertaintySetSpec spec{Divergence::KL, 0.0, 2.0};
    DiscountedSolution sol = solve_dr_dmdp(KernelView::of(m), spec, params);
    CHECK(sol.values[0] == doctest::Approx(65.0 / 11.0).epsilon(1e-10));
    CHECK(sol.values[1] == doctest::Approx(45.0 / 11.0).epsilon(1e-10));
    CHECK(sol.values[0] == doctest::Approx(5.9091).epsilon(1e-4));
    CHECK(sol.values[1] == doctest::Approx(4.0909).epsilon(1e-4));
    CHECK(sol.residual <= params.tol * (1.0 - 0.9) / (2.0 * 0.9));
    CHECK(sol.iterations > 0);
}

TEST_CASE("constant rewards solve to c / (1 - gamma) for any ball") {
    MdpModel m = hard_mdp({0.25});
    for (double& r : m.reward) r = 0.3;
    for (auto divergence : {Divergence::KL, Divergence::Fk}) {
        UncertaintySetSpec spec{divergence, 0.2, 2.0};
        DiscountedSolveParams params;
        params.gamma = 0.8;
        params.tol = 1e-9;
        DiscountedSolution sol = solve_dr_dmdp(KernelView::of(m), spec, params);
        CHECK(std::abs(sol.values[0] - 0.3 / 0.2) <= 1e-9);
        CHECK(std::abs(sol.values[1] - 0.3 / 0.2) <= 1e-9);
    }
}

TEST_CASE("solution is a fixed point and the policy is optimal") {
    MdpModel m = random_mdp({3, 2, {55}, 4.0});
    KernelView kv = KernelView::of(m);
    UncertaintySetSpec spec{Divergence::KL, 0.05, 2.0};
    DiscountedSolveParams params;
    params.gamma = 0.85;
    params.tol = 1e-9;
    DiscountedSolution sol = solve_dr_dmdp(kv, spec, params);

    // Fixed point within tolerance.
    Vec t = optimal_operator(kv, spec, params.gamma, sol.values);
    CHECK(linf(t, sol.values) <= 2.0 * params.tol);

    // Policy enumeration oracle: evaluate all 4 deterministic policies by
    // iterating the policy operator to convergence; none beats the solution.
    for (int a0 = 0; a0 < 2; ++a0) {
        for (int a1 = 0; a1 < 2; ++a1) {
            for (int a2 = 0; a2 < 2; ++a2) {
                Policy pi;
                pi.action_of = {a0, a1, a2};
                Vec v(3, 0.0);
                for (int it = 0; it < 4000; ++it) {
                    Vec next = policy_operator(kv, spec, params.gamma, pi, v);
                    if (linf(next, v) <= 1e-12) {
                        v = next;
                        break;
                    }
                    v = next;
                }
                for (int s = 0; s < 3; ++s) {
                    CHECK(v[static_cast<std::size_t>(s)] <=
                          sol.values[static_cast<std::size_t>(s)] + 1e-6);
                }
            }
        }
    }

    // The returned greedy policy re-evaluates to the optimal values within
    // 2 tol / (1 - gamma).
    Vec v(3, 0.0);
    for (int it = 0; it < 20000; ++it) {
        Vec next = policy_operator(kv, spec, params.gamma, sol.policy, v);
        if (linf(next, v) <= 1e-13) {
            v = next;
            break;
        }
        v = next;
    }
    CHECK(linf(v, sol.values) <= 2.0 * params.tol / (1.0 - params.gamma));
}

TEST_CASE("robustness ordering in the radius") {
    MdpModel m = random_mdp({3, 2, {71}, 3.0});
    KernelView kv = KernelView::of(m);
    DiscountedSolveParams params;
    params.gamma = 0.9;
    params.tol = 1e-9;
    Vec prev;
    for (double delta : {0.0, 0.02, 0.1, 0.5}) {
        UncertaintySetSpec spec{Divergence::KL, delta, 2.0};
        DiscountedSolution sol = solve_dr_dmdp(kv, spec, params);
        if (!prev.empty()) {
            for (int s = 0; s < 3; ++s) {
                CHECK(sol.values[static_cast<std::size_t>(s)] <=
                      prev[static_cast<std::size_t>(s)] + 1e-8);
            }
        }
        prev = sol.values;
    }
}

TEST_CASE("iteration cap raises MaxItersExceeded with the last iterate") {
    MdpModel m = hard_mdp({0.25});
    DiscountedSolveParams params;
    params.gamma = 0.999;
    params.tol = 1e-12;
    params.max_iters = 5;
    UncertaintySetSpec spec{Divergence::KL, 0.01, 2.0};
    CHECK_THROWS_AS(solve_dr_dmdp(KernelView::of(m), spec, params), MaxItersExceeded);
    try {
        solve_dr_dmdp(KernelView::of(m), spec, params);
    } catch (const MaxItersExceeded& e) {
        CHECK(e.iterations == 5);
        CHECK(e.last_iterate.size() == 2);
        CHECK(e.residual > 0.0);
        // Five sweeps of the non-negative reward recursion from zero.
        CHECK(e.last_iterate[0] > 0.0);
    }
}
