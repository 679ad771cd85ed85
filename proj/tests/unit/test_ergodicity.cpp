// This file is part of drmdp, a solver library for distributionally robust
// Markov decision processes with discounted and average-reward objectives.
//
// SPDX-License-Identifier: MIT

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "drmdp/ergodicity.hpp"
#include "drmdp/errors.hpp"
#include "drmdp/instances.hpp"
#include "drmdp/model.hpp"
#include "drmdp/rng.hpp"
#include "drmdp/types.hpp"

using namespace drmdp;

namespace {

Matrix hard_kernel(double p) {
    MdpModel m = hard_mdp({p});
    Policy pi;
    pi.action_of = {0, 0};
    return induced_kernel(m, pi);
}

Matrix random_ergodic_kernel(std::uint64_t seed, int n) {
    MdpModel m = random_mdp({n, 1, {seed}, 5.0});
    Policy pi;
    pi.action_of = std::vector<int>(static_cast<std::size_t>(n), 0);
    return induced_kernel(m, pi);
}

/// Exhaustive oracle: best m/p(m) over m in [1, m_max] via repeated
/// multiplication, no early stopping.
double oracle_t_minorize(const Matrix& k, long long m_max) {
    Matrix power = Matrix::identity(k.n);
    double best = std::numeric_limits<double>::infinity();
    for (long long m = 1; m <= m_max; ++m) {
        power = multiply(power, k);
        double p = 0.0;
        for (int j = 0; j < k.n; ++j) {
            double col_min = 1.0;
            for (int i = 0; i < k.n; ++i) col_min = std::min(col_min, power.at(i, j));
            p += col_min;
        }
        if (p > 0.0) best = std::min(best, static_cast<double>(m) / p);
    }
    return best;
}

}  // namespace

TEST_CASE("rank-one kernel minorizes at horizon one with full mass") {
    // Both rows identical: K(s, .) = nu for all s, so p(1) = 1.
    Matrix k;
    k.n = 2;
    k.data = {0.3, 0.7, 0.3, 0.7};
    DoeblinCertificate cert = doeblin_at_horizon(k, 1);
    CHECK(cert.p == doctest::Approx(1.0));
    CHECK(cert.psi[0] == doctest::Approx(0.3));
    CHECK(cert.psi[1] == doctest::Approx(0.7));
    MinorizationResult res = minorization_time(k);
    CHECK(res.t_minorize == doctest::Approx(1.0));
    CHECK(res.m_star == 1);
}

TEST_CASE("hard instance minorization closed form") {
    // p(1) = 2 min(p, 1-p) = 2p for p <= 1/2, so t_minorize = 1/(2p) at m = 1.
    for (double p : {0.05, 0.1, 0.25, 0.5}) {
        Matrix k = hard_kernel(p);
        MinorizationResult res = minorization_time(k);
        CHECK(res.t_minorize == doctest::Approx(1.0 / (2.0 * p)).epsilon(1e-12));
        CHECK(res.m_star == 1);
        CHECK(res.best_cert.p == doctest::Approx(2.0 * p));
        // psi is uniform by symmetry.
        CHECK(res.best_cert.psi[0] == doctest::Approx(0.5));
        CHECK(res.best_cert.psi[1] == doctest::Approx(0.5));
    }
}

TEST_CASE("doeblin certificate is entrywise valid") {
    Matrix k = random_ergodic_kernel(3, 5);
    for (long long m : {1, 2, 5}) {
        DoeblinCertificate cert = doeblin_at_horizon(k, m);
        REQUIRE(cert.p > 0.0);
        Matrix power = Matrix::identity(5);
        for (long long i = 0; i < m; ++i) power = multiply(power, k);
        for (int s = 0; s < 5; ++s) {
            for (int sp = 0; sp < 5; ++sp) {
                CHECK(power.at(s, sp) >= cert.p * cert.psi[sp] - 1e-12);
            }
        }
        double psi_sum = 0.0;
        for (double x : cert.psi) psi_sum += x;
        CHECK(psi_sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("permutation kernel is not minorizable") {
    Matrix k;
    k.n = 2;
    k.data = {0.0, 1.0, 1.0, 0.0};
    DoeblinCertificate cert = doeblin_at_horizon(k, 3);
    CHECK(cert.p == 0.0);
    CHECK_THROWS_AS(minorization_time(k, 64), NonErgodic);
    CHECK_THROWS_AS(mixing_time(k, 64), NonErgodic);
}

TEST_CASE("minorization matches the exhaustive oracle on random kernels") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        Matrix k = random_ergodic_kernel(seed, 4);
        MinorizationResult res = minorization_time(k, 256);
        CHECK(res.t_minorize == doctest::Approx(oracle_t_minorize(k, 256)).epsilon(1e-12));
    }
}

TEST_CASE("slowly mixing kernel needs a long horizon") {
    // Sticky two-state chain: leaves each state with probability 0.01.
    Matrix k;
    k.n = 2;
    k.data = {0.99, 0.01, 0.01, 0.99};
    MinorizationResult res = minorization_time(k);
    // p(m) = 1 - (1 - 0.02)^m(ish); optimal ratio m/p(m) is near 1/0.02 = 50
    // for small m. Exhaustive oracle is authoritative.
    CHECK(res.t_minorize == doctest::Approx(oracle_t_minorize(k, 4096)).epsilon(1e-12));
    CHECK(res.t_minorize == doctest::Approx(1.0 / 0.02).epsilon(0.02));
}

TEST_CASE("mixing time on the hard instance") {
    // Row TV distance to (1/2, 1/2) after m steps is |1-2p|^m / 2.
    for (double p : {0.25, 0.1}) {
        Matrix k = hard_kernel(p);
        const long long got = mixing_time(k);
        long long expect = 1;
        double gap = std::abs(1.0 - 2.0 * p);
        double tv = gap / 2.0;
        while (tv > 0.25) {
            tv *= gap;
            ++expect;
        }
        CHECK(got == expect);
    }
}

TEST_CASE("minorization-mixing inequality on random ergodic kernels") {
    for (std::uint64_t seed = 10; seed < 18; ++seed) {
        const int n = 3 + static_cast<int>(seed % 4);
        Matrix k = random_ergodic_kernel(seed, n);
        ErgodicityReport rep = ergodicity_report(k);
        CHECK(rep.t_minorize <= 22.0 * static_cast<double>(rep.t_mix) + 1e-9);
        CHECK(rep.t_minorize == doctest::Approx(minorization_time(k).t_minorize));
        CHECK(rep.t_mix == mixing_time(k));
        CHECK(rep.m_star >= 1);
    }
}

TEST_CASE("model minorization enumerates policies") {
    SUBCASE("hard instance: all four policies share the same kernel") {
        MdpModel m = hard_mdp({0.25});
        ModelMinorization mm = model_minorization_time(m);
        CHECK(mm.t_minorize == doctest::Approx(2.0));
        CHECK(mm.m_vee == 1);
        CHECK(mm.policies_evaluated == 4);
    }
    SUBCASE("3-state 2-action model: max over all 8 policies") {
        MdpModel m = random_mdp({3, 2, {21}, 4.0});
        ModelMinorization mm = model_minorization_time(m, 256);
        CHECK(mm.policies_evaluated == 8);
        double worst = 0.0;
        long long worst_m = 0;
        for (int a0 = 0; a0 < 2; ++a0) {
            for (int a1 = 0; a1 < 2; ++a1) {
                for (int a2 = 0; a2 < 2; ++a2) {
                    Policy pi;
                    pi.action_of = {a0, a1, a2};
                    MinorizationResult r = minorization_time(induced_kernel(m, pi), 256);
                    if (r.t_minorize > worst) worst = r.t_minorize;
                    worst_m = std::max(worst_m, r.m_star);
                }
            }
        }
        CHECK(mm.t_minorize == doctest::Approx(worst).epsilon(1e-12));
        CHECK(mm.m_vee == worst_m);
    }
    SUBCASE("policy list overrides enumeration") {
        MdpModel m = hard_mdp({0.1});
        Policy pi;
        pi.action_of = {0, 1};
        std::vector<Policy> list = {pi};
        ModelMinorization mm = model_minorization_time(m, 4096, &list);
        CHECK(mm.policies_evaluated == 1);
        CHECK(mm.t_minorize == doctest::Approx(5.0));
    }
    SUBCASE("guard trips on unenumerable policy spaces") {
        MdpModel m = random_mdp({8, 6, {2}, 1.0});  // 6^8 = 1679616 > 1e6
        CHECK_THROWS_AS(model_minorization_time(m), TooManyPolicies);
        try {
            model_minorization_time(m);
        } catch (const TooManyPolicies& e) {
            CHECK(e.policy_count == doctest::Approx(std::pow(6.0, 8.0)));
        }
    }
}

TEST_CASE("span semi-norm") {
    CHECK(span_norm({1.0, 1.0, 1.0}) == 0.0);
    CHECK(span_norm({-2.0, 3.0, 0.5}) == doctest::Approx(5.0));
    // Midrange recentring: span equals twice the sup-norm of the recentred
    // vector v - (max+min)/2 * ones.
    Vec v = {0.3, -1.2, 4.0, 2.2};
    const double mid = (4.0 + (-1.2)) / 2.0;
    double sup = 0.0;
    for (double x : v) sup = std::max(sup, std::abs(x - mid));
    CHECK(span_norm(v) == doctest::Approx(2.0 * sup));
}
