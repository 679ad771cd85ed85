// This file is part of drmdp, a solver library for distributionally robust
// Markov decision processes with discounted and average-reward objectives.
//
// SPDX-License-Identifier: MIT
//
// End-to-end acceptance runner. Each criterion prints one PASS/FAIL line;
// the process exit code is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "../common/property_suites.hpp"
#include "drmdp/average.hpp"
#include "drmdp/bellman.hpp"
#include "drmdp/divergence.hpp"
#include "drmdp/ergodicity.hpp"
#include "drmdp/errors.hpp"
#include "drmdp/experiment.hpp"
#include "drmdp/instances.hpp"
#include "drmdp/model.hpp"
#include "drmdp/rng.hpp"
#include "drmdp/types.hpp"

using namespace drmdp;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

struct CellRecords {
    double p = 0.0;             // hard-instance switching probability
    std::vector<ExperimentRecord> records;
};

Vec random_simplex(rng::Stream& s, int size, double min_mass, double max_mass) {
    Vec p(static_cast<std::size_t>(size));
    for (;;) {
        double sum = 0.0;
        for (auto& x : p) {
            x = -std::log(1.0 - s.next_unit());
            sum += x;
        }
        bool ok = true;
        for (auto& x : p) {
            x /= sum;
            if (x < min_mass || x > max_mass) ok = false;
        }
        if (ok) return p;
    }
}

double dot(const Vec& a, const Vec& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

// --- criterion 1 + 7 -------------------------------------------------------

std::vector<CellRecords> g_cells;  // kept for the error-envelope check

void criterion_1() {
    const auto start = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    g_cells.clear();
    for (double p : {0.1, 0.25}) {
        for (auto divergence : {Divergence::KL, Divergence::Fk}) {
            ExperimentConfig cfg;
            cfg.family = "hard";
            cfg.hard.p = p;
            cfg.spec = UncertaintySetSpec{divergence, 0.01, 2.0};
            cfg.algorithm = AlgorithmChoice::Both;
            cfg.seeds_per_n = 3;
            cfg.base_seed = 1;
            cfg.solver_tol = 1e-6;
            cfg.ground_truth_precision = 1e-6;
            cfg.out_dir =
                (fs::path("acceptance_tmp") /
                 ("c1_" + std::to_string(p) + "_" + to_string(divergence)))
                    .string();
            std::vector<ExperimentRecord> records = run_experiment(cfg);
            g_cells.push_back({p, records});
            for (Method method : {Method::Reduction, Method::Anchored}) {
                std::vector<ExperimentRecord> mine;
                for (const ExperimentRecord& r : records) {
                    if (r.algorithm == method) mine.push_back(r);
                }
                RegressionFit fit = fit_loglog(mine);
                char buf[160];
                std::snprintf(buf, sizeof(buf), "[p=%.2f %s %s slope=%.3f] ", p,
                              to_string(divergence).c_str(),
                              to_string(method).c_str(), fit.slope);
                detail += buf;
                if (!(fit.slope >= -0.65 && fit.slope <= -0.35)) pass = false;
            }
        }
    }
    char tail[64];
    std::snprintf(tail, sizeof(tail), "(%.1fs)", elapsed_s(start));
    report(1, pass, "convergence-rate slopes in [-0.65,-0.35] " + detail + tail);
}

void criterion_7() {
    // High-probability error envelope over the criterion-1 records: |S| = |A| = 2 for the
    // hard family, minimum support probability p, t_minorize = 1/(2p).
    const double beta = 0.05;
    const double log_term = std::log(2.0 * 2.0 * 2.0 * 2.0 / beta);  // 2|S|^2|A|/beta
    long long considered = 0, satisfied = 0;
    for (const CellRecords& cell : g_cells) {
        const double p_min = cell.p;
        const double t_minorize = 1.0 / (2.0 * cell.p);
        const double n_min = 32.0 * log_term / p_min;
        for (const ExperimentRecord& r : cell.records) {
            if (r.failed || static_cast<double>(r.n) < n_min) continue;
            const double envelope =
                120.0 * std::sqrt(2.0) * t_minorize *
                std::sqrt(2.0 * log_term / (static_cast<double>(r.n) * p_min));
            ++considered;
            if (r.abs_error <= envelope) ++satisfied;
        }
    }
    const double frac = considered > 0
                            ? static_cast<double>(satisfied) /
                                  static_cast<double>(considered)
                            : 0.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "error envelope holds on %.1f%% of %lld eligible records "
                  "(need >= 95%%)",
                  100.0 * frac, considered);
    report(7, considered > 0 && frac >= 0.95, buf);
}

// --- criterion 2 ------------------------------------------------------------

void criterion_2() {
    const auto start = std::chrono::steady_clock::now();
    rng::Stream s = rng::Stream::keyed(2026, rng::kPurposeTesting, 2, 0);
    int bad_gain = 0, bad_policy = 0;
    double worst_gap = 0.0;
    const long long n_choices[] = {16, 64, 256, 1024, 4096};
    for (int c = 0; c < 50; ++c) {
        RandomMdpParams params;
        params.n_states = 2 + static_cast<int>(s.next_u64() % 3);
        params.n_actions = 1 + static_cast<int>(s.next_u64() % 3);
        params.seed = RngSeed{7000 + static_cast<std::uint64_t>(c)};
        params.sigma_max = 5.0 * s.next_unit();
        MdpModel m = random_mdp(params);

        UncertaintySetSpec spec;
        if (c % 2 == 0) {
            spec.divergence = Divergence::KL;
        } else {
            spec.divergence = Divergence::Fk;
            spec.k = 1.2 + 2.8 * s.next_unit();
        }
        spec.radius = 0.2 * s.next_unit();
        if (c % 10 == 0) spec.radius = 0.0;

        const long long n = n_choices[s.next_u64() % 5];
        const int s0 = static_cast<int>(s.next_u64() %
                                        static_cast<std::uint64_t>(m.n_states));
        EmpiricalKernel emp =
            sample_transitions(m, n, RngSeed{900 + static_cast<std::uint64_t>(c)});

        AvgRewardSolution anchored =
            anchored_amdp(emp, m.reward, spec, n, s0, 1e-10);

        DiscountedSolveParams dparams;
        const double xi = 1.0 / std::sqrt(static_cast<double>(n));
        dparams.gamma = 1.0 - xi;
        dparams.tol = 1e-10;
        KernelView kv = KernelView::of(emp, m.reward);
        DiscountedSolution discounted = solve_dr_dmdp(kv, spec, dparams);

        const double gap =
            std::abs(anchored.gain -
                     xi * discounted.values[static_cast<std::size_t>(s0)]);
        worst_gap = std::max(worst_gap, gap);
        if (gap > 1e-8) ++bad_gain;

        // Greedy policies must agree wherever the action gap is decisive.
        for (int st = 0; st < m.n_states; ++st) {
            double best = -1e300, second = -1e300;
            for (int a = 0; a < m.n_actions; ++a) {
                const double q =
                    kv.r(st, a) + dparams.gamma * dual_value(spec, kv.row(st, a),
                                                             discounted.values.data(),
                                                             m.n_states);
                if (q > best) {
                    second = best;
                    best = q;
                } else {
                    second = std::max(second, q);
                }
            }
            if (m.n_actions > 1 && best - second > 1e-6 &&
                anchored.policy(st) != discounted.policy(st)) {
                ++bad_policy;
            }
        }
    }
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "cross-algorithm gains agree to 1e-8 on 50 cases "
                  "(worst gap %.2e, gain misses %d, policy misses %d) (%.1fs)",
                  worst_gap, bad_gain, bad_policy, elapsed_s(start));
    report(2, bad_gain == 0 && bad_policy == 0, buf);
}

// --- criterion 3 ------------------------------------------------------------

void criterion_3() {
    const auto start = std::chrono::steady_clock::now();
    rng::Stream s = rng::Stream::keyed(2026, rng::kPurposeTesting, 3, 0);
    int bad = 0;
    double worst = 0.0;
    for (int c = 0; c < 200; ++c) {
        const int size = (c < 150) ? 2 : 3;
        const double step = (c < 150) ? 1e-5 : 2e-4;
        Vec p = random_simplex(s, size, 0.05, 1.0);
        Vec v(static_cast<std::size_t>(size));
        for (auto& x : v) x = s.next_unit();
        UncertaintySetSpec spec;
        if (c % 2 == 0) {
            spec.divergence = Divergence::KL;
        } else {
            spec.divergence = Divergence::Fk;
            spec.k = 1.5 + 2.0 * s.next_unit();
        }
        spec.radius = 0.3 * s.next_unit();
        const double dual = dual_value(spec, p, v);
        const double oracle = brute_force_gamma(p, v, spec, step);
        const double gap = std::abs(dual - oracle);
        worst = std::max(worst, gap);
        if (gap > 1e-3) ++bad;
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "dual vs primal grid oracle within 1e-3 on 200 triples "
                  "(worst gap %.2e, misses %d) (%.1fs)",
                  worst, bad, elapsed_s(start));
    report(3, bad == 0, buf);
}

// --- criterion 4 ------------------------------------------------------------

void criterion_4() {
    const auto start = std::chrono::steady_clock::now();
    rng::Stream s = rng::Stream::keyed(2026, rng::kPurposeTesting, 4, 0);
    int bad = 0;
    double worst_div = 0.0, worst_val = 0.0;
    for (int c = 0; c < 200; ++c) {
        const int size = 2 + static_cast<int>(s.next_u64() % 3);
        // Cap single masses at 0.9 and radii at 0.04 so the KL stationary
        // point stays interior (the argmin conditional then costs at least
        // -log(0.9) > 0.1 of divergence).
        Vec p = random_simplex(s, size, 0.02, 0.9);
        Vec v(static_cast<std::size_t>(size));
        for (;;) {
            for (auto& x : v) x = s.next_unit();
            if (span_norm(v) >= 0.05) break;
        }
        const double delta = 1e-3 + 0.039 * s.next_unit();
        if (c % 2 == 0) {
            DualSolution w = kl_worst_case(p, v, delta);
            const double dual = kl_dual_value(p.data(), v.data(), size, delta);
            const double ddiv = std::abs(w.achieved_divergence - delta);
            const double dval = std::abs(dot(w.worst_case, v) - dual);
            worst_div = std::max(worst_div, ddiv);
            worst_val = std::max(worst_val, dval);
            if (w.any_ball_member || ddiv > 1e-8 || dval > 1e-8) ++bad;
        } else {
            const double k = 1.3 + 2.7 * s.next_unit();
            DualSolution w = fk_worst_case(p, v, delta, k);
            const double dual = fk_dual_value(p.data(), v.data(), size, delta, k);
            const double dval = std::abs(dot(w.worst_case, v) - dual);
            worst_val = std::max(worst_val, dval);
            if (w.any_ball_member || w.achieved_divergence > delta + 1e-8 ||
                dval > 1e-8) {
                ++bad;
            }
        }
    }
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "worst-case certificates on 200 balls: KL divergence gap "
                  "<= %.2e, primal-dual gap <= %.2e, misses %d (%.1fs)",
                  worst_div, worst_val, bad, elapsed_s(start));
    report(4, bad == 0, buf);
}

// --- criterion 5 ------------------------------------------------------------

void criterion_5() {
    const auto start = std::chrono::steady_clock::now();
    MdpModel m = hard_mdp({0.25});
    UncertaintySetSpec spec{Divergence::KL, 0.0, 2.0};
    const double t_minorize = 2.0;
    bool pass = true;
    std::string detail;

    for (long long n : {1000LL, 10000LL}) {
        EmpiricalKernel emp = sample_transitions(m, n, RngSeed{1});
        const double bound = 18.0 * t_minorize / std::sqrt(static_cast<double>(n));
        AvgRewardSolution red = reduce_to_dmdp(emp, m.reward, spec, n, 1e-6);
        AvgRewardSolution anc = anchored_amdp(emp, m.reward, spec, n, 0, 1e-6);
        char buf[120];
        std::snprintf(buf, sizeof(buf), "[n=%lld err_red=%.4f err_anc=%.4f bd=%.3f] ",
                      n, std::abs(red.gain - 0.5), std::abs(anc.gain - 0.5), bound);
        detail += buf;
        if (std::abs(red.gain - 0.5) > bound) pass = false;
        if (std::abs(anc.gain - 0.5) > bound) pass = false;
    }

    // Exact kernel at n = 10^6: only the reduction/anchoring bias remains.
    {
        const long long n = 1000000;
        EmpiricalKernel exact;
        exact.n_states = m.n_states;
        exact.n_actions = m.n_actions;
        exact.n = n;
        exact.counts.resize(m.kernel.size());
        for (std::size_t i = 0; i < m.kernel.size(); ++i) {
            exact.counts[i] = std::llround(m.kernel[i] * static_cast<double>(n));
        }
        exact.finalize();
        AvgRewardSolution red = reduce_to_dmdp(exact, m.reward, spec, n, 1e-6);
        AvgRewardSolution anc = anchored_amdp(exact, m.reward, spec, n, 0, 1e-6);
        char buf[120];
        std::snprintf(buf, sizeof(buf),
                      "[n=1e6 exact err_red=%.5f err_anc=%.5f bd=0.036] ",
                      std::abs(red.gain - 0.5), std::abs(anc.gain - 0.5));
        detail += buf;
        if (std::abs(red.gain - 0.5) > 0.036) pass = false;
        if (std::abs(anc.gain - 0.5) > 0.036) pass = false;
    }
    char tail[32];
    std::snprintf(tail, sizeof(tail), "(%.1fs)", elapsed_s(start));
    report(5, pass, "radius-zero recovery of the nominal gain " + detail + tail);
}

// --- criterion 6 ------------------------------------------------------------

void criterion_6() {
    const auto start = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    for (double p : {0.05, 0.1, 0.25, 0.5}) {
        MdpModel m = hard_mdp({p});
        Policy pi;
        pi.action_of = {0, 0};
        MinorizationResult res = minorization_time(induced_kernel(m, pi));
        if (std::abs(res.t_minorize - 1.0 / (2.0 * p)) > 1e-9 || res.m_star != 1) {
            pass = false;
            detail += "[closed form failed at p=" + std::to_string(p) + "] ";
        }
    }
    int violations = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        RandomMdpParams params;
        params.n_states = 3 + static_cast<int>(seed % 6);
        params.n_actions = 1;
        params.seed = RngSeed{seed};
        params.sigma_max = 2.0 + static_cast<double>(seed % 5);
        MdpModel m = random_mdp(params);
        Policy pi;
        pi.action_of.assign(static_cast<std::size_t>(m.n_states), 0);
        ErgodicityReport rep = ergodicity_report(induced_kernel(m, pi));
        if (rep.t_minorize > 22.0 * static_cast<double>(rep.t_mix) + 1e-9) {
            ++violations;
        }
    }
    if (violations > 0) {
        pass = false;
        detail += "[minorization/mixing inequality violated on " +
                  std::to_string(violations) + " kernels] ";
    }
    char tail[96];
    std::snprintf(tail, sizeof(tail),
                  "closed forms 1/(2p) at m=1 and t_minorize <= 22 t_mix on 20 "
                  "kernels (%.1fs)",
                  elapsed_s(start));
    report(6, pass, detail + tail);
}

// --- criterion 8 ------------------------------------------------------------

void criterion_8() {
    const auto start = std::chrono::steady_clock::now();
    ExperimentConfig cfg;
    cfg.family = "random";
    cfg.random = RandomMdpParams{20, 30, {1}, 100.0};
    cfg.spec = UncertaintySetSpec{Divergence::KL, 0.4, 2.0};
    cfg.algorithm = AlgorithmChoice::Both;
    cfg.n_grid = {10, 32, 100, 316, 1000, 3162, 10000, 31623, 100000};
    cfg.seeds_per_n = 1;
    cfg.base_seed = 1;
    cfg.solver_tol = 1e-6;
    cfg.ground_truth_precision = 1e-6;
    cfg.out_dir = (fs::path("acceptance_tmp") / "c8").string();

    std::vector<ExperimentRecord> records = run_experiment(cfg);
    bool pass = true;
    std::string detail;
    for (const ExperimentRecord& r : records) {
        if (r.failed) {
            pass = false;
            detail += "[failed record n=" + std::to_string(r.n) + "] ";
        }
    }
    for (Method method : {Method::Reduction, Method::Anchored}) {
        std::vector<ExperimentRecord> mine;
        double err_100 = -1.0, err_100k = -1.0;
        for (const ExperimentRecord& r : records) {
            if (r.algorithm != method || r.failed) continue;
            mine.push_back(r);
            if (r.n == 100) err_100 = r.abs_error;
            if (r.n == 100000) err_100k = r.abs_error;
        }
        RegressionFit fit = fit_loglog(mine);
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "[%s slope=%.3f err(1e2)=%.2e err(1e5)=%.2e] ",
                      to_string(method).c_str(), fit.slope, err_100, err_100k);
        detail += buf;
        if (!(fit.slope >= -0.70 && fit.slope <= -0.30)) pass = false;
        if (!(err_100 > 0.0 && err_100k > 0.0 && err_100k * 10.0 <= err_100)) {
            pass = false;
        }
    }
    char tail[32];
    std::snprintf(tail, sizeof(tail), "(%.1fs)", elapsed_s(start));
    report(8, pass, "20x30 random instance at KL delta=0.4 " + detail + tail);
}

// --- criterion 9 ------------------------------------------------------------

void criterion_9() {
    const auto start = std::chrono::steady_clock::now();
    using namespace drmdp::testing;
    struct Named {
        const char* name;
        SuiteResult result;
    };
    const int cases = 1000;
    Named suites[] = {
        {"contraction", suite_contraction(cases)},
        {"monotonicity", suite_monotonicity(cases)},
        {"lipschitz", suite_lipschitz(cases)},
        {"translation", suite_translation(cases)},
        {"delta-monotonicity", suite_delta_monotonicity(cases)},
        {"span-subadditivity", suite_span_subadditivity(cases)},
    };
    bool pass = true;
    std::string detail;
    for (const Named& s : suites) {
        if (!s.result.ok()) {
            pass = false;
            detail += std::string("[") + s.name + ": " +
                      std::to_string(s.result.failures) + " failures, first: " +
                      s.result.first_message + "] ";
        }
    }
    char tail[96];
    std::snprintf(tail, sizeof(tail),
                  "six invariant suites x %d randomized cases (%.1fs)", cases,
                  elapsed_s(start));
    report(9, pass, detail + tail);
}

}  // namespace

int main() {
    fs::remove_all("acceptance_tmp");
    fs::create_directories("acceptance_tmp");

    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();

    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
    } else {
        std::printf("%d acceptance criteria FAILED\n", g_failures);
    }
    return g_failures;
}
