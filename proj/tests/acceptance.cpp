// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "pvarlab/bounds.hpp"
#include "pvarlab/experiments.hpp"
#include "pvarlab/kernel.hpp"
#include "pvarlab/parallel.hpp"
#include "pvarlab/pvar.hpp"
#include "pvarlab/rng.hpp"
#include "pvarlab/simulate.hpp"

#include "oracles.hpp"

using namespace pvarlab;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

SamplePath random_grid_path(SplitMix64& rng, std::size_t max_len) {
    const std::size_t len = 2 + rng() % (max_len - 1);
    std::vector<double> values;
    for (std::size_t i = 0; i < len; ++i)
        values.push_back(static_cast<double>(static_cast<int>(rng() % 129) - 64) / 32.0);
    return oracles::path_of(std::move(values));
}

// 1. pvar_exact vs pvar_bruteforce to 1e-12 relative; oscillation and band
//    counts match exhaustive search exactly, over 500 random short paths.
Outcome criterion1() {
    SplitMix64 rng(20240601);
    double max_rel = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const SamplePath path = random_grid_path(rng, 12);
        for (double p : {1.0, 1.3, 2.0, 3.0}) {
            const double exact = pvar_exact(path, p);
            const double brute = pvar_bruteforce(path, p);
            const double scale = std::max({std::abs(exact), std::abs(brute), 1e-30});
            max_rel = std::max(max_rel, std::abs(exact - brute) / scale);
            if (max_rel > 1e-12)
                return {false, fmt("pvar mismatch, rel err %.2e", max_rel)};
        }
        for (double b : {0.25, 0.5, 1.0})
            if (oscillation_count(path, b) !=
                oracles::oscillation_count_exhaustive(path.values, b))
                return {false, "oscillation_count disagrees with exhaustive search"};
        for (int r : {-1, 0, 1, 2})
            if (band_count(path, r) !=
                oracles::band_count_exhaustive(path.values, std::ldexp(1.0, -r - 1),
                                               std::ldexp(1.0, -r)))
                return {false, "band_count disagrees with exhaustive search"};
    }
    return {true, fmt("500 paths, 4 exponents; max rel err %.2e", max_rel)};
}

// 2. Closed forms: gamma(1,x) = 1 - e^-x; the integration-by-parts
//    recurrence; the three-term upper bound; the gap window; 1/e + 7/24 < 0.660.
Outcome criterion2() {
    double worst_closed = 0.0, worst_rec = 0.0;
    for (int i = 0; i <= 60; ++i) {
        const double x = 3.0 * i / 60.0;
        worst_closed = std::max(
            worst_closed, std::abs(lower_incomplete_gamma(1.0, x) - (1.0 - std::exp(-x))));
    }
    if (worst_closed >= 1e-12)
        return {false, fmt("gamma(1,x) closed form off by %.2e", worst_closed)};

    for (int ai = 0; ai < 20; ++ai) {
        const double a = 1.0 + 9.0 * ai / 19.0;
        for (int xi = 0; xi < 20; ++xi) {
            const double x = 3.0 * xi / 19.0;
            worst_rec = std::max(worst_rec,
                                 std::abs(lower_incomplete_gamma(a + 1.0, x) +
                                          std::pow(x, a) * std::exp(-x) -
                                          a * lower_incomplete_gamma(a, x)));
            const double limit = 3.0 * (3.0 + a) / (2.0 + a);
            if (x < limit) {
                const double upper = gamma_series_upper(a, x);
                const double exact = lower_incomplete_gamma(a, x);
                if (upper < exact || (x > 0.0 && !(upper > exact)))
                    return {false, "three-term upper bound violated"};
            }
        }
        const double gap = gamma_one_gap(a);
        if (!(gap > 0.0 && gap < 7.0 / 24.0))
            return {false, fmt("gap out of (0, 7/24) at a=%.3f", a)};
    }
    if (worst_rec >= 1e-12)
        return {false, fmt("recurrence residual %.2e", worst_rec)};
    if (!(std::exp(-1.0) + 7.0 / 24.0 < 0.660))
        return {false, "1/e + 7/24 not below 0.660"};
    return {true, fmt("closed form %.1e, recurrence %.1e, constants ok", worst_closed, worst_rec)};
}

// 3. The dyadic-decomposition inequality on 1000 simulated paths across
//    alpha in {1.2, 1.8, 2}, p in {1.5, 2.5}, a0 = 1: zero violations.
Outcome criterion3() {
    const double alphas[] = {1.2, 1.8, 2.0};
    const std::size_t n_paths = 1000;
    std::vector<std::uint8_t> ok(n_paths, 0);
    std::vector<double> min_margin(n_paths, 0.0);
    parallel_for(n_paths, [&](std::size_t i) {
        ProcessSpec spec;
        spec.alpha = alphas[i % 3];
        spec.scale = 1.0;
        spec.horizon = 1.0;
        const SamplePath path = simulate_path(spec, MeshSpec{1025}, derive_stream(33, i));
        bool good = true;
        double margin = std::numeric_limits<double>::infinity();
        for (double p : {1.5, 2.5}) {
            const double vp = pvar_exact(path, p);
            const OscillationProfile prof = dyadic_upper_bound(path, p, 1.0);
            good = good && vp <= prof.dyadic_bound;
            margin = std::min(margin, prof.dyadic_bound - vp);
        }
        ok[i] = good ? 1 : 0;
        min_margin[i] = margin;
    });
    std::size_t violations = 0;
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_paths; ++i) {
        if (!ok[i])
            ++violations;
        margin = std::min(margin, min_margin[i]);
    }
    if (violations > 0)
        return {false, fmt("%zu of %zu paths violate the bound", violations, n_paths)};
    return {true, fmt("0 violations over %zu paths, min margin %.3g", n_paths, margin)};
}

// 4. Stopping-tail and expected-band domination for Brownian motion under
//    the quartic-moment envelope (K=3, beta=2, gamma=4), 3-sigma slack.
Outcome criterion4() {
    ExperimentConfig cfg;
    cfg.process.alpha = 2.0;
    cfg.process.scale = 0.5;
    cfg.process.horizon = 1.0;
    cfg.mesh_ladder = {4097};
    cfg.n_paths = 10000;
    cfg.seed = 4;
    cfg.a0 = 1.0;
    cfg.envelope = TailEnvelope{3.0, 2.0, 4.0, 1.0};
    cfg.r_values = {2, 3, 4};
    cfg.j_values = {1, 2, 3};

    const RunManifest man = run_bound_validation(cfg);
    std::size_t checks = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    for (const auto& check : man.checks) {
        ++checks;
        min_margin = std::min(min_margin, check.margin);
        if (!check.passed)
            return {false, check.name + " failed: " + check.detail};
    }
    return {true, fmt("%zu domination checks hold, min margin %.3g", checks, min_margin)};
}

// 5. The running-supremum inequality on a 3x3 (h, M) grid for alpha in
//    {1.2, 2}, 1e5 paths per cell, 3-sigma slack.
Outcome criterion5() {
    std::size_t cells = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    std::size_t cell_index = 0;
    for (double alpha : {1.2, 2.0}) {
        ProcessSpec spec;
        spec.alpha = alpha;
        spec.scale = alpha == 2.0 ? 0.5 : 1.0;
        spec.horizon = 1.0;
        for (double h : {0.02, 0.05, 0.1})
            for (double M : {0.5, 1.0, 2.0}) {
                const OttavianiResult res =
                    ottaviani_check(spec, 0.0, h, M, 100000, derive_stream(55, cell_index++));
                ++cells;
                min_margin = std::min(min_margin, res.rhs + res.slack - res.lhs);
                if (!res.holds)
                    return {false, fmt("violated at alpha=%.1f h=%.2f M=%.1f: lhs %.4f rhs %.4f",
                                       alpha, h, M, res.lhs, res.rhs)};
            }
    }
    return {true, fmt("%zu cells hold, min margin %.3g", cells, min_margin)};
}

// 6. Envelope recovery: exact fit on the noiseless h/a^2 grid, and
//    pstar in [1.1, 1.3] for the alpha = 1.2 Monte Carlo grid.
Outcome criterion6() {
    TailGrid exact;
    for (int hi = -10; hi <= -6; ++hi)
        for (int ai = -4; ai <= -1; ++ai) {
            TailCell cell;
            cell.h = std::ldexp(1.0, hi);
            cell.a = std::ldexp(1.0, ai);
            cell.alpha_hat = cell.h / (cell.a * cell.a);
            cell.n = 1000000000ull;
            cell.ci_low = cell.ci_high = cell.alpha_hat;
            exact.cells.push_back(cell);
        }
    const KernelFit noiseless = fit_envelope(exact, 1.0);
    if (!noiseless.has_envelope)
        return {false, "noiseless fit produced no envelope"};
    const double errK = std::abs(noiseless.envelope.K - 1.0);
    const double errB = std::abs(noiseless.envelope.beta - 1.0);
    const double errG = std::abs(noiseless.envelope.gamma - 2.0);
    if (errK > 1e-9 || errB > 1e-9 || errG > 1e-9)
        return {false, fmt("noiseless fit off: dK=%.1e dbeta=%.1e dgamma=%.1e", errK, errB, errG)};

    ExperimentConfig cfg;
    cfg.process.alpha = 1.2;
    cfg.process.scale = 1.0;
    cfg.process.horizon = 1.0;
    for (int hi = -10; hi <= -6; ++hi)
        cfg.h_values.push_back(std::ldexp(1.0, hi));
    for (int ai = -4; ai <= -1; ++ai)
        cfg.a_values.push_back(std::ldexp(1.0, ai));
    cfg.samples_per_cell = 100000;
    cfg.seed = 6;

    const RunManifest man = run_membership(cfg);
    if (!man.fit || !man.fit->has_envelope)
        return {false, "monte carlo fit produced no envelope"};
    const double pstar = man.fit->envelope.critical_exponent();
    if (!(pstar >= 1.1 && pstar <= 1.3))
        return {false, fmt("pstar %.4f outside [1.1, 1.3]", pstar)};
    return {true, fmt("noiseless fit exact to %.1e; monte carlo pstar %.4f",
                      std::max({errK, errB, errG}), pstar)};
}

// 7. Sharpness classification: alpha = 1.2 separates p = 1.0 (diverging)
//    from p = 1.5 (stabilizing); the Brownian analogue separates p = 1.9
//    from p = 2.5 under its documented thresholds.
Outcome criterion7() {
    auto label_of = [](const RunManifest& man, double p) -> std::string {
        for (const auto& cell : man.summary)
            if (cell.p == p)
                return cell.classification;
        return "missing";
    };

    ExperimentConfig stable;
    stable.process.alpha = 1.2;
    stable.process.scale = 1.0;
    stable.process.horizon = 1.0;
    stable.mesh_ladder = {1025, 2049, 4097, 8193, 16385, 32769, 65537};
    stable.p_grid = {1.0, 1.5};
    stable.n_paths = 100;
    stable.seed = 42;
    const RunManifest sm = run_sharpness(stable);
    const std::string s10 = label_of(sm, 1.0);
    const std::string s15 = label_of(sm, 1.5);
    if (s10 != "diverging")
        return {false, "alpha=1.2 p=1.0 classified " + s10};
    if (s15 != "stabilizing")
        return {false, "alpha=1.2 p=1.5 classified " + s15};

    ExperimentConfig brownian;
    brownian.process.alpha = 2.0;
    brownian.process.scale = 0.5;
    brownian.process.horizon = 1.0;
    brownian.mesh_ladder = {1025, 4097, 16385, 65537};
    brownian.p_grid = {1.9, 2.5};
    brownian.n_paths = 100;
    brownian.seed = 42;
    brownian.growth_factor = 1.3; // the factor-2 default cannot trigger for
                                  // Brownian p just below 2 at these meshes
    const RunManifest bm = run_sharpness(brownian);
    const std::string b19 = label_of(bm, 1.9);
    const std::string b25 = label_of(bm, 2.5);
    if (b19 != "diverging")
        return {false, "brownian p=1.9 classified " + b19};
    if (b25 != "stabilizing")
        return {false, "brownian p=2.5 classified " + b25};
    return {true, "1.2: p=1.0 diverging, p=1.5 stabilizing; brownian: p=1.9 diverging, "
                  "p=2.5 stabilizing"};
}

// 8. The small-band tail constant against an independent summation of the
//    two geometric series, and rejection below the critical exponent.
Outcome criterion8() {
    const TailEnvelope env{1.0, 1.0, 1.0, 1.0};
    const double c1 = tail_constant(env, 1.0, 2.0);

    const int r1 = cutoff_level(env.a0);
    double first = 0.0, second = 0.0;
    for (int r = r1 + 1; r < 1000; ++r) {
        first += (6.0 + 4.0) * std::exp2(-2.0 * r);
        second += std::exp2(2.0 + 4.0 - 1.0 * r);
    }
    const double oracle = 2.0 * std::exp(1.0) * (first + second);
    const double rel = std::abs(c1 - oracle) / oracle;
    if (rel > 1e-9)
        return {false, fmt("C1 %.10g vs re-derivation %.10g (rel %.2e)", c1, oracle, rel)};
    if (std::abs(c1 - 3943.3208391512550) / c1 > 1e-12)
        return {false, fmt("C1 %.10g off the frozen reference", c1)};
    for (double bad : {1.0, 0.5}) {
        try {
            tail_constant(env, 1.0, bad);
            return {false, fmt("p=%.1f not rejected", bad)};
        } catch (const std::domain_error&) {
        }
    }
    return {true, fmt("C1 = %.6f matches re-derivation to %.1e; p <= pstar rejected", c1, rel)};
}

} // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Entry> criteria = {
        {1, "oracle equivalence of path statistics", 60, criterion1},
        {2, "incomplete gamma closed forms", 30, criterion2},
        {3, "dyadic upper bound dominates exact p-variation", 300, criterion3},
        {4, "stopping-tail and band-count domination", 600, criterion4},
        {5, "running-supremum inequality grid", 600, criterion5},
        {6, "envelope recovery", 300, criterion6},
        {7, "sharpness classification at the critical exponent", 900, criterion7},
        {8, "tail constant evaluation", 30, criterion8},
    };

    int failures = 0;
    for (const auto& entry : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = entry.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_budget = secs < entry.budget_s;
        const bool ok = outcome.passed && in_budget;
        std::printf("[%s] criterion %d: %s — %s (%.1f s, budget %.0f s)\n", ok ? "PASS" : "FAIL",
                    entry.id, entry.name, outcome.detail.c_str(), secs, entry.budget_s);
        std::fflush(stdout);
        if (!ok)
            ++failures;
    }
    std::printf("%d/8 criteria passed\n", 8 - failures);
    return failures;
}
