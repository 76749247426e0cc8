// Independent reference implementations used only by tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "pvarlab/core.hpp"

namespace oracles {

/// Path over unit-spaced times from a value list.
inline pvarlab::SamplePath path_of(std::vector<double> values) {
    pvarlab::SamplePath p;
    for (std::size_t i = 0; i < values.size(); ++i)
        p.times.push_back(static_cast<double>(i));
    p.values = std::move(values);
    p.horizon = p.times.empty() ? 0.0 : p.times.back();
    return p;
}

/// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, double fa,
                      double fb, double fm, double eps, int depth) {
    const double m = (a + b) / 2;
    const double lm = (a + m) / 2, rm = (m + b) / 2;
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15 * eps)
        return left + right + (left + right - whole) / 15;
    return simpson(f, a, m, fa, fm, flm, eps / 2, depth - 1) +
           simpson(f, m, b, fm, fb, frm, eps / 2, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double eps = 1e-13) {
    if (a == b)
        return 0.0;
    const double m = (a + b) / 2;
    return simpson(f, a, b, f(a), f(b), f(m), eps, 48);
}

/// int_0^x u^(a-1) e^(-u) du by quadrature; u^(a-1) is integrable at 0 for
/// a >= 1 and the tests stay in that range.
inline double incomplete_gamma_quadrature(double a, double x) {
    if (x == 0.0)
        return 0.0;
    return integrate([a](double u) { return std::pow(u, a - 1.0) * std::exp(-u); }, 0.0, x);
}

/// Exhaustive maximum number of oscillations larger than b: ordered pairs
/// (s_1 < e_1 <= s_2 < e_2 <= ...) with |x[e] - x[s]| > b.
inline std::int64_t oscillation_count_exhaustive(const std::vector<double>& x, double b,
                                                 std::size_t pos = 0) {
    std::int64_t best = 0;
    for (std::size_t s = pos; s < x.size(); ++s)
        for (std::size_t e = s + 1; e < x.size(); ++e)
            if (std::abs(x[e] - x[s]) > b)
                best = std::max(best, 1 + oscillation_count_exhaustive(x, b, e));
    return best;
}

/// Exhaustive maximum count of consecutive increments inside [lower, upper)
/// over all index subsequences.
inline std::int64_t band_count_exhaustive(const std::vector<double>& x, double lower,
                                          double upper) {
    const std::size_t n = x.size();
    std::int64_t best = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        std::int64_t count = 0;
        bool have_prev = false;
        double prev = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(mask & (std::uint64_t{1} << i)))
                continue;
            if (have_prev) {
                const double d = std::abs(x[i] - prev);
                if (d >= lower && d < upper)
                    ++count;
            }
            have_prev = true;
            prev = x[i];
        }
        best = std::max(best, count);
    }
    return best;
}

/// Standard normal upper tail Q(z) = P(Z > z).
inline double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                                 static_cast<double>(j) / b.size()));
    }
    return d;
}

/// Critical value of the two-sample KS test at the given significance,
/// asymptotic form c(alpha) * sqrt((n+m)/(n m)).
inline double ks_critical(double significance, std::size_t n, std::size_t m) {
    const double c = std::sqrt(-std::log(significance / 2.0) / 2.0);
    return c * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

} // namespace oracles
