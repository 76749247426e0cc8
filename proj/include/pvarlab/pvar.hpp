#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "pvarlab/core.hpp"

namespace pvarlab {

/// First-exceedance times of the running window range at one dyadic level.
/// times[0] = 0; each later entry is the first sample time at which the range
/// since the previous entry exceeds the level size. `terminated` is set when
/// the final scan found no further exceedance.
struct StoppingRecord {
    int level = 0;
    std::vector<double> times;
    std::vector<std::size_t> indices;
    bool terminated = false;

    /// Number of exceedances recorded (entries beyond the initial time 0).
    std::size_t count() const { return times.empty() ? 0 : times.size() - 1; }

    /// Waiting times between consecutive recorded times.
    std::vector<double> durations() const;
};

/// Per-path oscillation statistics and the dyadic-decomposition upper bound.
struct OscillationProfile {
    std::map<int, std::int64_t> band_counts; // level r -> Y_r (nonzero entries)
    std::int64_t nu0 = 0;                    // oscillations larger than a0/2
    double max_from_start = 0.0;             // sup_t |x_t - x_0|
    double dyadic_bound = 0.0;
    double p = 0.0;
    double a0 = 0.0;
};

/// Exact p-variation of the sampled path: the supremum over subsequences of
/// sample indices (anchored at the first and last index) of the sum of p-th
/// powers of increment sizes. For p <= 1 the finest partition is optimal and
/// a closed form is used; for p > 1 a pruned dynamic program runs on the
/// subsequence of local extrema.
double pvar_exact(const SamplePath& path, double p);

/// Exhaustive-enumeration p-variation; oracle for short paths (length <= 22).
double pvar_bruteforce(const SamplePath& path, double p);

/// Subsequence of strict local extrema plus both endpoints. Leaves
/// pvar_exact unchanged for every p >= 1.
SamplePath extrema_reduce(const SamplePath& path);

/// Range max(values[i..j]) - min(values[i..j]) of the window [i, j].
double window_range(const SamplePath& path, std::size_t i, std::size_t j);

/// Stopping times of the dyadic level-r range exceedance scan.
StoppingRecord stopping_times(const SamplePath& path, int r);

/// Maximum number of oscillations larger than b over ordered index pairs
/// (s_1 < e_1 <= s_2 < e_2 <= ...); endpoints may be shared.
std::int64_t oscillation_count(const SamplePath& path, double b);

/// Y_r: maximum over index subsequences of the number of consecutive
/// increments whose size falls in the half-open band [M_r, M_{r-1}).
std::int64_t band_count(const SamplePath& path, int r);

/// Evaluate the dyadic decomposition: band counts over all contributing
/// levels above cutoff_level(a0), the large-oscillation count nu0 at
/// threshold a0/2, and the resulting upper bound
///   sum_{r > r1} 2^(-r p) Y_r + (2 max_from_start)^p nu0  >=  pvar_exact.
OscillationProfile dyadic_upper_bound(const SamplePath& path, double p, double a0);

} // namespace pvarlab
