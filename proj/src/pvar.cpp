#include "pvarlab/pvar.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace pvarlab {

std::vector<double> StoppingRecord::durations() const {
    std::vector<double> d;
    for (std::size_t i = 1; i < times.size(); ++i)
        d.push_back(times[i] - times[i - 1]);
    return d;
}

namespace {

// 2^(-r-1) without the public-range guard; exact down to subnormals.
double level_size_wide(int r) { return std::ldexp(1.0, -r - 1); }

void check_p(double p) {
    if (!(p > 0.0) || !std::isfinite(p))
        throw std::domain_error("p-variation: p must be positive and finite");
}

// Running p-variation v[j] = max over i < j of v[i] + |x[j] - x[i]|^p,
// pruned by a dyadic tree of index blocks. Each block keeps the max distance
// from its leftmost point to any point inserted so far; since v is
// nondecreasing, v at the block's last available index plus the triangle
// bound (|x[j] - x[lo]| + radius)^p majorizes every candidate inside, and
// blocks that cannot beat the incumbent are skipped whole.
double pvar_backbone(const std::vector<double>& x, double p) {
    const std::size_t n = x.size();
    if (n < 2)
        return 0.0;
    if (n == 2)
        return std::pow(std::abs(x[1] - x[0]), p);

    const std::size_t leaves = std::bit_ceil(n);
    const int depth_max = std::countr_zero(leaves);
    std::vector<double> radius(2 * leaves, 0.0);
    std::vector<double> v(n, 0.0);
    std::vector<std::uint32_t> stack;
    stack.reserve(4 * depth_max + 8);

    // lo index of tree node k
    auto node_lo = [&](std::uint32_t k) {
        const int d = std::bit_width(k) - 1;
        return (static_cast<std::size_t>(k) - (std::size_t{1} << d)) * (leaves >> d);
    };
    auto node_len = [&](std::uint32_t k) { return leaves >> (std::bit_width(k) - 1); };

    for (std::size_t j = 1; j < n; ++j) {
        // fold point j-1 into the ancestor radii
        const std::size_t i = j - 1;
        for (std::uint32_t k = static_cast<std::uint32_t>(leaves + i) >> 1; k >= 1; k >>= 1)
            radius[k] = std::max(radius[k], std::abs(x[i] - x[node_lo(k)]));

        double best = v[j - 1] + std::pow(std::abs(x[j] - x[j - 1]), p);
        stack.push_back(1);
        while (!stack.empty()) {
            const std::uint32_t k = stack.back();
            stack.pop_back();
            const std::size_t lo = node_lo(k);
            if (lo >= j)
                continue;
            const std::size_t len = node_len(k);
            if (len == 1) {
                const double cand = v[lo] + std::pow(std::abs(x[j] - x[lo]), p);
                best = std::max(best, cand);
                continue;
            }
            const std::size_t hi = std::min(lo + len, j) - 1;
            const double opt = v[hi] + std::pow(std::abs(x[j] - x[lo]) + radius[k], p);
            if (opt <= best)
                continue;
            stack.push_back(2 * k);     // left, popped second
            stack.push_back(2 * k + 1); // right, popped first (larger v)
        }
        v[j] = best;
    }
    return v[n - 1];
}

} // namespace

double pvar_exact(const SamplePath& path, double p) {
    check_p(p);
    const std::size_t n = path.size();
    if (n == 0)
        throw std::invalid_argument("pvar_exact: empty path");
    if (n == 1)
        return 0.0;
    if (p <= 1.0) {
        // (a+b)^p <= a^p + b^p for p <= 1: the finest partition is optimal
        double sum = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            const double d = std::abs(path.values[i] - path.values[i - 1]);
            if (d > 0.0)
                sum += p == 1.0 ? d : std::pow(d, p);
        }
        return sum;
    }
    const SamplePath reduced = extrema_reduce(path);
    return pvar_backbone(reduced.values, p);
}

double pvar_bruteforce(const SamplePath& path, double p) {
    check_p(p);
    const std::size_t n = path.size();
    if (n == 0)
        throw std::invalid_argument("pvar_bruteforce: empty path");
    if (n > 22)
        throw std::invalid_argument("pvar_bruteforce: path too long (max 22)");
    if (n == 1)
        return 0.0;

    const auto& x = path.values;
    const std::size_t interior = n - 2;
    double best = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << interior); ++mask) {
        double sum = 0.0;
        double prev = x[0];
        for (std::size_t i = 0; i < interior; ++i) {
            if (mask & (std::uint64_t{1} << i)) {
                sum += std::pow(std::abs(x[i + 1] - prev), p);
                prev = x[i + 1];
            }
        }
        sum += std::pow(std::abs(x[n - 1] - prev), p);
        best = std::max(best, sum);
    }
    return best;
}

SamplePath extrema_reduce(const SamplePath& path) {
    const std::size_t n = path.size();
    if (n <= 2)
        return path;

    std::vector<std::size_t> keep;
    keep.push_back(0);
    int dir = 0;
    for (std::size_t i = 1; i < n; ++i) {
        const double d = path.values[i] - path.values[keep.back()];
        const int s = (d > 0.0) - (d < 0.0);
        if (s == 0)
            continue;
        if (s == dir)
            keep.back() = i; // extend the monotone run
        else {
            keep.push_back(i);
            dir = s;
        }
    }
    if (keep.back() != n - 1)
        keep.push_back(n - 1);

    SamplePath out;
    out.horizon = path.horizon;
    out.times.reserve(keep.size());
    out.values.reserve(keep.size());
    for (std::size_t k : keep) {
        out.times.push_back(path.times[k]);
        out.values.push_back(path.values[k]);
    }
    return out;
}

double window_range(const SamplePath& path, std::size_t i, std::size_t j) {
    if (i > j || j >= path.size())
        throw std::out_of_range("window_range: bad window");
    double mn = path.values[i], mx = path.values[i];
    for (std::size_t k = i + 1; k <= j; ++k) {
        mn = std::min(mn, path.values[k]);
        mx = std::max(mx, path.values[k]);
    }
    return mx - mn;
}

StoppingRecord stopping_times(const SamplePath& path, int r) {
    const double m = dyadic_size(r);
    const std::size_t n = path.size();

    StoppingRecord rec;
    rec.level = r;
    rec.times.push_back(n > 0 ? path.times.front() : 0.0);
    rec.indices.push_back(0);

    std::size_t anchor = 0;
    while (true) {
        bool fired = false;
        double mn = path.values.empty() ? 0.0 : path.values[anchor];
        double mx = mn;
        for (std::size_t t = anchor + 1; t < n; ++t) {
            mn = std::min(mn, path.values[t]);
            mx = std::max(mx, path.values[t]);
            if (mx - mn > m) {
                rec.times.push_back(path.times[t]);
                rec.indices.push_back(t);
                anchor = t;
                fired = true;
                break;
            }
        }
        if (!fired) {
            rec.terminated = true;
            break;
        }
    }
    return rec;
}

std::int64_t oscillation_count(const SamplePath& path, double b) {
    if (!(b > 0.0))
        throw std::domain_error("oscillation_count: threshold must be positive");
    const std::size_t n = path.size();
    std::int64_t count = 0;
    std::size_t pos = 0;
    while (pos + 1 < n) {
        // earliest endpoint e whose increment from some s in [pos, e) exceeds b
        double mn = path.values[pos], mx = path.values[pos];
        bool fired = false;
        for (std::size_t e = pos + 1; e < n; ++e) {
            const double xe = path.values[e];
            if (xe > mn + b || xe < mx - b) {
                ++count;
                pos = e; // the next start may share this endpoint
                fired = true;
                break;
            }
            mn = std::min(mn, xe);
            mx = std::max(mx, xe);
        }
        if (!fired)
            break;
    }
    return count;
}

namespace {

// max-tree over value ranks; supports prefix-free range-max queries
class MaxSegTree {
  public:
    explicit MaxSegTree(std::size_t n)
        : n_(std::max<std::size_t>(1, std::bit_ceil(n))),
          tree_(2 * n_, std::numeric_limits<std::int64_t>::min()) {}

    void update(std::size_t pos, std::int64_t val) {
        std::size_t k = n_ + pos;
        if (tree_[k] >= val)
            return;
        tree_[k] = val;
        for (k >>= 1; k >= 1; k >>= 1)
            tree_[k] = std::max(tree_[2 * k], tree_[2 * k + 1]);
    }

    // max over [l, r); min() if empty
    std::int64_t query(std::size_t l, std::size_t r) const {
        std::int64_t best = std::numeric_limits<std::int64_t>::min();
        for (l += n_, r += n_; l < r; l >>= 1, r >>= 1) {
            if (l & 1)
                best = std::max(best, tree_[l++]);
            if (r & 1)
                best = std::max(best, tree_[--r]);
        }
        return best;
    }

  private:
    std::size_t n_;
    std::vector<std::int64_t> tree_;
};

// Band-count engine reusing one sorted value index across levels.
class BandCounter {
  public:
    explicit BandCounter(const std::vector<double>& values) : values_(values), sorted_(values) {
        std::sort(sorted_.begin(), sorted_.end());
        sorted_.erase(std::unique(sorted_.begin(), sorted_.end()), sorted_.end());
    }

    // best[j] = max(#in-band consecutive increments over subsequences ending at j)
    // = max(prefix max, 1 + max over earlier points within the band windows)
    std::int64_t count(double lower, double upper) const {
        const std::size_t n = values_.size();
        MaxSegTree tree(sorted_.size());
        std::int64_t prefmax = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const double xj = values_[j];
            std::int64_t inband = std::numeric_limits<std::int64_t>::min();
            // earlier value in [xj + lower, xj + upper)
            inband = std::max(inband, tree.query(rank_lower(xj + lower), rank_lower(xj + upper)));
            // earlier value in (xj - upper, xj - lower]
            inband = std::max(inband, tree.query(rank_upper(xj - upper), rank_upper(xj - lower)));
            std::int64_t best = prefmax; // extend with an out-of-band increment, or start here
            if (inband != std::numeric_limits<std::int64_t>::min())
                best = std::max(best, inband + 1);
            tree.update(rank_lower(xj), best);
            prefmax = std::max(prefmax, best);
        }
        return prefmax;
    }

    // smallest positive difference between any two values; inf if none
    double min_positive_gap() const {
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < sorted_.size(); ++i)
            gap = std::min(gap, sorted_[i] - sorted_[i - 1]);
        return gap;
    }

  private:
    std::size_t rank_lower(double v) const {
        return static_cast<std::size_t>(
            std::lower_bound(sorted_.begin(), sorted_.end(), v) - sorted_.begin());
    }
    std::size_t rank_upper(double v) const {
        return static_cast<std::size_t>(
            std::upper_bound(sorted_.begin(), sorted_.end(), v) - sorted_.begin());
    }

    const std::vector<double>& values_;
    std::vector<double> sorted_;
};

} // namespace

std::int64_t band_count(const SamplePath& path, int r) {
    if (path.size() <= 1)
        return 0;
    BandCounter counter(path.values);
    return counter.count(level_size_wide(r), level_size_wide(r - 1));
}

OscillationProfile dyadic_upper_bound(const SamplePath& path, double p, double a0) {
    check_p(p);
    if (!(a0 > 0.0) || !std::isfinite(a0))
        throw std::domain_error("dyadic_upper_bound: a0 must be positive");

    OscillationProfile prof;
    prof.p = p;
    prof.a0 = a0;
    if (path.size() <= 1)
        return prof;

    const double x0 = path.values.front();
    for (double x : path.values)
        prof.max_from_start = std::max(prof.max_from_start, std::abs(x - x0));
    prof.nu0 = oscillation_count(path, a0 / 2.0);

    BandCounter counter(path.values);
    const double gap = counter.min_positive_gap();
    double bound = 0.0;
    if (std::isfinite(gap)) {
        const int r1 = cutoff_level(a0);
        for (int r = r1 + 1; r < 1080; ++r) {
            const double upper = level_size_wide(r - 1);
            if (!(upper > gap))
                break; // no pairwise difference fits below this band
            const std::int64_t y = counter.count(level_size_wide(r), upper);
            if (y > 0) {
                prof.band_counts[r] = y;
                bound += std::exp2(-static_cast<double>(r) * p) * static_cast<double>(y);
            }
        }
    }
    bound += std::pow(2.0 * prof.max_from_start, p) * static_cast<double>(prof.nu0);
    prof.dyadic_bound = bound;
    return prof;
}

} // namespace pvarlab
