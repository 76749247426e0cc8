#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace pvarlab {

/// Distance between two states on the real line.
inline double metric(double x, double y) { return std::abs(x - y); }

/// Size of dyadic level r: exactly 2^(-r-1). Valid for |r| <= 60.
inline double dyadic_size(int r) {
    if (r < -60 || r > 60)
        throw std::domain_error("dyadic_size: level out of range, need |r| <= 60");
    return std::ldexp(1.0, -r - 1);
}

/// Dyadic size classification scale, as a value type.
struct DyadicLevel {
    int r = 0;
    double size() const { return dyadic_size(r); }
};

/// Coarsest dyadic level taking part in the small-band decomposition for
/// threshold a0: the largest integer <= -(log2(a0) + 3).
inline int cutoff_level(double a0) {
    if (!(a0 > 0.0) || !std::isfinite(a0))
        throw std::domain_error("cutoff_level: a0 must be positive and finite");
    return static_cast<int>(std::floor(-(std::log2(a0) + 3.0)));
}

/// A finite sampled trajectory on [0, horizon].
///
/// Invariants (checked by validate()): at least one sample, times strictly
/// increasing, times.front() == 0, times.back() == horizon, all values finite.
struct SamplePath {
    std::vector<double> times;
    std::vector<double> values;
    double horizon = 0.0;

    std::size_t size() const { return times.size(); }
    void validate() const;
};

/// Power-law envelope K * h^beta / (min(a, a0))^gamma dominating the
/// transition tail function of a process. beta >= 1, gamma > 0, K > 0, a0 > 0.
struct TailEnvelope {
    double K = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    double a0 = 1.0;

    void validate() const;
    double critical_exponent() const { return gamma / beta; }

    /// Envelope value at time window h and distance a.
    double value(double h, double a) const {
        return K * std::pow(h, beta) / std::pow(std::min(a, a0), gamma);
    }
};

} // namespace pvarlab
