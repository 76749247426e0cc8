#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pvarlab/core.hpp"

namespace pvarlab {

/// Raised when an envelope evaluation reaches 1 and the e/(1-e) form carries
/// no information.
struct vacuous_bound_error : std::domain_error {
    using std::domain_error::domain_error;
};

/// Lower incomplete gamma gamma(a, x) = int_0^x u^(a-1) e^(-u) du, evaluated
/// by the alternating series sum_k (-1)^k x^(k+a) / (k! (k+a)). Restricted to
/// 0 <= x <= 3 where the series is numerically benign.
double lower_incomplete_gamma(double a, double x);

/// Three-term upper bound (x^a/a)(1 - a x/(a+1) + a x^2/(2(a+2))), valid for
/// 0 <= x < 3(3+a)/(2+a); strictly above gamma(a, x) for x > 0.
double gamma_series_upper(double a, double x);

/// a * gamma(a, 1) - 1/e for a >= 1; lies strictly inside (0, 7/24).
double gamma_one_gap(double a);

/// Bound e/(1-e) on the probability that a level-r excursion completes within
/// time u, where e is the envelope value at (u, M_{r+2}). Throws
/// vacuous_bound_error when e >= 1.
double duration_tail_bound(double u, int r, const TailEnvelope& env);

/// Bound exp(-t0) + 2K (M_{r+2} ^ a0)^(-gamma) gamma(beta+1, t0) on the
/// Laplace transform E e^(-zeta) of a level-r excursion duration. Requires
/// the envelope value at (t0, M_{r+2}) to be at most 1/2.
double laplace_duration_bound(double t0, int r, const TailEnvelope& env);

/// The time window T_r = min{ ((M_{r+2} ^ a0)^gamma / (2K))^(1/beta), T, 1 }
/// over which the envelope at scale M_{r+2} stays at or below 1/2.
double safe_horizon(int r, const TailEnvelope& env, double horizon);

/// Per-excursion Laplace bound: beta gamma(beta, T_r) T_r^(-beta) when
/// T_r < 1, and 1/e + 7/24 when T_r = 1. Always strictly below 1.
double excursion_laplace_bound(int r, const TailEnvelope& env, double horizon);

/// Bound e^T (excursion bound)^j on the probability of at least j level-r
/// range exceedances by time T. Returned unclamped; may exceed 1.
double stopping_tail_bound(int j, int r, const TailEnvelope& env, double horizon);

/// Bound on the expected level-r band count: 4 e^T / T_r when T_r < 1, and
/// 1.95 e^T when T_r = 1.
double expected_band_bound(int r, const TailEnvelope& env, double horizon);

/// The constant C1(K, T, p, beta, gamma, a0) of the small-band tail chain:
///   2 e^T { (6 + 4/T) 2^(-(r1+1)p) / (1 - 2^(-p))
///           + K^(1/beta) 2^(2+(3 gamma+1)/beta - (r1+1)(p - gamma/beta))
///             / (1 - 2^(-(p - gamma/beta))) }.
/// Requires p strictly above the critical exponent gamma/beta.
double tail_constant(const TailEnvelope& env, double horizon, double p);

struct LevelBounds {
    int r = 0;
    double safe_horizon = 0.0;
    double laplace = 0.0;
    double ey_bound = 0.0;
};

struct TailBoundEntry {
    int j = 0;
    int r = 0;
    double bound = 0.0;
};

/// Evaluated closed-form quantities for one envelope and horizon.
struct BoundReport {
    TailEnvelope envelope;
    double horizon = 0.0;
    std::vector<LevelBounds> levels;
    std::vector<TailBoundEntry> tau_tails;
    std::optional<double> c1;
    std::optional<double> p; // exponent behind c1, when set
};

BoundReport make_bound_report(const TailEnvelope& env, double horizon,
                              const std::vector<int>& r_values, const std::vector<int>& j_values,
                              std::optional<double> p);

/// JSON with keys: envelope, T, levels [{r, Tr, laplace, ey_bound}],
/// tau_tails [{j, r, bound}], C1 (null when p <= gamma/beta or unset).
std::string bound_report_json(const BoundReport& report);

} // namespace pvarlab
