#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pvarlab/core.hpp"
#include "pvarlab/simulate.hpp"

namespace pvarlab {

/// One Monte Carlo estimate of the transition tail at (h, a), with a
/// Wilson-score 99% confidence interval.
struct TailCell {
    double h = 0.0;
    double a = 0.0;
    double alpha_hat = 0.0;
    std::uint64_t n = 0;
    double ci_low = 0.0;
    double ci_high = 0.0;

    double ci_half_width() const { return (ci_high - ci_low) / 2.0; }
};

struct TailGrid {
    std::vector<TailCell> cells;
};

/// CSV with header "h,a,alpha_hat,n,ci_low,ci_high".
void write_tailgrid_csv(const TailGrid& grid, std::ostream& out);
TailGrid read_tailgrid_csv(std::istream& in);

enum class FitVerdict { Member, Inconclusive, Rejected };

std::string to_string(FitVerdict v);
FitVerdict fit_verdict_from_string(const std::string& s);

/// Result of fitting the power-law envelope to a tail grid.
struct KernelFit {
    bool has_envelope = false;
    TailEnvelope envelope;
    double residual = 0.0; // max |log alpha_hat - log model| over fit cells
    FitVerdict verdict = FitVerdict::Inconclusive;
};

/// Estimate the tail alpha(h, a) for a stable Levy spec by Monte Carlo: the
/// fraction of n draws of |increment over h| that reach a. For this family
/// the sup over start times collapses to lag exactly h. Requires n >= 1000.
TailCell estimate_alpha(const ProcessSpec& spec, double h, double a, std::uint64_t n,
                        std::uint64_t seed);

/// Least-squares fit of log alpha_hat = log K + beta log h - gamma log a over
/// cells with alpha_hat in (0, 1/2). Needs at least 3 distinct h and 3
/// distinct a among qualifying cells; beta is clamped to >= 1 (a raw fit
/// below 1 yields verdict Rejected); a0 is the largest qualifying a. Verdict
/// Member requires every grid cell to satisfy the envelope inequality within
/// its confidence slack.
KernelFit fit_envelope(const TailGrid& grid, double horizon);

/// Both sides of the running-supremum inequality
///   P(sup_{s in [t,(t+h)^T]} |x_s - x_t| > M)
///     <= P(|x_{(t+h)^T} - x_t| > M/2) / (1 - alpha(h, M/2)),
/// estimated by Monte Carlo. The supremum is the discretized maximum over a
/// fine inner mesh (an under-estimate, which only makes the asserted
/// inequality easier to satisfy).
struct OttavianiResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double alpha_hat = 0.0; // estimated tail at (h, M/2)
    double slack = 0.0;     // 3 combined standard errors
    bool holds = false;
};

/// Refuses (throws std::domain_error) when the estimated alpha(h, M/2)
/// reaches 1/2. Uses an inner mesh of at least 256 increments.
OttavianiResult ottaviani_check(const ProcessSpec& spec, double t, double h, double M,
                                std::uint64_t n_paths, std::uint64_t seed);

} // namespace pvarlab
