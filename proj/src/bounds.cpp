#include "pvarlab/bounds.hpp"

#include <cmath>

#include "json.hpp"

namespace pvarlab {

double lower_incomplete_gamma(double a, double x) {
    if (!(a > 0.0) || !std::isfinite(a))
        throw std::domain_error("lower_incomplete_gamma: a must be positive");
    if (!(x >= 0.0) || !(x <= 3.0))
        throw std::domain_error("lower_incomplete_gamma: x must lie in [0, 3]");
    if (x == 0.0)
        return 0.0;

    // extended precision keeps the alternating cancellation harmless
    const long double xl = x, al = a;
    long double sum = 1.0L / al; // k = 0
    long double xk = 1.0L;       // x^k / k!
    for (int k = 1; k < 400; ++k) {
        xk *= xl / k;
        const long double term = xk / (k + al);
        if (term < 1e-16L * std::abs(sum))
            break; // alternating tail: remainder below the first omitted term
        sum += (k & 1) ? -term : term;
    }
    return static_cast<double>(std::pow(xl, al) * sum);
}

double gamma_series_upper(double a, double x) {
    if (!(a > 0.0) || !std::isfinite(a))
        throw std::domain_error("gamma_series_upper: a must be positive");
    if (!(x >= 0.0) || !(x < 3.0 * (3.0 + a) / (2.0 + a)))
        throw std::domain_error("gamma_series_upper: x outside validity window");
    return std::pow(x, a) / a * (1.0 - a / (a + 1.0) * x + a / (2.0 * (a + 2.0)) * x * x);
}

double gamma_one_gap(double a) {
    if (!(a >= 1.0))
        throw std::domain_error("gamma_one_gap: a must be >= 1");
    return a * lower_incomplete_gamma(a, 1.0) - std::exp(-1.0);
}

namespace {

double clamped_scale(int r, const TailEnvelope& env) {
    return std::min(dyadic_size(r + 2), env.a0);
}

} // namespace

double duration_tail_bound(double u, int r, const TailEnvelope& env) {
    env.validate();
    if (!(u >= 0.0) || !std::isfinite(u))
        throw std::domain_error("duration_tail_bound: u must be nonnegative");
    const double e = env.value(u, dyadic_size(r + 2));
    if (!(e < 1.0))
        throw vacuous_bound_error("duration_tail_bound: envelope value >= 1");
    return e / (1.0 - e);
}

double laplace_duration_bound(double t0, int r, const TailEnvelope& env) {
    env.validate();
    if (!(t0 > 0.0) || !(t0 <= 1.0))
        throw std::domain_error("laplace_duration_bound: t0 must lie in (0, 1]");
    const double m = clamped_scale(r, env);
    const double envelope_value = env.K * std::pow(t0, env.beta) / std::pow(m, env.gamma);
    if (!(envelope_value <= 0.5))
        throw std::domain_error("laplace_duration_bound: envelope value exceeds 1/2");
    // gamma(beta+1, t0) = -t0^beta e^(-t0) + beta gamma(beta, t0)
    const double g = env.beta * lower_incomplete_gamma(env.beta, t0) -
                     std::pow(t0, env.beta) * std::exp(-t0);
    return std::exp(-t0) + 2.0 * env.K / std::pow(m, env.gamma) * g;
}

double safe_horizon(int r, const TailEnvelope& env, double horizon) {
    env.validate();
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("safe_horizon: horizon must be positive");
    const double m = clamped_scale(r, env);
    const double first = std::pow(std::pow(m, env.gamma) / (2.0 * env.K), 1.0 / env.beta);
    return std::min({first, horizon, 1.0});
}

double excursion_laplace_bound(int r, const TailEnvelope& env, double horizon) {
    const double tr = safe_horizon(r, env, horizon);
    if (tr < 1.0)
        return env.beta * lower_incomplete_gamma(env.beta, tr) / std::pow(tr, env.beta);
    return std::exp(-1.0) + 7.0 / 24.0;
}

double stopping_tail_bound(int j, int r, const TailEnvelope& env, double horizon) {
    if (j < 1)
        throw std::invalid_argument("stopping_tail_bound: j must be >= 1");
    return std::exp(horizon) * std::pow(excursion_laplace_bound(r, env, horizon), j);
}

double expected_band_bound(int r, const TailEnvelope& env, double horizon) {
    const double tr = safe_horizon(r, env, horizon);
    if (tr < 1.0)
        return 4.0 / tr * std::exp(horizon);
    return 1.95 * std::exp(horizon);
}

double tail_constant(const TailEnvelope& env, double horizon, double p) {
    env.validate();
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("tail_constant: horizon must be positive");
    const double pstar = env.critical_exponent();
    if (!(p > pstar))
        throw std::domain_error("tail_constant: need p > gamma/beta");
    const double r1p1 = static_cast<double>(cutoff_level(env.a0) + 1);
    const double first =
        (6.0 + 4.0 / horizon) * std::exp2(-r1p1 * p) / (1.0 - std::exp2(-p));
    const double second = std::pow(env.K, 1.0 / env.beta) *
                          std::exp2(2.0 + (3.0 * env.gamma + 1.0) / env.beta -
                                    r1p1 * (p - pstar)) /
                          (1.0 - std::exp2(-(p - pstar)));
    return 2.0 * std::exp(horizon) * (first + second);
}

BoundReport make_bound_report(const TailEnvelope& env, double horizon,
                              const std::vector<int>& r_values, const std::vector<int>& j_values,
                              std::optional<double> p) {
    env.validate();
    BoundReport report;
    report.envelope = env;
    report.horizon = horizon;
    for (int r : r_values) {
        LevelBounds lb;
        lb.r = r;
        lb.safe_horizon = safe_horizon(r, env, horizon);
        lb.laplace = excursion_laplace_bound(r, env, horizon);
        lb.ey_bound = expected_band_bound(r, env, horizon);
        report.levels.push_back(lb);
        for (int j : j_values)
            report.tau_tails.push_back({j, r, stopping_tail_bound(j, r, env, horizon)});
    }
    if (p && *p > env.critical_exponent()) {
        report.p = *p;
        report.c1 = tail_constant(env, horizon, *p);
    }
    return report;
}

std::string bound_report_json(const BoundReport& report) {
    nlohmann::ordered_json j;
    j["envelope"] = {{"K", report.envelope.K},
                     {"beta", report.envelope.beta},
                     {"gamma", report.envelope.gamma},
                     {"a0", report.envelope.a0},
                     {"pstar", report.envelope.critical_exponent()}};
    j["T"] = report.horizon;
    j["levels"] = nlohmann::ordered_json::array();
    for (const auto& lb : report.levels)
        j["levels"].push_back({{"r", lb.r},
                               {"Tr", lb.safe_horizon},
                               {"laplace", lb.laplace},
                               {"ey_bound", lb.ey_bound}});
    j["tau_tails"] = nlohmann::ordered_json::array();
    for (const auto& tb : report.tau_tails)
        j["tau_tails"].push_back({{"j", tb.j}, {"r", tb.r}, {"bound", tb.bound}});
    if (report.c1)
        j["C1"] = *report.c1;
    else
        j["C1"] = nullptr;
    return j.dump(2) + "\n";
}

} // namespace pvarlab
