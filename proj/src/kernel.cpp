#include "pvarlab/kernel.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "pvarlab/io_util.hpp"
#include "pvarlab/parallel.hpp"
#include "pvarlab/rng.hpp"

namespace pvarlab {

namespace {

constexpr double kWilson99 = 2.5758293035489004; // two-sided 99% normal quantile

TailCell make_cell(double h, double a, std::uint64_t hits, std::uint64_t n) {
    TailCell cell;
    cell.h = h;
    cell.a = a;
    cell.n = n;
    const double nn = static_cast<double>(n);
    const double phat = static_cast<double>(hits) / nn;
    cell.alpha_hat = phat;
    const double z = kWilson99;
    const double denom = 1.0 + z * z / nn;
    const double center = (phat + z * z / (2.0 * nn)) / denom;
    const double hw =
        z * std::sqrt(phat * (1.0 - phat) / nn + z * z / (4.0 * nn * nn)) / denom;
    cell.ci_low = std::max(0.0, center - hw);
    cell.ci_high = std::min(1.0, center + hw);
    return cell;
}

// 3x3 linear solve by Gaussian elimination with partial pivoting
std::array<double, 3> solve3(std::array<std::array<double, 4>, 3> m) {
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::abs(m[row][col]) > std::abs(m[pivot][col]))
                pivot = row;
        std::swap(m[col], m[pivot]);
        if (m[col][col] == 0.0)
            throw std::runtime_error("fit_envelope: singular normal equations");
        for (int row = col + 1; row < 3; ++row) {
            const double f = m[row][col] / m[col][col];
            for (int k = col; k < 4; ++k)
                m[row][k] -= f * m[col][k];
        }
    }
    std::array<double, 3> x{};
    for (int row = 2; row >= 0; --row) {
        double s = m[row][3];
        for (int k = row + 1; k < 3; ++k)
            s -= m[row][k] * x[k];
        x[row] = s / m[row][row];
    }
    return x;
}

} // namespace

void write_tailgrid_csv(const TailGrid& grid, std::ostream& out) {
    out << "h,a,alpha_hat,n,ci_low,ci_high\n";
    for (const auto& c : grid.cells)
        out << fmt17(c.h) << ',' << fmt17(c.a) << ',' << fmt17(c.alpha_hat) << ',' << c.n << ','
            << fmt17(c.ci_low) << ',' << fmt17(c.ci_high) << '\n';
}

TailGrid read_tailgrid_csv(std::istream& in) {
    TailGrid grid;
    std::string line;
    if (!std::getline(in, line) || line != "h,a,alpha_hat,n,ci_low,ci_high")
        throw io_error("tail grid csv: bad header");
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream row(line);
        std::string field;
        std::array<std::string, 6> fields;
        for (int i = 0; i < 6; ++i) {
            if (!std::getline(row, fields[i], i == 5 ? '\n' : ','))
                throw io_error("tail grid csv: malformed row: " + line);
        }
        TailCell c;
        c.h = std::stod(fields[0]);
        c.a = std::stod(fields[1]);
        c.alpha_hat = std::stod(fields[2]);
        c.n = std::stoull(fields[3]);
        c.ci_low = std::stod(fields[4]);
        c.ci_high = std::stod(fields[5]);
        grid.cells.push_back(c);
    }
    return grid;
}

std::string to_string(FitVerdict v) {
    switch (v) {
    case FitVerdict::Member:
        return "member";
    case FitVerdict::Inconclusive:
        return "inconclusive";
    case FitVerdict::Rejected:
        return "rejected";
    }
    return "inconclusive";
}

FitVerdict fit_verdict_from_string(const std::string& s) {
    if (s == "member")
        return FitVerdict::Member;
    if (s == "rejected")
        return FitVerdict::Rejected;
    if (s == "inconclusive")
        return FitVerdict::Inconclusive;
    throw io_error("unknown fit verdict: " + s);
}

TailCell estimate_alpha(const ProcessSpec& spec, double h, double a, std::uint64_t n,
                        std::uint64_t seed) {
    spec.validate();
    if (!(h > 0.0) || !(h <= spec.horizon))
        throw std::invalid_argument("estimate_alpha: need 0 < h <= horizon");
    if (!(a > 0.0))
        throw std::invalid_argument("estimate_alpha: a must be positive");
    if (n < 1000)
        throw std::invalid_argument("estimate_alpha: need at least 1000 samples");

    constexpr std::uint64_t kBlock = 65536;
    const std::uint64_t blocks = (n + kBlock - 1) / kBlock;
    std::vector<std::uint64_t> hits(blocks, 0);
    parallel_for(blocks, [&](std::size_t b) {
        SplitMix64 rng(derive_stream(seed, b));
        const std::uint64_t lo = b * kBlock;
        const std::uint64_t hi = std::min(n, lo + kBlock);
        std::uint64_t count = 0;
        for (std::uint64_t i = lo; i < hi; ++i) {
            const double inc = sample_stable_increment(spec.alpha, spec.scale, h, rng);
            if (std::abs(inc) >= a)
                ++count;
        }
        hits[b] = count;
    });
    std::uint64_t total = 0;
    for (std::uint64_t hcount : hits)
        total += hcount;
    return make_cell(h, a, total, n);
}

KernelFit fit_envelope(const TailGrid& grid, double horizon) {
    for (const auto& c : grid.cells)
        if (!(c.h > 0.0) || !(c.h <= horizon) || !(c.a > 0.0))
            throw std::invalid_argument("fit_envelope: grid cell outside (0, horizon]");

    KernelFit fit;

    std::vector<const TailCell*> used;
    std::set<double> hs, as;
    for (const auto& c : grid.cells) {
        if (c.alpha_hat > 0.0 && c.alpha_hat < 0.5) {
            used.push_back(&c);
            hs.insert(c.h);
            as.insert(c.a);
        }
    }
    if (hs.size() < 3 || as.size() < 3) {
        fit.verdict = FitVerdict::Inconclusive;
        return fit;
    }

    // regress y = log alpha_hat on (1, log h, -log a)
    std::array<std::array<double, 4>, 3> normal{};
    for (const TailCell* c : used) {
        const double u[3] = {1.0, std::log(c->h), -std::log(c->a)};
        const double y = std::log(c->alpha_hat);
        for (int i = 0; i < 3; ++i) {
            for (int k = 0; k < 3; ++k)
                normal[i][k] += u[i] * u[k];
            normal[i][3] += u[i] * y;
        }
    }
    auto coeff = solve3(normal);
    double logK = coeff[0], beta = coeff[1], gamma = coeff[2];

    bool beta_clamped = false;
    if (beta < 1.0) {
        // refit (log K, gamma) with beta pinned at its smallest legal value
        beta = 1.0;
        beta_clamped = true;
        double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
        for (const TailCell* c : used) {
            const double y = std::log(c->alpha_hat) - beta * std::log(c->h);
            const double u = -std::log(c->a);
            s11 += 1.0;
            s12 += u;
            s22 += u * u;
            b1 += y;
            b2 += u * y;
        }
        const double det = s11 * s22 - s12 * s12;
        if (det == 0.0) {
            fit.verdict = FitVerdict::Inconclusive;
            return fit;
        }
        logK = (b1 * s22 - b2 * s12) / det;
        gamma = (s11 * b2 - s12 * b1) / det;
    }

    if (!(gamma > 0.0) || !std::isfinite(gamma) || !std::isfinite(logK)) {
        fit.verdict = FitVerdict::Rejected;
        return fit;
    }

    TailEnvelope env;
    env.K = std::exp(logK);
    env.beta = beta;
    env.gamma = gamma;
    env.a0 = *as.rbegin(); // largest a taking part in the fit
    env.validate();

    double residual = 0.0;
    for (const TailCell* c : used) {
        const double model = std::log(env.value(c->h, c->a));
        residual = std::max(residual, std::abs(std::log(c->alpha_hat) - model));
    }

    fit.has_envelope = true;
    fit.envelope = env;
    fit.residual = residual;

    if (beta_clamped) {
        fit.verdict = FitVerdict::Rejected;
        return fit;
    }

    bool all_within = true;
    for (const auto& c : grid.cells) {
        // the trailing factor absorbs fit round-off on noiseless grids
        const double rhs = env.value(c.h, c.a) * (1.0 + c.ci_half_width()) * (1.0 + 1e-9);
        if (c.alpha_hat > rhs) {
            all_within = false;
            break;
        }
    }
    fit.verdict = all_within ? FitVerdict::Member : FitVerdict::Rejected;
    return fit;
}

OttavianiResult ottaviani_check(const ProcessSpec& spec, double t, double h, double M,
                                std::uint64_t n_paths, std::uint64_t seed) {
    spec.validate();
    if (!(t >= 0.0) || !(t < spec.horizon))
        throw std::invalid_argument("ottaviani_check: t must lie in [0, horizon)");
    if (!(h > 0.0) || !(M > 0.0))
        throw std::invalid_argument("ottaviani_check: h and M must be positive");
    if (n_paths < 1000)
        throw std::invalid_argument("ottaviani_check: need at least 1000 paths");

    const double h_eff = std::min(h, spec.horizon - t);

    // denominator estimate first; refuse when it is too uncertain
    const TailCell denom_cell =
        estimate_alpha(spec, h_eff, M / 2.0, std::max<std::uint64_t>(n_paths, 1000),
                       derive_stream(seed, 0x0774));
    if (denom_cell.alpha_hat >= 0.5)
        throw std::domain_error("ottaviani_check: estimated alpha(h, M/2) >= 1/2, refusing");

    // fine inner mesh: the increment law of a Levy path does not depend on t,
    // so simulate the window [t, t + h_eff] as 256 increments from 0
    constexpr std::size_t kIncrements = 256;
    const double dt = h_eff / static_cast<double>(kIncrements);

    std::vector<std::uint8_t> sup_hit(n_paths, 0), end_hit(n_paths, 0);
    parallel_for(n_paths, [&](std::size_t i) {
        SplitMix64 rng(derive_stream(seed, 1, i));
        double x = 0.0, extreme = 0.0;
        for (std::size_t k = 0; k < kIncrements; ++k) {
            x += sample_stable_increment(spec.alpha, spec.scale, dt, rng);
            extreme = std::max(extreme, std::abs(x));
        }
        sup_hit[i] = extreme > M ? 1 : 0;
        end_hit[i] = std::abs(x) > M / 2.0 ? 1 : 0;
    });

    std::uint64_t sup_count = 0, end_count = 0;
    for (std::uint64_t i = 0; i < n_paths; ++i) {
        sup_count += sup_hit[i];
        end_count += end_hit[i];
    }

    const double nn = static_cast<double>(n_paths);
    const double lhs = static_cast<double>(sup_count) / nn;
    const double num = static_cast<double>(end_count) / nn;
    const double ahat = denom_cell.alpha_hat;
    const double rhs = num / (1.0 - ahat);

    const double se_lhs = std::sqrt(lhs * (1.0 - lhs) / nn);
    const double se_num = std::sqrt(num * (1.0 - num) / nn);
    const double se_ahat =
        std::sqrt(ahat * (1.0 - ahat) / static_cast<double>(denom_cell.n));
    const double one_minus = 1.0 - ahat;
    const double se_rhs = std::sqrt(se_num * se_num / (one_minus * one_minus) +
                                    num * num * se_ahat * se_ahat /
                                        (one_minus * one_minus * one_minus * one_minus));

    OttavianiResult result;
    result.lhs = lhs;
    result.rhs = rhs;
    result.alpha_hat = ahat;
    result.slack = 3.0 * std::sqrt(se_lhs * se_lhs + se_rhs * se_rhs);
    result.holds = lhs <= rhs + result.slack;
    return result;
}

} // namespace pvarlab
