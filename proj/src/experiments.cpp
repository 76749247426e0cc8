#include "pvarlab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>

#include "json.hpp"

#include "pvarlab/io_util.hpp"
#include "pvarlab/parallel.hpp"
#include "pvarlab/pvar.hpp"
#include "pvarlab/rng.hpp"

namespace pvarlab {

using nlohmann::ordered_json;

void ExperimentConfig::validate() const {
    process.validate();
    for (std::size_t i = 1; i < mesh_ladder.size(); ++i)
        if (!(mesh_ladder[i] > mesh_ladder[i - 1]))
            throw config_error("config: mesh_ladder must be strictly increasing");
    for (std::size_t i = 0; i < mesh_ladder.size(); ++i)
        if (mesh_ladder[i] < 1)
            throw config_error("config: mesh sizes must be >= 1");
    for (std::size_t i = 1; i < p_grid.size(); ++i)
        if (!(p_grid[i] >= p_grid[i - 1]))
            throw config_error("config: p_grid must be sorted");
    for (double p : p_grid)
        if (!(p > 0.0))
            throw config_error("config: p values must be positive");
    if (n_paths < 1)
        throw config_error("config: n_paths must be >= 1");
    if (!(a0 > 0.0))
        throw config_error("config: a0 must be positive");
    if (!(growth_factor > 1.0))
        throw config_error("config: growth_factor must exceed 1");
    if (!(stabilize_rel > 0.0))
        throw config_error("config: stabilize_rel must be positive");
    if (envelope)
        envelope->validate();
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) {
                out.push_back(cur);
                cur.clear();
            }
        } else
            cur.push_back(c);
    }
    if (!cur.empty())
        out.push_back(cur);
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size())
            throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw config_error("config: bad number for " + key + ": " + v);
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const std::uint64_t u = std::stoull(v, &used);
        if (used != v.size())
            throw std::invalid_argument(v);
        return u;
    } catch (const std::exception&) {
        throw config_error("config: bad integer for " + key + ": " + v);
    }
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& item : split_list(v))
        out.push_back(parse_double(key, item));
    return out;
}

std::string format_double_compact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

} // namespace

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::optional<double> env_K, env_beta, env_gamma, env_a0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.resize(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw config_error("config line " + std::to_string(lineno) + ": empty key or value");

        if (key == "family") {
            if (value != "stable-levy")
                throw config_error("config: unknown family: " + value);
        } else if (key == "alpha")
            cfg.process.alpha = parse_double(key, value);
        else if (key == "c")
            cfg.process.scale = parse_double(key, value);
        else if (key == "T")
            cfg.process.horizon = parse_double(key, value);
        else if (key == "mesh_ladder") {
            cfg.mesh_ladder.clear();
            for (const auto& item : split_list(value))
                cfg.mesh_ladder.push_back(static_cast<std::size_t>(parse_u64(key, item)));
        } else if (key == "p_grid")
            cfg.p_grid = parse_double_list(key, value);
        else if (key == "n_paths")
            cfg.n_paths = static_cast<std::size_t>(parse_u64(key, value));
        else if (key == "seed")
            cfg.seed = parse_u64(key, value);
        else if (key == "a0")
            cfg.a0 = parse_double(key, value);
        else if (key == "out_dir")
            cfg.out_dir = value;
        else if (key == "growth_factor")
            cfg.growth_factor = parse_double(key, value);
        else if (key == "stabilize_rel")
            cfg.stabilize_rel = parse_double(key, value);
        else if (key == "h_values")
            cfg.h_values = parse_double_list(key, value);
        else if (key == "a_values")
            cfg.a_values = parse_double_list(key, value);
        else if (key == "samples_per_cell")
            cfg.samples_per_cell = parse_u64(key, value);
        else if (key == "r_values") {
            cfg.r_values.clear();
            for (const auto& item : split_list(value))
                cfg.r_values.push_back(static_cast<int>(parse_double(key, item)));
        } else if (key == "j_values") {
            cfg.j_values.clear();
            for (const auto& item : split_list(value))
                cfg.j_values.push_back(static_cast<int>(parse_double(key, item)));
        } else if (key == "ott_h")
            cfg.ott_h = parse_double_list(key, value);
        else if (key == "ott_M")
            cfg.ott_M = parse_double_list(key, value);
        else if (key == "ott_paths")
            cfg.ott_paths = parse_u64(key, value);
        else if (key == "K")
            env_K = parse_double(key, value);
        else if (key == "beta")
            env_beta = parse_double(key, value);
        else if (key == "gamma")
            env_gamma = parse_double(key, value);
        else if (key == "env_a0")
            env_a0 = parse_double(key, value);
        else if (key == "p")
            cfg.p = parse_double(key, value);
        else if (key == "n")
            cfg.sim_n = static_cast<std::size_t>(parse_u64(key, value));
        else
            throw config_error("config: unknown key: " + key);
    }

    if (env_K || env_beta || env_gamma) {
        if (!(env_K && env_beta && env_gamma))
            throw config_error("config: an envelope needs all of K, beta, gamma");
        TailEnvelope env;
        env.K = *env_K;
        env.beta = *env_beta;
        env.gamma = *env_gamma;
        env.a0 = env_a0 ? *env_a0 : cfg.a0;
        cfg.envelope = env;
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config_file(const std::string& filename) {
    std::ifstream in(filename);
    if (!in)
        throw io_error("cannot open config: " + filename);
    return parse_config(in);
}

double percentile(std::vector<double> sample, double q) {
    if (sample.empty())
        throw std::invalid_argument("percentile: empty sample");
    std::sort(sample.begin(), sample.end());
    const double pos = q * static_cast<double>(sample.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sample.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return sample[lo] * (1.0 - w) + sample[hi] * w;
}

std::string classify_medians(const std::vector<double>& medians, double growth_factor,
                             double stabilize_rel) {
    const std::size_t k = medians.size();
    if (k >= 2) {
        bool monotone = true;
        for (std::size_t i = 1; i < k; ++i)
            if (!(medians[i] >= medians[i - 1]))
                monotone = false;
        if (monotone && medians.front() > 0.0 &&
            medians.back() / medians.front() >= growth_factor)
            return "diverging";
        if (medians[k - 2] > 0.0 &&
            std::abs(medians[k - 1] - medians[k - 2]) / medians[k - 2] <= stabilize_rel)
            return "stabilizing";
        if (medians[k - 2] == 0.0 && medians[k - 1] == 0.0)
            return "stabilizing";
    }
    return "indeterminate";
}

namespace {

std::int64_t elapsed_ms(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 start)
        .count();
}

std::vector<int> default_r_values(const TailEnvelope& env) {
    std::vector<int> rs;
    const int r1 = cutoff_level(env.a0);
    for (int r = r1 + 1; r <= r1 + 8; ++r)
        rs.push_back(r);
    return rs;
}

std::optional<double> pick_c1_exponent(const ExperimentConfig& cfg, const TailEnvelope& env) {
    if (cfg.p && *cfg.p > env.critical_exponent())
        return cfg.p;
    for (double p : cfg.p_grid)
        if (p > env.critical_exponent())
            return p;
    return std::nullopt;
}

} // namespace

RunManifest run_sharpness(const ExperimentConfig& config) {
    config.validate();
    if (config.mesh_ladder.empty())
        throw config_error("run_sharpness: mesh_ladder must not be empty");
    const auto start = std::chrono::steady_clock::now();

    RunManifest man;
    man.kind = "sharpness";
    man.config = config;

    const std::size_t np = config.p_grid.size();
    std::vector<std::vector<double>> medians(np); // per p, across meshes

    for (std::size_t mi = 0; mi < config.mesh_ladder.size(); ++mi) {
        const std::size_t mesh_n = config.mesh_ladder[mi];
        std::vector<std::vector<double>> vp(np, std::vector<double>(config.n_paths));
        parallel_for(config.n_paths, [&](std::size_t i) {
            const SamplePath path =
                simulate_path(config.process, MeshSpec{mesh_n}, derive_stream(config.seed, mi, i));
            const SamplePath reduced = extrema_reduce(path);
            for (std::size_t pi = 0; pi < np; ++pi) {
                const double p = config.p_grid[pi];
                // the extrema reduction preserves the value only for p >= 1
                vp[pi][i] = p >= 1.0 ? pvar_exact(reduced, p) : pvar_exact(path, p);
            }
        });
        for (std::size_t pi = 0; pi < np; ++pi) {
            SummaryCell cell;
            cell.mesh_n = mesh_n;
            cell.p = config.p_grid[pi];
            cell.median = percentile(vp[pi], 0.5);
            cell.p05 = percentile(vp[pi], 0.05);
            cell.p95 = percentile(vp[pi], 0.95);
            medians[pi].push_back(cell.median);
            man.summary.push_back(cell);
        }
    }

    for (std::size_t pi = 0; pi < np; ++pi) {
        const std::string label =
            classify_medians(medians[pi], config.growth_factor, config.stabilize_rel);
        for (auto& cell : man.summary)
            if (cell.p == config.p_grid[pi])
                cell.classification = label;
    }

    man.wall_clock_ms = elapsed_ms(start);
    return man;
}

RunManifest run_membership(const ExperimentConfig& config) {
    config.validate();
    if (config.h_values.empty() || config.a_values.empty())
        throw config_error("run_membership: h_values and a_values must not be empty");
    const auto start = std::chrono::steady_clock::now();

    RunManifest man;
    man.kind = "membership";
    man.config = config;

    std::size_t cell_index = 0;
    for (double h : config.h_values)
        for (double a : config.a_values)
            man.tailgrid.cells.push_back(estimate_alpha(
                config.process, h, a, config.samples_per_cell,
                derive_stream(config.seed, 0x7a11u, cell_index++)));

    const KernelFit fit = fit_envelope(man.tailgrid, config.process.horizon);
    man.fit = fit;
    if (fit.has_envelope) {
        const auto rs = config.r_values.empty() ? default_r_values(fit.envelope) : config.r_values;
        const auto js = config.j_values.empty() ? std::vector<int>{1, 2, 3} : config.j_values;
        man.bounds = make_bound_report(fit.envelope, config.process.horizon, rs, js,
                                       pick_c1_exponent(config, fit.envelope));
    }
    man.wall_clock_ms = elapsed_ms(start);
    return man;
}

RunManifest run_bound_validation(const ExperimentConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();

    RunManifest man;
    man.kind = "bound-validation";
    man.config = config;

    TailEnvelope env;
    if (config.envelope)
        env = *config.envelope;
    else if (!config.h_values.empty() && !config.a_values.empty()) {
        TailGrid grid;
        std::size_t cell_index = 0;
        for (double h : config.h_values)
            for (double a : config.a_values)
                grid.cells.push_back(estimate_alpha(config.process, h, a, config.samples_per_cell,
                                                    derive_stream(config.seed, 0x7a11u,
                                                                  cell_index++)));
        const KernelFit fit = fit_envelope(grid, config.process.horizon);
        if (!fit.has_envelope)
            throw config_error("run_bound_validation: envelope fit inconclusive; "
                               "give an analytic envelope");
        man.tailgrid = grid;
        man.fit = fit;
        env = fit.envelope;
    } else
        throw config_error("run_bound_validation: need an envelope (K, beta, gamma) "
                           "or a tail grid to fit one");

    if (config.mesh_ladder.empty())
        throw config_error("run_bound_validation: mesh_ladder must not be empty");
    const std::size_t mesh_n = config.mesh_ladder.front();
    const double T = config.process.horizon;
    const auto rs = config.r_values.empty() ? default_r_values(env) : config.r_values;
    const auto js = config.j_values.empty() ? std::vector<int>{1, 2, 3} : config.j_values;
    const std::size_t np = config.p_grid.size();
    const std::size_t n_paths = config.n_paths;

    // per-path statistics, filled concurrently, folded in index order
    std::vector<std::vector<double>> dyadic_margin(np, std::vector<double>(n_paths));
    std::vector<std::vector<std::uint8_t>> dyadic_ok(np, std::vector<std::uint8_t>(n_paths));
    std::vector<std::vector<std::size_t>> tau_counts(rs.size(),
                                                     std::vector<std::size_t>(n_paths));
    std::vector<std::vector<double>> band(rs.size(), std::vector<double>(n_paths));

    parallel_for(n_paths, [&](std::size_t i) {
        const SamplePath path =
            simulate_path(config.process, MeshSpec{mesh_n}, derive_stream(config.seed, 0xeb, i));
        for (std::size_t pi = 0; pi < np; ++pi) {
            const double p = config.p_grid[pi];
            const double vp = pvar_exact(path, p);
            const OscillationProfile prof = dyadic_upper_bound(path, p, config.a0);
            dyadic_ok[pi][i] = vp <= prof.dyadic_bound ? 1 : 0;
            dyadic_margin[pi][i] = prof.dyadic_bound - vp;
        }
        for (std::size_t ri = 0; ri < rs.size(); ++ri) {
            tau_counts[ri][i] = stopping_times(path, rs[ri]).count();
            band[ri][i] = static_cast<double>(band_count(path, rs[ri]));
        }
    });

    for (std::size_t pi = 0; pi < np; ++pi) {
        CheckResult check;
        check.name = "dyadic_bound p=" + format_double_compact(config.p_grid[pi]);
        std::size_t violations = 0;
        double min_margin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n_paths; ++i) {
            if (!dyadic_ok[pi][i])
                ++violations;
            min_margin = std::min(min_margin, dyadic_margin[pi][i]);
        }
        check.passed = violations == 0;
        check.margin = min_margin;
        check.detail = std::to_string(violations) + " violations over " +
                       std::to_string(n_paths) + " paths";
        man.checks.push_back(check);
    }

    const double nn = static_cast<double>(n_paths);
    for (std::size_t ri = 0; ri < rs.size(); ++ri) {
        for (int j : js) {
            std::size_t hits = 0;
            for (std::size_t i = 0; i < n_paths; ++i)
                if (tau_counts[ri][i] >= static_cast<std::size_t>(j))
                    ++hits;
            const double phat = static_cast<double>(hits) / nn;
            const double se = std::sqrt(phat * (1.0 - phat) / nn);
            const double bound = stopping_tail_bound(j, rs[ri], env, T);
            CheckResult check;
            check.name = "tau_tail r=" + std::to_string(rs[ri]) + " j=" + std::to_string(j);
            check.margin = bound + 3.0 * se - phat;
            check.passed = check.margin >= 0.0;
            check.detail = "empirical " + format_double_compact(phat) + " vs bound " +
                           format_double_compact(bound);
            man.checks.push_back(check);
        }

        double mean = 0.0;
        for (std::size_t i = 0; i < n_paths; ++i)
            mean += band[ri][i];
        mean /= nn;
        double var = 0.0;
        for (std::size_t i = 0; i < n_paths; ++i)
            var += (band[ri][i] - mean) * (band[ri][i] - mean);
        var = n_paths > 1 ? var / (nn - 1.0) : 0.0;
        const double se = std::sqrt(var / nn);
        const double bound = expected_band_bound(rs[ri], env, T);
        CheckResult check;
        check.name = "band_mean r=" + std::to_string(rs[ri]);
        check.margin = bound + 3.0 * se - mean;
        check.passed = check.margin >= 0.0;
        check.detail = "empirical mean " + format_double_compact(mean) + " vs bound " +
                       format_double_compact(bound);
        man.checks.push_back(check);
    }

    std::size_t ott_index = 0;
    for (double h : config.ott_h) {
        for (double M : config.ott_M) {
            const OttavianiResult res = ottaviani_check(config.process, 0.0, h, M,
                                                        config.ott_paths,
                                                        derive_stream(config.seed, 0x0aa, ott_index++));
            CheckResult check;
            check.name = "ottaviani h=" + format_double_compact(h) +
                         " M=" + format_double_compact(M);
            check.margin = res.rhs + res.slack - res.lhs;
            check.passed = res.holds;
            check.detail = "lhs " + format_double_compact(res.lhs) + " vs rhs " +
                           format_double_compact(res.rhs);
            man.checks.push_back(check);
        }
    }

    man.bounds = make_bound_report(env, T, rs, js, pick_c1_exponent(config, env));
    man.wall_clock_ms = elapsed_ms(start);
    return man;
}

namespace {

ordered_json envelope_to_json(const TailEnvelope& env) {
    return {{"K", env.K},
            {"beta", env.beta},
            {"gamma", env.gamma},
            {"a0", env.a0},
            {"pstar", env.critical_exponent()}};
}

TailEnvelope envelope_from_json(const ordered_json& j) {
    TailEnvelope env;
    env.K = j.at("K").get<double>();
    env.beta = j.at("beta").get<double>();
    env.gamma = j.at("gamma").get<double>();
    env.a0 = j.at("a0").get<double>();
    return env;
}

ordered_json config_to_json(const ExperimentConfig& cfg) {
    ordered_json j;
    j["family"] = "stable-levy";
    j["alpha"] = cfg.process.alpha;
    j["c"] = cfg.process.scale;
    j["T"] = cfg.process.horizon;
    j["mesh_ladder"] = cfg.mesh_ladder;
    j["p_grid"] = cfg.p_grid;
    j["n_paths"] = cfg.n_paths;
    j["seed"] = cfg.seed;
    j["a0"] = cfg.a0;
    j["out_dir"] = cfg.out_dir;
    j["growth_factor"] = cfg.growth_factor;
    j["stabilize_rel"] = cfg.stabilize_rel;
    j["h_values"] = cfg.h_values;
    j["a_values"] = cfg.a_values;
    j["samples_per_cell"] = cfg.samples_per_cell;
    j["r_values"] = cfg.r_values;
    j["j_values"] = cfg.j_values;
    j["ott_h"] = cfg.ott_h;
    j["ott_M"] = cfg.ott_M;
    j["ott_paths"] = cfg.ott_paths;
    j["envelope"] = cfg.envelope ? envelope_to_json(*cfg.envelope) : ordered_json(nullptr);
    j["p"] = cfg.p ? ordered_json(*cfg.p) : ordered_json(nullptr);
    j["sim_n"] = cfg.sim_n;
    return j;
}

ExperimentConfig config_from_json(const ordered_json& j) {
    ExperimentConfig cfg;
    cfg.process.alpha = j.at("alpha").get<double>();
    cfg.process.scale = j.at("c").get<double>();
    cfg.process.horizon = j.at("T").get<double>();
    cfg.mesh_ladder = j.at("mesh_ladder").get<std::vector<std::size_t>>();
    cfg.p_grid = j.at("p_grid").get<std::vector<double>>();
    cfg.n_paths = j.at("n_paths").get<std::size_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.a0 = j.at("a0").get<double>();
    cfg.out_dir = j.at("out_dir").get<std::string>();
    cfg.growth_factor = j.at("growth_factor").get<double>();
    cfg.stabilize_rel = j.at("stabilize_rel").get<double>();
    cfg.h_values = j.at("h_values").get<std::vector<double>>();
    cfg.a_values = j.at("a_values").get<std::vector<double>>();
    cfg.samples_per_cell = j.at("samples_per_cell").get<std::uint64_t>();
    cfg.r_values = j.at("r_values").get<std::vector<int>>();
    cfg.j_values = j.at("j_values").get<std::vector<int>>();
    cfg.ott_h = j.at("ott_h").get<std::vector<double>>();
    cfg.ott_M = j.at("ott_M").get<std::vector<double>>();
    cfg.ott_paths = j.at("ott_paths").get<std::uint64_t>();
    if (!j.at("envelope").is_null())
        cfg.envelope = envelope_from_json(j.at("envelope"));
    if (!j.at("p").is_null())
        cfg.p = j.at("p").get<double>();
    cfg.sim_n = j.at("sim_n").get<std::size_t>();
    return cfg;
}

ordered_json bounds_to_json(const BoundReport& report) {
    return ordered_json::parse(bound_report_json(report));
}

BoundReport bounds_from_json(const ordered_json& j) {
    BoundReport report;
    report.envelope = envelope_from_json(j.at("envelope"));
    report.horizon = j.at("T").get<double>();
    for (const auto& lb : j.at("levels"))
        report.levels.push_back({lb.at("r").get<int>(), lb.at("Tr").get<double>(),
                                 lb.at("laplace").get<double>(), lb.at("ey_bound").get<double>()});
    for (const auto& tb : j.at("tau_tails"))
        report.tau_tails.push_back(
            {tb.at("j").get<int>(), tb.at("r").get<int>(), tb.at("bound").get<double>()});
    if (!j.at("C1").is_null()) {
        report.c1 = j.at("C1").get<double>();
        // the exponent behind C1 travels in the config echo, not here
    }
    return report;
}

ordered_json manifest_to_json(const RunManifest& man) {
    ordered_json j;
    j["format_version"] = man.format_version;
    j["kind"] = man.kind;
    j["config"] = config_to_json(man.config);
    j["summary"] = ordered_json::array();
    for (const auto& cell : man.summary)
        j["summary"].push_back({{"mesh_n", cell.mesh_n},
                                {"p", cell.p},
                                {"median_vp", cell.median},
                                {"p05", cell.p05},
                                {"p95", cell.p95},
                                {"classification", cell.classification}});
    j["tailgrid"] = ordered_json::array();
    for (const auto& c : man.tailgrid.cells)
        j["tailgrid"].push_back({{"h", c.h},
                                 {"a", c.a},
                                 {"alpha_hat", c.alpha_hat},
                                 {"n", c.n},
                                 {"ci_low", c.ci_low},
                                 {"ci_high", c.ci_high}});
    if (man.fit) {
        ordered_json f;
        f["verdict"] = to_string(man.fit->verdict);
        f["residual"] = man.fit->residual;
        f["envelope"] =
            man.fit->has_envelope ? envelope_to_json(man.fit->envelope) : ordered_json(nullptr);
        j["fit"] = f;
    } else
        j["fit"] = nullptr;
    j["bounds"] = man.bounds ? bounds_to_json(*man.bounds) : ordered_json(nullptr);
    j["checks"] = ordered_json::array();
    for (const auto& c : man.checks)
        j["checks"].push_back({{"name", c.name},
                               {"passed", c.passed},
                               {"margin", c.margin},
                               {"detail", c.detail}});
    j["wall_clock_ms"] = man.wall_clock_ms;
    return j;
}

} // namespace

std::string manifest_json(const RunManifest& manifest) {
    return manifest_to_json(manifest).dump(2) + "\n";
}

RunManifest manifest_from_json_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw io_error(std::string("manifest: bad json: ") + e.what());
    }
    RunManifest man;
    try {
        man.format_version = j.at("format_version").get<int>();
        man.kind = j.at("kind").get<std::string>();
        man.config = config_from_json(j.at("config"));
        for (const auto& cell : j.at("summary")) {
            SummaryCell s;
            s.mesh_n = cell.at("mesh_n").get<std::size_t>();
            s.p = cell.at("p").get<double>();
            s.median = cell.at("median_vp").get<double>();
            s.p05 = cell.at("p05").get<double>();
            s.p95 = cell.at("p95").get<double>();
            s.classification = cell.at("classification").get<std::string>();
            man.summary.push_back(s);
        }
        for (const auto& cj : j.at("tailgrid")) {
            TailCell c;
            c.h = cj.at("h").get<double>();
            c.a = cj.at("a").get<double>();
            c.alpha_hat = cj.at("alpha_hat").get<double>();
            c.n = cj.at("n").get<std::uint64_t>();
            c.ci_low = cj.at("ci_low").get<double>();
            c.ci_high = cj.at("ci_high").get<double>();
            man.tailgrid.cells.push_back(c);
        }
        if (!j.at("fit").is_null()) {
            KernelFit fit;
            fit.verdict = fit_verdict_from_string(j.at("fit").at("verdict").get<std::string>());
            fit.residual = j.at("fit").at("residual").get<double>();
            if (!j.at("fit").at("envelope").is_null()) {
                fit.has_envelope = true;
                fit.envelope = envelope_from_json(j.at("fit").at("envelope"));
            }
            man.fit = fit;
        }
        if (!j.at("bounds").is_null()) {
            man.bounds = bounds_from_json(j.at("bounds"));
            if (!j.at("config").at("p").is_null())
                man.bounds->p = j.at("config").at("p").get<double>();
        }
        for (const auto& cj : j.at("checks")) {
            CheckResult c;
            c.name = cj.at("name").get<std::string>();
            c.passed = cj.at("passed").get<bool>();
            c.margin = cj.at("margin").get<double>();
            c.detail = cj.at("detail").get<std::string>();
            man.checks.push_back(c);
        }
        man.wall_clock_ms = j.at("wall_clock_ms").get<std::int64_t>();
    } catch (const std::exception& e) {
        throw io_error(std::string("manifest: missing or bad field: ") + e.what());
    }
    return man;
}

RunManifest load_manifest_file(const std::string& filename) {
    std::ifstream in(filename);
    if (!in)
        throw io_error("cannot open manifest: " + filename);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return manifest_from_json_text(buffer.str());
}

bool content_equals(const RunManifest& a, const RunManifest& b) {
    ordered_json ja = manifest_to_json(a);
    ordered_json jb = manifest_to_json(b);
    ja.erase("wall_clock_ms");
    jb.erase("wall_clock_ms");
    return ja == jb;
}

void emit_report(const RunManifest& manifest, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw io_error("cannot create output directory: " + dir);

    auto open = [&](const std::string& name) {
        std::ofstream out(fs::path(dir) / name, std::ios::binary);
        if (!out)
            throw io_error("cannot write " + name + " in " + dir);
        return out;
    };

    {
        auto out = open("summary.csv");
        out << "mesh_n,p,median_vp,p05,p95,classification\n";
        for (const auto& cell : manifest.summary)
            out << cell.mesh_n << ',' << fmt17(cell.p) << ',' << fmt17(cell.median) << ','
                << fmt17(cell.p05) << ',' << fmt17(cell.p95) << ',' << cell.classification
                << '\n';
    }
    {
        auto out = open("tailgrid.csv");
        write_tailgrid_csv(manifest.tailgrid, out);
    }
    {
        auto out = open("bounds.json");
        if (manifest.bounds)
            out << bound_report_json(*manifest.bounds);
        else
            out << "null\n";
    }
    {
        auto out = open("manifest.json");
        out << manifest_json(manifest);
    }
}

} // namespace pvarlab
