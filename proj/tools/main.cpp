#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pvarlab/bounds.hpp"
#include "pvarlab/experiments.hpp"
#include "pvarlab/io_util.hpp"
#include "pvarlab/pvar.hpp"
#include "pvarlab/simulate.hpp"

namespace {

struct CommonOpts {
    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required) {
    auto* c = cmd->add_option("--config", opts.config_file, "flat key = value config file");
    if (config_required)
        c->required();
    cmd->add_option("--seed", opts.seed, "seed override");
    cmd->add_option("--out", opts.out, "output directory override");
    cmd->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
}

pvarlab::ExperimentConfig load_cfg(const CommonOpts& opts) {
    pvarlab::ExperimentConfig cfg = pvarlab::load_config_file(opts.config_file);
    if (opts.seed)
        cfg.seed = *opts.seed;
    if (!opts.out.empty())
        cfg.out_dir = opts.out;
    return cfg;
}

std::string require_out_dir(const pvarlab::ExperimentConfig& cfg) {
    if (cfg.out_dir.empty())
        throw pvarlab::config_error("no output directory: set out_dir in the config or pass --out");
    return cfg.out_dir;
}

int emit_and_print(const pvarlab::RunManifest& man, const pvarlab::ExperimentConfig& cfg) {
    pvarlab::emit_report(man, require_out_dir(cfg));
    std::cout << "wrote " << cfg.out_dir << "/{summary.csv,tailgrid.csv,bounds.json,manifest.json}"
              << std::endl;
    return 0;
}

int run_simulate(const CommonOpts& opts) {
    auto cfg = load_cfg(opts);
    std::size_t n = cfg.sim_n;
    if (n == 0 && !cfg.mesh_ladder.empty())
        n = cfg.mesh_ladder.front();
    if (n == 0)
        throw pvarlab::config_error("simulate: set n (or mesh_ladder) in the config");
    const auto path = pvarlab::simulate_path(cfg.process, pvarlab::MeshSpec{n}, cfg.seed);
    const auto dir = require_out_dir(cfg);
    std::filesystem::create_directories(dir);
    const auto file = (std::filesystem::path(dir) / "path.csv").string();
    pvarlab::write_path_csv_file(path, file);
    std::cout << "wrote " << file << " (" << path.size() << " samples)" << std::endl;
    return 0;
}

int run_pvar(const CommonOpts& opts, const std::string& path_file, std::vector<double> ps) {
    if (path_file.empty())
        throw pvarlab::config_error("pvar: --path is required");
    if (ps.empty()) {
        if (opts.config_file.empty())
            throw pvarlab::config_error("pvar: give --p values or a config with p_grid");
        ps = pvarlab::load_config_file(opts.config_file).p_grid;
    }
    if (ps.empty())
        throw pvarlab::config_error("pvar: no p values given");
    const auto path = pvarlab::read_path_csv_file(path_file);
    if (opts.format == "json") {
        std::cout << "[";
        for (std::size_t i = 0; i < ps.size(); ++i)
            std::cout << (i ? "," : "") << "{\"p\":" << pvarlab::fmt17(ps[i])
                      << ",\"vp\":" << pvarlab::fmt17(pvarlab::pvar_exact(path, ps[i])) << "}";
        std::cout << "]" << std::endl;
    } else {
        std::cout << "p,vp\n";
        for (double p : ps)
            std::cout << pvarlab::fmt17(p) << ',' << pvarlab::fmt17(pvarlab::pvar_exact(path, p))
                      << '\n';
    }
    return 0;
}

int run_fit_kernel(const CommonOpts& opts) {
    auto cfg = load_cfg(opts);
    const auto man = pvarlab::run_membership(cfg);
    if (man.fit) {
        std::cout << "verdict: " << pvarlab::to_string(man.fit->verdict);
        if (man.fit->has_envelope)
            std::cout << "  K=" << man.fit->envelope.K << " beta=" << man.fit->envelope.beta
                      << " gamma=" << man.fit->envelope.gamma
                      << " pstar=" << man.fit->envelope.critical_exponent();
        std::cout << std::endl;
    }
    return emit_and_print(man, cfg);
}

int run_bounds(const CommonOpts& opts) {
    auto cfg = load_cfg(opts);
    if (!cfg.envelope)
        throw pvarlab::config_error("bounds: config needs an envelope (K, beta, gamma)");
    const auto& env = *cfg.envelope;
    std::vector<int> rs = cfg.r_values;
    if (rs.empty())
        for (int r = pvarlab::cutoff_level(env.a0) + 1; r <= pvarlab::cutoff_level(env.a0) + 8; ++r)
            rs.push_back(r);
    const auto js = cfg.j_values.empty() ? std::vector<int>{1, 2, 3} : cfg.j_values;
    std::optional<double> p = cfg.p;
    if (!p)
        for (double candidate : cfg.p_grid)
            if (candidate > env.critical_exponent()) {
                p = candidate;
                break;
            }
    const auto report = pvarlab::make_bound_report(env, cfg.process.horizon, rs, js, p);
    const auto dir = require_out_dir(cfg);
    std::filesystem::create_directories(dir);
    const auto file = (std::filesystem::path(dir) / "bounds.json").string();
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw pvarlab::io_error("cannot write " + file);
    out << pvarlab::bound_report_json(report);
    if (report.c1)
        std::cout << "C1 = " << pvarlab::fmt17(*report.c1) << std::endl;
    std::cout << "wrote " << file << std::endl;
    return 0;
}

int run_sharpness_cmd(const CommonOpts& opts) {
    auto cfg = load_cfg(opts);
    const auto man = pvarlab::run_sharpness(cfg);
    for (double p : cfg.p_grid)
        for (const auto& cell : man.summary)
            if (cell.p == p && cell.mesh_n == cfg.mesh_ladder.back()) {
                std::cout << "p=" << p << ": " << cell.classification << std::endl;
                break;
            }
    return emit_and_print(man, cfg);
}

int run_validate(const CommonOpts& opts) {
    auto cfg = load_cfg(opts);
    const auto man = pvarlab::run_bound_validation(cfg);
    bool all_passed = true;
    for (const auto& check : man.checks) {
        std::cout << (check.passed ? "[PASS] " : "[FAIL] ") << check.name << ": " << check.detail
                  << std::endl;
        all_passed = all_passed && check.passed;
    }
    emit_and_print(man, cfg);
    return all_passed ? 0 : 1;
}

int run_report(const CommonOpts& opts, const std::string& manifest_file) {
    if (manifest_file.empty())
        throw pvarlab::config_error("report: --manifest is required");
    const auto man = pvarlab::load_manifest_file(manifest_file);
    std::string dir = opts.out;
    if (dir.empty())
        dir = man.config.out_dir;
    if (dir.empty())
        throw pvarlab::config_error("report: no output directory; pass --out");
    pvarlab::emit_report(man, dir);
    std::cout << "re-emitted " << dir << " from " << manifest_file << std::endl;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulation and verification laboratory for the p-variation of "
                 "stable Levy paths"};
    app.require_subcommand(1);

    CommonOpts sim_opts, pvar_opts, fit_opts, bounds_opts, sharp_opts, val_opts, rep_opts;
    std::string path_file, manifest_file;
    std::vector<double> p_values;

    add_common(app.add_subcommand("simulate", "simulate one path, write path.csv"), sim_opts, true);
    auto* pvar_cmd = app.add_subcommand("pvar", "exact p-variation of a path csv");
    add_common(pvar_cmd, pvar_opts, false);
    pvar_cmd->add_option("--path", path_file, "path csv file (header t,x)")->required();
    pvar_cmd->add_option("--p", p_values, "variation exponent(s)");
    add_common(app.add_subcommand("fit-kernel", "Monte Carlo tail grid and envelope fit"),
               fit_opts, true);
    add_common(app.add_subcommand("bounds", "evaluate the closed-form bound report"), bounds_opts,
               true);
    add_common(app.add_subcommand("sharpness", "mesh-refinement classification experiment"),
               sharp_opts, true);
    add_common(app.add_subcommand("validate", "Monte Carlo domination checks of every bound"),
               val_opts, true);
    auto* rep_cmd = app.add_subcommand("report", "re-emit output files from a manifest");
    add_common(rep_cmd, rep_opts, false);
    rep_cmd->add_option("--manifest", manifest_file, "manifest.json from a previous run")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand("simulate"))
            return run_simulate(sim_opts);
        if (app.got_subcommand("pvar"))
            return run_pvar(pvar_opts, path_file, p_values);
        if (app.got_subcommand("fit-kernel"))
            return run_fit_kernel(fit_opts);
        if (app.got_subcommand("bounds"))
            return run_bounds(bounds_opts);
        if (app.got_subcommand("sharpness"))
            return run_sharpness_cmd(sharp_opts);
        if (app.got_subcommand("validate"))
            return run_validate(val_opts);
        if (app.got_subcommand("report"))
            return run_report(rep_opts, manifest_file);
    } catch (const pvarlab::config_error& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 2;
    } catch (const pvarlab::io_error& e) {
        std::cerr << "io error: " << e.what() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
    return 2;
}
