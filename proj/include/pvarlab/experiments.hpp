#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pvarlab/bounds.hpp"
#include "pvarlab/core.hpp"
#include "pvarlab/kernel.hpp"
#include "pvarlab/simulate.hpp"

namespace pvarlab {

/// Everything a run needs, loadable from a flat "key = value" config file.
struct ExperimentConfig {
    ProcessSpec process;

    std::vector<std::size_t> mesh_ladder; // strictly increasing
    std::vector<double> p_grid;           // sorted
    std::size_t n_paths = 1;
    std::uint64_t seed = 0;
    double a0 = 1.0;
    std::string out_dir;

    // classification thresholds (artifact policy, overridable)
    double growth_factor = 2.0;
    double stabilize_rel = 0.2;

    // tail grid
    std::vector<double> h_values;
    std::vector<double> a_values;
    std::uint64_t samples_per_cell = 100000;

    // bound validation
    std::vector<int> r_values;
    std::vector<int> j_values;
    std::vector<double> ott_h;
    std::vector<double> ott_M;
    std::uint64_t ott_paths = 100000;

    std::optional<TailEnvelope> envelope; // analytic envelope, when given
    std::optional<double> p;              // exponent for the bounds subcommand
    std::size_t sim_n = 0;                // mesh for the simulate subcommand

    void validate() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config_file(const std::string& filename);

struct SummaryCell {
    std::size_t mesh_n = 0;
    double p = 0.0;
    double median = 0.0;
    double p05 = 0.0;
    double p95 = 0.0;
    std::string classification;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    double margin = 0.0; // how far inside the bound the estimate sits
    std::string detail;
};

/// Persisted result of one experiment run.
struct RunManifest {
    int format_version = 1;
    std::string kind;
    ExperimentConfig config;
    std::vector<SummaryCell> summary;
    TailGrid tailgrid;
    std::optional<KernelFit> fit;
    std::optional<BoundReport> bounds;
    std::vector<CheckResult> checks;
    std::int64_t wall_clock_ms = 0;
};

/// "diverging" when the medians rise monotonically by at least growth_factor
/// in total, else "stabilizing" when the top two meshes differ by at most
/// stabilize_rel relatively, else "indeterminate".
std::string classify_medians(const std::vector<double>& medians, double growth_factor,
                             double stabilize_rel);

/// q-th percentile (q in [0,1]) of a sample, linear interpolation between
/// order statistics.
double percentile(std::vector<double> sample, double q);

/// Simulate ensembles over the mesh ladder, compute exact p-variation over
/// the p grid, and classify each p as diverging/stabilizing.
RunManifest run_sharpness(const ExperimentConfig& config);

/// Build a tail grid by Monte Carlo, fit the envelope, attach the bound
/// report evaluated at the fitted envelope.
RunManifest run_membership(const ExperimentConfig& config);

/// Monte Carlo domination checks of the closed-form bounds, the per-path
/// dyadic-bound inequality, and the running-supremum inequality grid.
RunManifest run_bound_validation(const ExperimentConfig& config);

/// Write summary.csv, tailgrid.csv, bounds.json and manifest.json into dir.
/// Byte-deterministic in the manifest contents.
void emit_report(const RunManifest& manifest, const std::string& dir);

std::string manifest_json(const RunManifest& manifest);
RunManifest manifest_from_json_text(const std::string& text);
RunManifest load_manifest_file(const std::string& filename);

/// Equality of scientific content; the wall clock is ignored.
bool content_equals(const RunManifest& a, const RunManifest& b);

} // namespace pvarlab
