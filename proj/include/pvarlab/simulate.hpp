#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pvarlab/core.hpp"
#include "pvarlab/rng.hpp"

namespace pvarlab {

enum class ProcessFamily { StableLevy };

/// Symmetric alpha-stable Levy motion: increments over a window of length dt
/// are distributed as (c * dt)^(1/alpha) * S(alpha), where S(alpha) has
/// characteristic function exp(-|t|^alpha). alpha = 2 is Brownian motion with
/// increment variance 2 * c * dt; c = 1/2 gives the standard one.
struct ProcessSpec {
    ProcessFamily family = ProcessFamily::StableLevy;
    double alpha = 2.0;
    double scale = 0.5; // c
    double horizon = 1.0;

    void validate() const;
};

/// Uniform mesh of n sample points on [0, horizon], endpoints hit exactly.
struct MeshSpec {
    std::size_t n = 2;

    void validate() const;
    std::vector<double> times(double horizon) const;
};

/// One draw of a stable increment over a window of length dt.
double sample_stable_increment(double alpha, double c, double dt, SplitMix64& rng);

/// Simulate a path on the mesh by exact transition sampling. Starts at 0.
/// A pure function of (spec, mesh, seed): same inputs, bit-identical path.
SamplePath simulate_path(const ProcessSpec& spec, const MeshSpec& mesh, std::uint64_t seed);

/// CSV dump with header "t,x", one row per sample, 17-significant-digit floats.
void write_path_csv(const SamplePath& path, std::ostream& out);
SamplePath read_path_csv(std::istream& in);
void write_path_csv_file(const SamplePath& path, const std::string& filename);
SamplePath read_path_csv_file(const std::string& filename);

} // namespace pvarlab
