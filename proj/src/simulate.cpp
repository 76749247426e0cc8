#include "pvarlab/simulate.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "pvarlab/io_util.hpp"

namespace pvarlab {

void ProcessSpec::validate() const {
    if (!(alpha > 0.0) || !(alpha <= 2.0))
        throw std::invalid_argument("ProcessSpec: alpha must be in (0, 2]");
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw std::invalid_argument("ProcessSpec: scale must be positive");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("ProcessSpec: horizon must be positive");
}

void MeshSpec::validate() const {
    if (n < 1)
        throw std::invalid_argument("MeshSpec: need at least one sample point");
}

std::vector<double> MeshSpec::times(double horizon) const {
    validate();
    std::vector<double> t(n);
    if (n == 1) {
        t[0] = 0.0;
        return t;
    }
    const double denom = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = horizon * (static_cast<double>(i) / denom);
    return t;
}

namespace {

// Chambers-Mallows-Stuck transform, symmetric case: V uniform on
// (-pi/2, pi/2), W standard exponential. alpha = 1 reduces to tan(V)
// (standard Cauchy) and needs no exponential draw.
double standard_symmetric_stable(double alpha, SplitMix64& rng) {
    const double v = (uniform_open(rng) - 0.5) * std::numbers::pi;
    if (alpha == 1.0)
        return std::tan(v);
    const double w = exponential_draw(rng);
    const double s = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha);
    return s * std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
}

} // namespace

double sample_stable_increment(double alpha, double c, double dt, SplitMix64& rng) {
    if (!(alpha > 0.0) || !(alpha <= 2.0))
        throw std::invalid_argument("sample_stable_increment: alpha must be in (0, 2]");
    if (!(c > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("sample_stable_increment: c and dt must be positive");
    return std::pow(c * dt, 1.0 / alpha) * standard_symmetric_stable(alpha, rng);
}

SamplePath simulate_path(const ProcessSpec& spec, const MeshSpec& mesh, std::uint64_t seed) {
    spec.validate();
    mesh.validate();

    SamplePath path;
    path.times = mesh.times(spec.horizon);
    path.values.resize(mesh.n);
    path.values[0] = 0.0;
    path.horizon = path.times.back();

    if (mesh.n >= 2) {
        const double dt = spec.horizon / static_cast<double>(mesh.n - 1);
        SplitMix64 rng(seed);
        for (std::size_t i = 1; i < mesh.n; ++i)
            path.values[i] =
                path.values[i - 1] + sample_stable_increment(spec.alpha, spec.scale, dt, rng);
    }
    return path;
}

void write_path_csv(const SamplePath& path, std::ostream& out) {
    out << "t,x\n";
    for (std::size_t i = 0; i < path.size(); ++i)
        out << fmt17(path.times[i]) << ',' << fmt17(path.values[i]) << '\n';
}

SamplePath read_path_csv(std::istream& in) {
    SamplePath path;
    std::string line;
    if (!std::getline(in, line) || line != "t,x")
        throw io_error("path csv: missing 't,x' header");
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream row(line);
        std::string t, x;
        if (!std::getline(row, t, ',') || !std::getline(row, x))
            throw io_error("path csv: malformed row: " + line);
        path.times.push_back(std::stod(t));
        path.values.push_back(std::stod(x));
    }
    if (path.times.empty())
        throw io_error("path csv: no samples");
    path.horizon = path.times.back();
    path.validate();
    return path;
}

void write_path_csv_file(const SamplePath& path, const std::string& filename) {
    std::ofstream out(filename);
    if (!out)
        throw io_error("cannot open for writing: " + filename);
    write_path_csv(path, out);
}

SamplePath read_path_csv_file(const std::string& filename) {
    std::ifstream in(filename);
    if (!in)
        throw io_error("cannot open for reading: " + filename);
    return read_path_csv(in);
}

} // namespace pvarlab
