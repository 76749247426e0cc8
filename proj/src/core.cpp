#include "pvarlab/core.hpp"

namespace pvarlab {

void SamplePath::validate() const {
    if (times.empty())
        throw std::invalid_argument("SamplePath: empty path");
    if (times.size() != values.size())
        throw std::invalid_argument("SamplePath: times/values length mismatch");
    if (times.front() != 0.0)
        throw std::invalid_argument("SamplePath: first time must be 0");
    if (times.back() != horizon)
        throw std::invalid_argument("SamplePath: last time must equal horizon");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || !std::isfinite(values[i]))
            throw std::invalid_argument("SamplePath: non-finite entry");
        if (i > 0 && !(times[i] > times[i - 1]))
            throw std::invalid_argument("SamplePath: times not strictly increasing");
    }
}

void TailEnvelope::validate() const {
    if (!(K > 0.0) || !std::isfinite(K))
        throw std::invalid_argument("TailEnvelope: K must be positive");
    if (!(beta >= 1.0) || !std::isfinite(beta))
        throw std::invalid_argument("TailEnvelope: beta must be >= 1");
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("TailEnvelope: gamma must be positive");
    if (!(a0 > 0.0) || !std::isfinite(a0))
        throw std::invalid_argument("TailEnvelope: a0 must be positive");
}

} // namespace pvarlab
