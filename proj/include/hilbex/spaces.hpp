#pragma once

#include <cstdint>
#include <string>

#include "hilbex/dataset.hpp"
#include "hilbex/metrics.hpp"

namespace hilbex {

// A space label names a metric and a dimension, e.g. "euc_10" or
// "cos_sqrt_8": metric name, underscore, positive integer dimension.
struct SpaceSpec {
    std::string label;
    MetricDescriptor metric;
    std::size_t dim = 0;
};

SpaceSpec parse_space_label(const std::string& label);

// Synthesizes the space's dataset: n points uniform in the unit hypercube,
// simplex-normalized when the metric requires probability vectors.
Dataset make_space_dataset(const SpaceSpec& space, std::size_t n, std::uint64_t seed);

// Re-establishes the dataset invariant on loaded data: checks the dimension
// against the space and, for simplex metrics, renormalizes rows (file
// round-trips through 32-bit floats perturb sums past the metric tolerance).
// Rejects all-zero or negative rows for simplex spaces.
void prepare_for_space(Dataset& d, const SpaceSpec& space);

} // namespace hilbex
