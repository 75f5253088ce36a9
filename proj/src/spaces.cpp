#include "hilbex/spaces.hpp"

#include <cstdlib>
#include <stdexcept>

namespace hilbex {

SpaceSpec parse_space_label(const std::string& label) {
    const auto split = label.rfind('_');
    if (split == std::string::npos || split == 0 || split + 1 >= label.size())
        throw std::invalid_argument("bad space label '" + label +
                                    "' (expected <metric>_<dim>, e.g. euc_10)");
    const std::string dim_str = label.substr(split + 1);
    char* end = nullptr;
    const unsigned long dim = std::strtoul(dim_str.c_str(), &end, 10);
    if (end == nullptr || *end != '\0' || dim == 0)
        throw std::invalid_argument("bad dimension in space label '" + label + "'");

    SpaceSpec spec;
    spec.label = label;
    spec.metric = metric_from_name(label.substr(0, split));
    spec.dim = static_cast<std::size_t>(dim);
    return spec;
}

Dataset make_space_dataset(const SpaceSpec& space, std::size_t n, std::uint64_t seed) {
    Dataset d = gen_uniform(n, space.dim, seed);
    if (space.metric.requires_simplex) d = to_simplex(std::move(d));
    d.label = space.label;
    return d;
}

void prepare_for_space(Dataset& d, const SpaceSpec& space) {
    if (d.dim != space.dim)
        throw std::invalid_argument("dataset dimension " + std::to_string(d.dim) +
                                    " does not match space " + space.label);
    if (space.metric.requires_simplex) {
        // Renormalize: 32-bit file storage perturbs row sums beyond the
        // simplex tolerance the metrics enforce.
        d = to_simplex(std::move(d));
    }
    d.label = space.label;
}

} // namespace hilbex
