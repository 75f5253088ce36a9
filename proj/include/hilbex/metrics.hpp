#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hilbex {

// Tolerances shared by the distance functions.
inline constexpr double kSimplexSumTol = 1e-9;  // accepted |sum(v) - 1|
inline constexpr double kSqrtClampTol = 1e-12;  // negative rounding residue under sqrt

// A distance function over dense real vectors, tagged with whether the
// four-point property holds (so hyperplane indexes may use Hilbert
// exclusion) and whether inputs must be probability vectors.
//
// `kernel` computes the base distance; `alpha` is an optional output
// exponent (see power_transform). Kept as a plain function pointer plus
// exponent so descriptors stay POD-cheap in query hot loops.
struct MetricDescriptor {
    std::string name;
    double (*kernel)(const double*, const double*, std::size_t) = nullptr;
    double alpha = 1.0;
    bool hilbert_safe = false;
    bool requires_simplex = false;

    double distance(const double* a, const double* b, std::size_t dim) const {
        double d = kernel(a, b, dim);
        return alpha == 1.0 ? d : std::pow(d, alpha);
    }

    double distance(std::span<const double> a, std::span<const double> b) const {
        if (a.size() != b.size())
            throw std::invalid_argument("metric '" + name + "': dimension mismatch (" +
                                        std::to_string(a.size()) + " vs " +
                                        std::to_string(b.size()) + ")");
        if (a.empty())
            throw std::invalid_argument("metric '" + name + "': empty vectors");
        return distance(a.data(), b.data(), a.size());
    }
};

// Raw kernels. Each validates what its contract requires (non-negativity,
// simplex sums, nonzero norms) inside the accumulation pass and throws
// std::invalid_argument on bad input.
double euclidean_kernel(const double* a, const double* b, std::size_t dim);
double jsd_kernel(const double* a, const double* b, std::size_t dim);
double triangular_kernel(const double* a, const double* b, std::size_t dim);
double cosine_sqrt_kernel(const double* a, const double* b, std::size_t dim);
double cosine_angle_kernel(const double* a, const double* b, std::size_t dim);
double manhattan_kernel(const double* a, const double* b, std::size_t dim);
double sqrt_manhattan_kernel(const double* a, const double* b, std::size_t dim);

// Checked, span-level entry points for the individual distances.
double euclidean(std::span<const double> v, std::span<const double> w);
double jsd_distance(std::span<const double> v, std::span<const double> w);
double triangular_distance(std::span<const double> v, std::span<const double> w);
double cosine_sqrt_distance(std::span<const double> v, std::span<const double> w);
double cosine_angle_distance(std::span<const double> v, std::span<const double> w);
double sqrt_manhattan(std::span<const double> v, std::span<const double> w);

// Scales a non-negative vector so its components sum to 1 (within 1e-12).
// Throws on negative components or an all-zero vector.
std::vector<double> normalize_to_simplex(std::span<const double> v);

// Descriptor for d(x,y)^alpha. Requires 0 < alpha <= 1. The result is
// Hilbert-safe exactly when alpha <= 0.5: that exponent range guarantees the
// four-point property for any base metric, while larger exponents carry no
// guarantee and are conservatively marked unsafe (even for alpha == 1 on a
// safe base).
MetricDescriptor power_transform(const MetricDescriptor& base, double alpha);

// Built-in descriptors under their stable names:
//   euc, jsd, tri, cos_sqrt, cos_angle, sqrt_man, man
// plus "pow:<base>:<alpha>". `man` (plain Manhattan, not Hilbert-safe) is
// shipped as a power_transform base. Throws on unknown names.
MetricDescriptor metric_from_name(const std::string& name);

// Names of the shipped base metrics, in registry order.
std::vector<std::string> metric_names();

} // namespace hilbex
