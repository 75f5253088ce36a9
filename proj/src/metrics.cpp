#include "hilbex/metrics.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace hilbex {

namespace {

// log2 scaling for natural-log free functions is not worth it; std::log2 is
// used directly so the entropy terms match the base-2 formulation.

[[noreturn]] void bad_input(const char* metric, const char* what) {
    throw std::invalid_argument(std::string(metric) + ": " + what);
}

// Guards sqrt against the tiny negative residue left by floating-point
// cancellation. Values below the clamp window indicate a formula bug, not
// rounding, and are escalated.
double sqrt_nonneg(double x, const char* metric) {
    if (x < 0) {
        if (x < -kSqrtClampTol)
            throw std::logic_error(std::string(metric) +
                                   ": negative value under sqrt beyond rounding tolerance");
        x = 0;
    }
    return std::sqrt(x);
}

void check_simplex_sums(const char* metric, double sum_a, double sum_b) {
    if (std::abs(sum_a - 1.0) > kSimplexSumTol || std::abs(sum_b - 1.0) > kSimplexSumTol)
        bad_input(metric, "input is not a probability vector (components must sum to 1)");
}

} // namespace

double euclidean_kernel(const double* a, const double* b, std::size_t dim) {
    double acc = 0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

// Jensen-Shannon distance: sqrt(1 - (1/2) sum_i (h(v_i) + h(w_i) - h(v_i+w_i)))
// with h(x) = -x log2 x, h(0) = 0. Evaluated in the algebraically equal
// relative-entropy form sum_i [v log2(2v/s) + w log2(2w/s)] / 2, s = v + w,
// whose terms vanish exactly when v_i == w_i, so d(x,x) == 0 in floating
// point as well.
double jsd_kernel(const double* a, const double* b, std::size_t dim) {
    double acc = 0, sum_a = 0, sum_b = 0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double v = a[i], w = b[i];
        if (v < 0 || w < 0) bad_input("jsd", "negative component");
        sum_a += v;
        sum_b += w;
        if (v == w) continue; // exact zero contribution, includes v == w == 0
        const double s = v + w;
        if (v > 0) acc += v * std::log2(2.0 * v / s);
        if (w > 0) acc += w * std::log2(2.0 * w / s);
    }
    check_simplex_sums("jsd", sum_a, sum_b);
    double divergence = 0.5 * acc;
    if (divergence > 1.0) divergence = 1.0; // bound holds for simplex inputs
    return sqrt_nonneg(divergence, "jsd");
}

// Triangular distance: sqrt(sum_i (v_i - w_i)^2 / (v_i + w_i)), terms with
// v_i + w_i == 0 contribute nothing.
double triangular_kernel(const double* a, const double* b, std::size_t dim) {
    double acc = 0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double v = a[i], w = b[i];
        if (v < 0 || w < 0) bad_input("tri", "negative component");
        const double s = v + w;
        if (s > 0) {
            const double d = v - w;
            acc += d * d / s;
        }
    }
    return sqrt_nonneg(acc, "tri");
}

namespace {

// Cosine similarity with the norms validated; shared by both cosine forms.
double cosine_similarity(const char* metric, const double* a, const double* b,
                         std::size_t dim) {
    double dot = 0, na2 = 0, nb2 = 0;
    for (std::size_t i = 0; i < dim; ++i) {
        dot += a[i] * b[i];
        na2 += a[i] * a[i];
        nb2 += b[i] * b[i];
    }
    if (na2 == 0 || nb2 == 0) bad_input(metric, "zero vector has no direction");
    return dot / std::sqrt(na2 * nb2);
}

} // namespace

double cosine_sqrt_kernel(const double* a, const double* b, std::size_t dim) {
    if (std::memcmp(a, b, dim * sizeof(double)) == 0) {
        // still reject zero vectors on the identity path
        double na2 = 0;
        for (std::size_t i = 0; i < dim; ++i) na2 += a[i] * a[i];
        if (na2 == 0) bad_input("cos_sqrt", "zero vector has no direction");
        return 0;
    }
    const double s = cosine_similarity("cos_sqrt", a, b, dim);
    return sqrt_nonneg(1.0 - s, "cos_sqrt");
}

// 1 - arccos(S)/2pi, kept verbatim as the non-embeddable contrast case. Note
// this maps the zero angle to 1, so it violates d(x,x) = 0; it is excluded
// from the metric-axiom guarantees and hilbert_safe is false.
double cosine_angle_kernel(const double* a, const double* b, std::size_t dim) {
    double s = cosine_similarity("cos_angle", a, b, dim);
    if (s > 1.0) s = 1.0;
    if (s < -1.0) s = -1.0;
    return 1.0 - std::acos(s) / (2.0 * M_PI);
}

double manhattan_kernel(const double* a, const double* b, std::size_t dim) {
    double acc = 0;
    for (std::size_t i = 0; i < dim; ++i) acc += std::abs(a[i] - b[i]);
    return acc;
}

double sqrt_manhattan_kernel(const double* a, const double* b, std::size_t dim) {
    return std::sqrt(manhattan_kernel(a, b, dim));
}

namespace {

MetricDescriptor make_descriptor(const char* name,
                                 double (*kernel)(const double*, const double*, std::size_t),
                                 bool hilbert_safe, bool requires_simplex) {
    MetricDescriptor m;
    m.name = name;
    m.kernel = kernel;
    m.hilbert_safe = hilbert_safe;
    m.requires_simplex = requires_simplex;
    return m;
}

struct RegistryEntry {
    const char* name;
    MetricDescriptor (*make)();
};

const RegistryEntry kRegistry[] = {
    {"euc", [] { return make_descriptor("euc", euclidean_kernel, true, false); }},
    {"jsd", [] { return make_descriptor("jsd", jsd_kernel, true, true); }},
    {"tri", [] { return make_descriptor("tri", triangular_kernel, true, true); }},
    {"cos_sqrt", [] { return make_descriptor("cos_sqrt", cosine_sqrt_kernel, true, false); }},
    {"cos_angle", [] { return make_descriptor("cos_angle", cosine_angle_kernel, false, false); }},
    {"sqrt_man", [] { return make_descriptor("sqrt_man", sqrt_manhattan_kernel, true, false); }},
    {"man", [] { return make_descriptor("man", manhattan_kernel, false, false); }},
};

std::string format_alpha(double alpha) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", alpha);
    return buf;
}

} // namespace

double euclidean(std::span<const double> v, std::span<const double> w) {
    return metric_from_name("euc").distance(v, w);
}

double jsd_distance(std::span<const double> v, std::span<const double> w) {
    return metric_from_name("jsd").distance(v, w);
}

double triangular_distance(std::span<const double> v, std::span<const double> w) {
    return metric_from_name("tri").distance(v, w);
}

double cosine_sqrt_distance(std::span<const double> v, std::span<const double> w) {
    return metric_from_name("cos_sqrt").distance(v, w);
}

double cosine_angle_distance(std::span<const double> v, std::span<const double> w) {
    return metric_from_name("cos_angle").distance(v, w);
}

double sqrt_manhattan(std::span<const double> v, std::span<const double> w) {
    return metric_from_name("sqrt_man").distance(v, w);
}

std::vector<double> normalize_to_simplex(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("normalize_to_simplex: empty vector");
    double sum = 0;
    for (double x : v) {
        if (x < 0) throw std::invalid_argument("normalize_to_simplex: negative component");
        sum += x;
    }
    if (sum <= 0) throw std::invalid_argument("normalize_to_simplex: components sum to zero");
    std::vector<double> out(v.begin(), v.end());
    for (double& x : out) x /= sum;
    return out;
}

MetricDescriptor power_transform(const MetricDescriptor& base, double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("power_transform: alpha must be in (0, 1]");
    MetricDescriptor out = base;
    out.name = "pow:" + base.name + ":" + format_alpha(alpha);
    out.alpha = base.alpha * alpha;
    // alpha <= 0.5 guarantees the four-point property for any base metric;
    // larger exponents carry no guarantee and are marked unsafe.
    out.hilbert_safe = alpha <= 0.5;
    out.requires_simplex = base.requires_simplex;
    return out;
}

MetricDescriptor metric_from_name(const std::string& name) {
    for (const auto& entry : kRegistry)
        if (name == entry.name) return entry.make();
    if (name.rfind("pow:", 0) == 0) {
        const auto split = name.rfind(':');
        if (split <= 3) throw std::invalid_argument("bad power metric name: " + name);
        const std::string base_name = name.substr(4, split - 4);
        const std::string alpha_str = name.substr(split + 1);
        char* end = nullptr;
        const double alpha = std::strtod(alpha_str.c_str(), &end);
        if (alpha_str.empty() || end == nullptr || *end != '\0')
            throw std::invalid_argument("bad power metric alpha: " + name);
        return power_transform(metric_from_name(base_name), alpha);
    }
    throw std::invalid_argument("unknown metric: " + name);
}

std::vector<std::string> metric_names() {
    std::vector<std::string> out;
    for (const auto& entry : kRegistry) out.emplace_back(entry.name);
    return out;
}

} // namespace hilbex
