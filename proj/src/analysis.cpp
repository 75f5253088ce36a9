#include "hilbex/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>

#include "hilbex/geometry.hpp"
#include "hilbex/parallel.hpp"
#include "hilbex/random.hpp"

namespace hilbex {

namespace {

// Sub-stream tags so one user seed drives independent generators.
constexpr std::uint64_t kStreamIdim = 0x1d1;
constexpr std::uint64_t kStreamPilot = 0x91307;
constexpr std::uint64_t kStreamQueries = 0x9003;
constexpr std::uint64_t kStreamTrialBase = 0x7001a15;

double dist_rows(const Dataset& d, const MetricDescriptor& m, std::size_t i, std::size_t j) {
    return m.distance(d.row(i), d.row(j), d.dim);
}

} // namespace

double idim_from_distances(std::span<const double> distances) {
    if (distances.size() < 2)
        throw std::invalid_argument("idim: need at least two sampled distances");
    double sum = 0;
    for (const double d : distances) sum += d;
    const double mu = sum / static_cast<double>(distances.size());
    double acc = 0;
    for (const double d : distances) acc += (d - mu) * (d - mu);
    const double var = acc / static_cast<double>(distances.size()); // population variance
    // A spread this far below the mean scale means every sampled distance is
    // "equal" up to rounding: the estimator is undefined there.
    if (var <= mu * mu * 1e-24)
        throw degenerate_space("idim: sampled distances are all equal (sigma = 0)");
    return mu * mu / (2.0 * var);
}

double idim(const Dataset& data, const MetricDescriptor& metric, std::size_t sample_pairs,
            std::uint64_t seed) {
    const std::size_t n = data.n();
    if (n < 2) throw std::invalid_argument("idim: need at least two points");
    if (sample_pairs == 0) throw std::invalid_argument("idim: sample_pairs must be positive");

    Rng rng(derive_seed(seed, kStreamIdim));
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs(sample_pairs);
    for (auto& [a, b] : pairs) {
        a = static_cast<std::uint32_t>(rng.index(n));
        do {
            b = static_cast<std::uint32_t>(rng.index(n));
        } while (b == a);
    }
    std::vector<double> dists(sample_pairs);
    parallel_for(0, sample_pairs, [&](std::size_t i) {
        dists[i] = dist_rows(data, metric, pairs[i].first, pairs[i].second);
    });
    return idim_from_distances(dists);
}

// ---------------------------------------------------------------------------
// Threshold calibration

struct ThresholdCalibrator::Impl {
    const Dataset& data;
    MetricDescriptor metric;
    CalibrationOptions opt;
    std::uint64_t seed;

    std::size_t n = 0;
    std::vector<std::uint32_t> query_ids;
    std::vector<char> is_query;
    std::size_t base_n = 0;

    std::vector<double> pilot; // sorted pairwise sample
    double d_hi = 0;

    // Distances from every query to every base point, kept below `cap` and
    // sorted; exact counts are available for any t <= cap.
    std::vector<double> kept;
    double cap = -1;
    bool have_all = false;
    double mean_at_cap = 0;

    Impl(const Dataset& d, const MetricDescriptor& m, std::uint64_t s, CalibrationOptions o)
        : data(d), metric(m), opt(o), seed(s) {
        n = data.n();
        if (n < 2) throw std::invalid_argument("calibrate_threshold: need at least two points");

        Rng prng(derive_seed(seed, kStreamPilot));
        pilot.resize(std::max<std::size_t>(2, opt.pilot_pairs));
        for (double& d : pilot) {
            const std::size_t i = prng.index(n);
            std::size_t j = prng.index(n);
            while (j == i) j = prng.index(n);
            d = dist_rows(data, metric, i, j);
        }
        std::sort(pilot.begin(), pilot.end());
        d_hi = pilot.back();
        if (d_hi <= 0)
            throw calibration_error("calibrate_threshold: pilot sample has zero diameter "
                                    "(all sampled points coincide)");

        const std::size_t q = std::min(opt.query_sample, std::max<std::size_t>(1, n / 4));
        Rng qrng(derive_seed(seed, kStreamQueries));
        is_query.assign(n, 0);
        query_ids.reserve(q);
        while (query_ids.size() < q) {
            const std::size_t id = qrng.index(n);
            if (!is_query[id]) {
                is_query[id] = 1;
                query_ids.push_back(static_cast<std::uint32_t>(id));
            }
        }
        base_n = n - query_ids.size();
    }

    void collect(double limit, bool everything) {
        std::vector<std::vector<double>> per_query(query_ids.size());
        parallel_for(0, query_ids.size(), [&](std::size_t qi) {
            const double* q = data.row(query_ids[qi]);
            auto& out = per_query[qi];
            for (std::size_t j = 0; j < n; ++j) {
                if (is_query[j]) continue;
                const double d = metric.distance(q, data.row(j), data.dim);
                if (everything || d <= limit) out.push_back(d);
            }
        });
        kept.clear();
        for (auto& v : per_query) kept.insert(kept.end(), v.begin(), v.end());
        std::sort(kept.begin(), kept.end());
        cap = limit;
        have_all = everything;
        mean_at_cap = static_cast<double>(kept.size()) / static_cast<double>(query_ids.size());
    }

    // Makes exact counts available up to at least the requested mean count.
    void ensure(double target) {
        const double required = target * (1.0 + opt.count_tolerance) * 1.05;
        if (have_all || (cap >= 0 && mean_at_cap >= required)) return;

        double p = std::min(1.0, std::max(1000.0, 8.0 * required) /
                                     static_cast<double>(base_n));
        for (;;) {
            if (p >= 1.0) {
                collect(0, true);
                return;
            }
            const auto idx = static_cast<std::size_t>(
                std::ceil(p * static_cast<double>(pilot.size() - 1)));
            collect(pilot[std::min(idx, pilot.size() - 1)], false);
            if (mean_at_cap >= required) return;
            p = std::min(1.0, p * 8.0);
        }
    }

    double mean_count(double t) const {
        if (!have_all && t > cap) {
            // Only reachable when the exact region already exceeds the
            // target, so reporting the count at the cap still bisects in the
            // right direction.
            return mean_at_cap;
        }
        const auto it = std::upper_bound(kept.begin(), kept.end(), t);
        return static_cast<double>(it - kept.begin()) / static_cast<double>(query_ids.size());
    }

    double solve(double per_million) {
        if (!(per_million > 0))
            throw std::invalid_argument("calibrate_threshold: per_million must be positive");
        const double target = per_million * static_cast<double>(n) / 1e6;
        ensure(target);

        double lo = 0, hi = d_hi;
        double mid = hi, count = mean_count(hi);
        for (int iter = 0; iter < opt.max_iterations; ++iter) {
            mid = 0.5 * (lo + hi);
            count = mean_count(mid);
            if (std::abs(count - target) <= opt.count_tolerance * target) return mid;
            if (count > target)
                hi = mid;
            else
                lo = mid;
        }
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "calibrate_threshold: no threshold reaches %.6g results/query "
                      "(best %.6g at t=%.6g; count %.6g at t=0, %.6g at t=%.6g). "
                      "Duplicate-heavy data cannot be calibrated below its duplicate count.",
                      target, count, mid, mean_count(0.0), mean_count(d_hi), d_hi);
        throw calibration_error(buf);
    }
};

ThresholdCalibrator::ThresholdCalibrator(const Dataset& data, const MetricDescriptor& metric,
                                         std::uint64_t seed, CalibrationOptions options)
    : impl_(std::make_unique<Impl>(data, metric, seed, options)) {}

ThresholdCalibrator::~ThresholdCalibrator() = default;

double ThresholdCalibrator::solve(double per_million) { return impl_->solve(per_million); }

double ThresholdCalibrator::max_pilot_distance() const { return impl_->d_hi; }

double calibrate_threshold(const Dataset& data, const MetricDescriptor& metric,
                           double per_million, std::uint64_t seed,
                           const CalibrationOptions& options) {
    return ThresholdCalibrator(data, metric, seed, options).solve(per_million);
}

SpaceProfile profile_space(const Dataset& data, const MetricDescriptor& metric,
                           std::uint64_t seed, std::size_t idim_pairs,
                           const CalibrationOptions& options) {
    SpaceProfile profile;
    profile.idim = idim(data, metric, idim_pairs, seed);
    ThresholdCalibrator calibrator(data, metric, seed, options);
    for (const int per_million : {1, 2, 4, 8, 16, 32})
        profile.thresholds.emplace_back("t" + std::to_string(per_million),
                                        calibrator.solve(per_million));
    return profile;
}

// ---------------------------------------------------------------------------
// Exclusion power

namespace {

struct TrialCounts {
    std::uint64_t hyperbolic = 0;
    std::uint64_t hilbert = 0;
    std::uint64_t pivot = 0;
};

double proportion_sem(double p, std::size_t trials) {
    return trials == 0 ? 0.0 : std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

} // namespace

std::vector<PowerResult> exclusion_power_multi(const Dataset& data,
                                               const MetricDescriptor& metric,
                                               std::span<const double> thresholds,
                                               std::uint64_t seed, const PowerOptions& opt) {
    const std::size_t n = data.n();
    if (n < 3) throw std::invalid_argument("exclusion_power: need at least three points");
    if (thresholds.empty()) throw std::invalid_argument("exclusion_power: no thresholds");
    for (const double t : thresholds)
        if (!(t > 0)) throw std::invalid_argument("exclusion_power: thresholds must be > 0");

    const bool with_hilbert = metric.hilbert_safe;
    const std::size_t median_sample = std::min(opt.median_sample, n);
    const std::size_t batch = 8192;

    std::vector<TrialCounts> counts(thresholds.size());
    std::size_t trials = 0;

    // One trial: a random pivot pair partitions the space, a random query
    // tries to discard one side under each mechanism. The single-pivot
    // mechanism uses the median distance from p1 over a fresh sample as its
    // ball radius. Each trial is seeded from its global index, so results do
    // not depend on batching or thread count.
    while (trials < opt.max_trials) {
        const std::size_t this_batch = std::min(batch, opt.max_trials - trials);
        std::vector<TrialCounts> batch_counts(this_batch * thresholds.size());

        parallel_for(0, this_batch, [&](std::size_t b) {
            Rng rng(derive_seed(seed, kStreamTrialBase + trials + b));
            std::size_t p1 = rng.index(n), p2 = p1;
            double d12 = 0;
            for (int attempt = 0; attempt < 1000; ++attempt) {
                p2 = rng.index(n);
                if (p2 == p1) continue;
                d12 = dist_rows(data, metric, p1, p2);
                if (d12 > 0) break;
            }
            if (d12 <= 0)
                throw degenerate_space("exclusion_power: could not find distinct pivots");
            std::size_t q = rng.index(n);
            while (q == p1 || q == p2) q = rng.index(n);

            const double d1 = dist_rows(data, metric, q, p1);
            const double d2 = dist_rows(data, metric, q, p2);

            std::vector<double> sample(median_sample);
            for (double& d : sample) d = dist_rows(data, metric, rng.index(n), p1);
            std::nth_element(sample.begin(), sample.begin() + median_sample / 2, sample.end());
            const double median = sample[median_sample / 2];

            for (std::size_t k = 0; k < thresholds.size(); ++k) {
                const double t = thresholds[k];
                auto& c = batch_counts[b * thresholds.size() + k];
                if (hyperbolic_rule(d1, d2, t).any()) c.hyperbolic = 1;
                if (with_hilbert && hilbert_rule(d1, d2, d12, t).any()) c.hilbert = 1;
                if (d1 > median + t || d1 <= median - t) c.pivot = 1;
            }
        });

        for (std::size_t b = 0; b < this_batch; ++b)
            for (std::size_t k = 0; k < thresholds.size(); ++k) {
                const auto& c = batch_counts[b * thresholds.size() + k];
                counts[k].hyperbolic += c.hyperbolic;
                counts[k].hilbert += c.hilbert;
                counts[k].pivot += c.pivot;
            }
        trials += this_batch;

        if (trials >= opt.min_trials) {
            bool converged = true;
            for (const auto& c : counts) {
                const std::uint64_t cols[] = {c.hyperbolic, with_hilbert ? c.hilbert : 1,
                                              c.pivot};
                for (const std::uint64_t hits : cols) {
                    if (hits == 0) {
                        converged = false;
                        break;
                    }
                    const double p = static_cast<double>(hits) / static_cast<double>(trials);
                    if (proportion_sem(p, trials) >= opt.sem_target * p) converged = false;
                }
                if (!converged) break;
            }
            if (converged) break;
        }
    }

    std::vector<PowerResult> out;
    out.reserve(thresholds.size());
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
        PowerResult r;
        r.space = data.label;
        r.metric = metric.name;
        r.dimension = data.dim;
        r.threshold = thresholds[k];
        r.trials = trials;
        const double p_hyp = static_cast<double>(counts[k].hyperbolic) / trials;
        const double p_piv = static_cast<double>(counts[k].pivot) / trials;
        r.hyperbolic_pct = p_hyp * 100.0;
        r.hyperbolic_sem = proportion_sem(p_hyp, trials) * 100.0;
        r.pivot_pct = p_piv * 100.0;
        r.pivot_sem = proportion_sem(p_piv, trials) * 100.0;
        if (with_hilbert) {
            const double p_hil = static_cast<double>(counts[k].hilbert) / trials;
            r.hilbert_pct = p_hil * 100.0;
            r.hilbert_sem = proportion_sem(p_hil, trials) * 100.0;
        }
        out.push_back(std::move(r));
    }
    return out;
}

PowerResult exclusion_power(const Dataset& data, const MetricDescriptor& metric, double t,
                            std::uint64_t seed, const PowerOptions& options) {
    const double ts[] = {t};
    return exclusion_power_multi(data, metric, ts, seed, options).front();
}

std::vector<PlotRow> power_plot_data(const Dataset& points, const double* p1, const double* p2,
                                     const MetricDescriptor& metric, double t) {
    const std::size_t n = points.n();
    if (n == 0) throw std::invalid_argument("power_plot_data: empty sample");
    if (!(t > 0)) throw std::invalid_argument("power_plot_data: threshold must be > 0");
    const double d12 = metric.distance(p1, p2, points.dim);
    if (d12 <= 0) throw std::invalid_argument("power_plot_data: degenerate pivots");

    std::vector<double> d_p1(n);
    for (std::size_t i = 0; i < n; ++i) d_p1[i] = metric.distance(points.row(i), p1, points.dim);

    std::vector<double> by_rank(d_p1);
    std::nth_element(by_rank.begin(), by_rank.begin() + n / 2, by_rank.end());
    const double median = by_rank[n / 2];

    std::vector<PlotRow> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d1 = d_p1[i];
        const double d2 = metric.distance(points.row(i), p2, points.dim);
        const Point2 xy = planar_project(d1, d2, d12);
        PlotRow& row = rows[i];
        row.x = xy.x;
        row.y = xy.y;
        row.hyperbolic = hyperbolic_rule(d1, d2, t).any();
        row.hilbert = hilbert_rule(d1, d2, d12, t).any();
        row.pivot = d1 > median + t || d1 <= median - t;
    }
    return rows;
}

} // namespace hilbex
