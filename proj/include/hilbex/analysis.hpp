#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hilbex/dataset.hpp"
#include "hilbex/metrics.hpp"

namespace hilbex {

// All sampled distances were equal: the distance distribution carries no
// dimensionality signal.
struct degenerate_space : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Threshold search failed to converge on the requested selectivity.
struct calibration_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Intrinsic dimensionality mu^2 / (2 sigma^2) of a distance sample
// (population sigma). Throws degenerate_space when sigma == 0.
double idim_from_distances(std::span<const double> distances);

// IDIM over `sample_pairs` random distinct-index pairs from the dataset.
double idim(const Dataset& data, const MetricDescriptor& metric,
            std::size_t sample_pairs, std::uint64_t seed);

struct CalibrationOptions {
    std::size_t query_sample = 256; // held-out query points
    std::size_t pilot_pairs = 10000;
    int max_iterations = 40;
    double count_tolerance = 0.10; // accepted relative error on the mean count
};

// Finds t such that queries return about per_million results per million
// data. A query sample is held out of the dataset, per-query linear-scan
// counts against the remaining points are collected once, and t is bisected
// over [0, max pilot distance] until the mean count lands within
// count_tolerance of per_million * n / 1e6. Throws calibration_error when no
// threshold can reach the requested selectivity (e.g. duplicate floods).
double calibrate_threshold(const Dataset& data, const MetricDescriptor& metric,
                           double per_million, std::uint64_t seed,
                           const CalibrationOptions& options = {});

// Shares the expensive distance collection across several selectivity
// targets on the same dataset.
class ThresholdCalibrator {
  public:
    ThresholdCalibrator(const Dataset& data, const MetricDescriptor& metric,
                        std::uint64_t seed, CalibrationOptions options = {});
    ~ThresholdCalibrator();

    double solve(double per_million);
    double max_pilot_distance() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// IDIM plus the t1..t32 threshold ladder for one space.
struct SpaceProfile {
    double idim = 0;
    std::vector<std::pair<std::string, double>> thresholds; // ("t1", value), ...
};

SpaceProfile profile_space(const Dataset& data, const MetricDescriptor& metric,
                           std::uint64_t seed, std::size_t idim_pairs = 1000000,
                           const CalibrationOptions& options = {});

// One row of the exclusion-power experiment: how often a random query could
// prune one half of a random pivot partition at threshold t, per mechanism.
// hilbert_pct is absent when the metric lacks the four-point property.
struct PowerResult {
    std::string space;
    std::string metric;
    std::size_t dimension = 0;
    std::string t_label;
    double threshold = 0;
    std::size_t trials = 0;
    double hyperbolic_pct = 0;
    double hyperbolic_sem = 0;
    std::optional<double> hilbert_pct;
    double hilbert_sem = 0;
    double pivot_pct = 0;
    double pivot_sem = 0;
};

struct PowerOptions {
    std::size_t max_trials = 2000000;
    std::size_t min_trials = 20000;
    std::size_t median_sample = 500; // per-trial sample for the pivot median
    double sem_target = 0.01;        // stop when SEM < target * mean, per column
};

// Repeats: draw a random pivot pair and a random query from the dataset,
// test whether each mechanism excludes a semispace at threshold t. The
// single-pivot column uses p1 with the median of d(x, p1) over a fresh
// random sample as the ball radius. Trials stop once every reported column
// has SEM below sem_target of its mean, or at max_trials.
PowerResult exclusion_power(const Dataset& data, const MetricDescriptor& metric,
                            double t, std::uint64_t seed,
                            const PowerOptions& options = {});

// Same, with one trial set shared across several thresholds.
std::vector<PowerResult> exclusion_power_multi(const Dataset& data,
                                               const MetricDescriptor& metric,
                                               std::span<const double> thresholds,
                                               std::uint64_t seed,
                                               const PowerOptions& options = {});

// One plotted point of the power illustration: planar coordinates against
// the pivot pair plus the three per-mechanism exclusion flags.
struct PlotRow {
    double x = 0;
    double y = 0;
    bool hyperbolic = false;
    bool hilbert = false;
    bool pivot = false;
};

// Projects every point onto the plane spanned by the pivot images at
// (-d/2, 0) and (+d/2, 0) and flags which points could exclude the opposing
// semispace at threshold t. The pivot column uses the median of d(x, p1)
// over exactly this sample.
std::vector<PlotRow> power_plot_data(const Dataset& points, const double* p1,
                                     const double* p2, const MetricDescriptor& metric,
                                     double t);

} // namespace hilbex
