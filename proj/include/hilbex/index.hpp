#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "hilbex/dataset.hpp"
#include "hilbex/metrics.hpp"

namespace hilbex {

// Raised when a query configuration is invalid, e.g. Hilbert exclusion
// requested for a metric without the four-point property.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class TreeKind { Ght, Mht };

enum class HyperplaneRule { None, Hyperbolic, Hilbert };

struct ExclusionStrategy {
    HyperplaneRule rule = HyperplaneRule::Hyperbolic;
    bool use_cover_radius = true;
};

// Per-query result set and cost accounting. distance_calls counts every
// metric invocation made while answering the query (pivot distances
// included); inter-pivot distances were paid at build time and are not
// counted. nodes_visited / leaf_points_scanned expose the traversal shape
// for instrumentation.
struct QueryStats {
    std::vector<std::uint32_t> results;
    std::uint64_t distance_calls = 0;
    std::uint64_t nodes_visited = 0;
    std::uint64_t leaf_points_scanned = 0;
};

// How the second pivot of a partition node is chosen. RandomFarthest picks
// the point farthest from pivot1 within a random sample of up to 100
// candidates; RandomRandom picks uniformly.
enum class PivotPolicy { RandomFarthest, RandomRandom };

// Hyperplane-partition search tree over a Dataset: either a generalised
// hyperplane tree (both pivots fresh per node) or a monotonous hyperplane
// tree (each child reuses the parent pivot it was assigned to, so a query
// pays one new pivot distance per visited node instead of two).
//
// Every node keeps the inter-pivot distance and one cover radius per child
// (max distance from the child's pivot to any point in that subtree), so
// queries can combine ball and hyperplane pruning. Points equidistant from
// both pivots go to the p2 child. A pivot pair at distance zero (duplicate
// data) stops splitting and emits a leaf.
//
// The tree is immutable once built and safe for concurrent read-only
// queries. It does not own the dataset.
class HyperplaneTree {
  public:
    HyperplaneTree(const Dataset& data, const MetricDescriptor& metric, TreeKind kind,
                   std::uint32_t leaf_capacity, std::uint64_t seed,
                   PivotPolicy policy = PivotPolicy::RandomFarthest);

    // Builds over a subset of rows; reported ids remain dataset row indices.
    HyperplaneTree(const Dataset& data, const MetricDescriptor& metric, TreeKind kind,
                   std::uint32_t leaf_capacity, std::uint64_t seed,
                   std::vector<std::uint32_t> subset,
                   PivotPolicy policy = PivotPolicy::RandomFarthest);

    // All indexed points s with d(q, s) <= t. Throws config_error for a
    // Hilbert strategy on a metric whose hilbert_safe flag is false.
    QueryStats range_query(const double* q, double t, ExclusionStrategy strategy) const;
    QueryStats range_query(std::span<const double> q, double t, ExclusionStrategy strategy) const;

    TreeKind kind() const { return kind_; }
    const MetricDescriptor& metric() const { return metric_; }
    std::size_t size() const { return size_; }         // indexed points
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t depth() const;                         // internal levels; 0 for a lone leaf

  private:
    struct Node {
        std::uint32_t pivot1 = 0;
        std::uint32_t pivot2 = 0;
        double d_pivots = 0;      // > 0 for every internal node
        double cover_radius1 = 0; // max d(x, pivot1) over the p1 child
        double cover_radius2 = 0; // max d(x, pivot2) over the p2 child
        std::int32_t child1 = 0;  // >= 0: node index; < 0: leaf id -(c+1)
        std::int32_t child2 = 0;
        std::uint8_t introduces = 0; // bit 0: pivot1 reported here; bit 1: pivot2
    };

    void build(std::vector<std::uint32_t> ids, std::uint64_t seed);
    std::int32_t make_leaf(std::span<const std::uint32_t> ids);

    const Dataset* data_ = nullptr;
    MetricDescriptor metric_;
    TreeKind kind_;
    std::uint32_t leaf_capacity_;
    PivotPolicy policy_;
    std::size_t size_ = 0;
    std::int32_t root_ = 0;
    std::vector<Node> nodes_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> leaf_ranges_;
    std::vector<std::uint32_t> leaf_ids_;
};

// Exhaustive oracle: scans every row; distance_calls == n.
QueryStats linear_scan(const Dataset& data, const MetricDescriptor& metric,
                       const double* q, double t);
QueryStats linear_scan(const Dataset& data, const MetricDescriptor& metric,
                       std::span<const double> q, double t);

// Oracle over a subset of rows (ids reported as dataset row indices).
QueryStats linear_scan_subset(const Dataset& data, const MetricDescriptor& metric,
                              std::span<const std::uint32_t> ids, const double* q, double t);

} // namespace hilbex
