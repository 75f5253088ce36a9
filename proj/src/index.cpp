#include "hilbex/index.hpp"

#include <algorithm>
#include <numeric>

#include "hilbex/geometry.hpp"
#include "hilbex/random.hpp"

namespace hilbex {

namespace {

constexpr std::size_t kPivotSample = 100; // candidate pool for the far pivot

constexpr std::uint8_t kIntroduceP1 = 1;
constexpr std::uint8_t kIntroduceP2 = 2;

} // namespace

HyperplaneTree::HyperplaneTree(const Dataset& data, const MetricDescriptor& metric,
                               TreeKind kind, std::uint32_t leaf_capacity, std::uint64_t seed,
                               PivotPolicy policy)
    : HyperplaneTree(data, metric, kind, leaf_capacity, seed,
                     [&data] {
                         std::vector<std::uint32_t> all(data.n());
                         std::iota(all.begin(), all.end(), 0u);
                         return all;
                     }(),
                     policy) {}

HyperplaneTree::HyperplaneTree(const Dataset& data, const MetricDescriptor& metric,
                               TreeKind kind, std::uint32_t leaf_capacity, std::uint64_t seed,
                               std::vector<std::uint32_t> subset, PivotPolicy policy)
    : data_(&data), metric_(metric), kind_(kind), leaf_capacity_(leaf_capacity),
      policy_(policy) {
    if (subset.empty()) throw std::invalid_argument("HyperplaneTree: at least one point required");
    if (leaf_capacity_ == 0) throw std::invalid_argument("HyperplaneTree: leaf capacity must be > 0");
    size_ = subset.size();
    build(std::move(subset), seed);
}

std::int32_t HyperplaneTree::make_leaf(std::span<const std::uint32_t> ids) {
    const auto begin = static_cast<std::uint32_t>(leaf_ids_.size());
    leaf_ids_.insert(leaf_ids_.end(), ids.begin(), ids.end());
    leaf_ranges_.emplace_back(begin, static_cast<std::uint32_t>(leaf_ids_.size()));
    return -static_cast<std::int32_t>(leaf_ranges_.size());
}

void HyperplaneTree::build(std::vector<std::uint32_t> ids, std::uint64_t seed) {
    Rng rng(seed);
    const auto dist = [this](std::uint32_t a, std::uint32_t b) {
        return metric_.distance(data_->row(a), data_->row(b), data_->dim);
    };

    struct WorkItem {
        std::vector<std::uint32_t> ids;
        std::int32_t parent;     // -1 for the root
        int slot;                // 0 = child1, 1 = child2
        std::uint32_t inherited; // pivot reused from the parent (MHT only)
        bool has_inherited;
    };

    auto attach = [this](std::int32_t parent, int slot, std::int32_t handle) {
        if (parent < 0)
            root_ = handle;
        else if (slot == 0)
            nodes_[static_cast<std::size_t>(parent)].child1 = handle;
        else
            nodes_[static_cast<std::size_t>(parent)].child2 = handle;
    };

    std::vector<WorkItem> stack;
    stack.push_back({std::move(ids), -1, 0, 0, false});

    while (!stack.empty()) {
        WorkItem item = std::move(stack.back());
        stack.pop_back();
        auto& subset = item.ids;

        if (subset.size() <= leaf_capacity_) {
            attach(item.parent, item.slot, make_leaf(subset));
            continue;
        }

        // First pivot: inherited from the parent for MHT children, otherwise
        // drawn uniformly from the subset.
        std::uint32_t p1;
        bool p1_owned;
        if (item.has_inherited) {
            p1 = item.inherited;
            p1_owned = false;
        } else {
            const std::size_t pos = rng.index(subset.size());
            p1 = subset[pos];
            subset[pos] = subset.back();
            subset.pop_back();
            p1_owned = true;
        }

        // Second pivot from the remaining subset.
        std::size_t pos2 = 0;
        if (policy_ == PivotPolicy::RandomFarthest) {
            const std::size_t k = std::min(kPivotSample, subset.size());
            double best = -1.0;
            for (std::size_t j = 0; j < k; ++j) {
                const std::size_t r = j + rng.index(subset.size() - j);
                std::swap(subset[j], subset[r]);
                const double d = dist(p1, subset[j]);
                if (d > best) {
                    best = d;
                    pos2 = j;
                }
            }
        } else {
            pos2 = rng.index(subset.size());
        }
        const std::uint32_t p2 = subset[pos2];
        const double d_pivots = dist(p1, p2);

        if (d_pivots == 0) {
            // Duplicate pivots leave the hyperplane undefined; stop splitting
            // and emit a leaf over the whole subset (pivots included where
            // they are owned by this node).
            if (p1_owned) subset.push_back(p1);
            attach(item.parent, item.slot, make_leaf(subset));
            continue;
        }
        subset[pos2] = subset.back();
        subset.pop_back();

        Node node;
        node.pivot1 = p1;
        node.pivot2 = p2;
        node.d_pivots = d_pivots;
        node.introduces = static_cast<std::uint8_t>(
            (p1_owned ? kIntroduceP1 : 0) | kIntroduceP2);

        // Partition by the closer pivot; ties go right, and each side records
        // the cover radius around its own pivot.
        std::vector<std::uint32_t> left, right;
        left.reserve(subset.size() / 2 + 1);
        right.reserve(subset.size() / 2 + 1);
        double r1 = 0, r2 = 0;
        for (const std::uint32_t x : subset) {
            const double d1 = dist(x, p1);
            const double d2 = dist(x, p2);
            if (d1 < d2) {
                left.push_back(x);
                r1 = std::max(r1, d1);
            } else {
                right.push_back(x);
                r2 = std::max(r2, d2);
            }
        }
        node.cover_radius1 = r1;
        node.cover_radius2 = r2;

        const auto node_index = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back(node);
        attach(item.parent, item.slot, node_index);

        const bool mht = kind_ == TreeKind::Mht;
        // child1 is pushed last so it is processed first (stable rng order).
        stack.push_back({std::move(right), node_index, 1, p2, mht});
        stack.push_back({std::move(left), node_index, 0, p1, mht});
    }
}

std::size_t HyperplaneTree::depth() const {
    if (root_ < 0) return 0;
    std::size_t max_depth = 0;
    std::vector<std::pair<std::int32_t, std::size_t>> stack{{root_, 1}};
    while (!stack.empty()) {
        const auto [handle, depth] = stack.back();
        stack.pop_back();
        max_depth = std::max(max_depth, depth);
        const Node& node = nodes_[static_cast<std::size_t>(handle)];
        if (node.child1 >= 0) stack.push_back({node.child1, depth + 1});
        if (node.child2 >= 0) stack.push_back({node.child2, depth + 1});
    }
    return max_depth;
}

QueryStats HyperplaneTree::range_query(std::span<const double> q, double t,
                                       ExclusionStrategy strategy) const {
    if (q.size() != data_->dim)
        throw std::invalid_argument("range_query: query dimension mismatch");
    return range_query(q.data(), t, strategy);
}

QueryStats HyperplaneTree::range_query(const double* q, double t,
                                       ExclusionStrategy strategy) const {
    if (strategy.rule == HyperplaneRule::Hilbert && !metric_.hilbert_safe)
        throw config_error("range_query: Hilbert exclusion requires a metric with the "
                           "four-point property; '" +
                           metric_.name + "' is not marked hilbert_safe");
    if (!(t > 0)) throw std::invalid_argument("range_query: threshold must be > 0");

    QueryStats stats;
    const auto dist = [&](std::uint32_t id) {
        ++stats.distance_calls;
        return metric_.distance(q, data_->row(id), data_->dim);
    };
    const auto scan_leaf = [&](std::int32_t handle) {
        const auto [begin, end] = leaf_ranges_[static_cast<std::size_t>(-handle - 1)];
        for (std::uint32_t i = begin; i < end; ++i) {
            const std::uint32_t id = leaf_ids_[i];
            ++stats.leaf_points_scanned;
            if (dist(id) <= t) stats.results.push_back(id);
        }
    };

    if (root_ < 0) {
        scan_leaf(root_);
        return stats;
    }

    struct Visit {
        std::int32_t handle;
        double d_pivot1; // valid when known (MHT child reuse)
        bool known;
    };
    std::vector<Visit> stack{{root_, 0.0, false}};
    const bool mht = kind_ == TreeKind::Mht;

    while (!stack.empty()) {
        const Visit visit = stack.back();
        stack.pop_back();
        if (visit.handle < 0) {
            scan_leaf(visit.handle);
            continue;
        }

        const Node& node = nodes_[static_cast<std::size_t>(visit.handle)];
        ++stats.nodes_visited;
        const double d1 = visit.known ? visit.d_pivot1 : dist(node.pivot1);
        const double d2 = dist(node.pivot2);

        if ((node.introduces & kIntroduceP1) && d1 <= t) stats.results.push_back(node.pivot1);
        if ((node.introduces & kIntroduceP2) && d2 <= t) stats.results.push_back(node.pivot2);

        bool skip1 = false, skip2 = false;
        if (strategy.use_cover_radius) {
            skip1 = d1 > node.cover_radius1 + t;
            skip2 = d2 > node.cover_radius2 + t;
        }
        if (strategy.rule == HyperplaneRule::Hyperbolic) {
            const ExclusionDecision e = hyperbolic_rule(d1, d2, t);
            skip1 = skip1 || e.exclude_p1_side;
            skip2 = skip2 || e.exclude_p2_side;
        } else if (strategy.rule == HyperplaneRule::Hilbert) {
            const ExclusionDecision e = hilbert_rule(d1, d2, node.d_pivots, t);
            skip1 = skip1 || e.exclude_p1_side;
            skip2 = skip2 || e.exclude_p2_side;
        }

        if (!skip2) stack.push_back({node.child2, d2, mht && node.child2 >= 0});
        if (!skip1) stack.push_back({node.child1, d1, mht && node.child1 >= 0});
    }
    return stats;
}

QueryStats linear_scan(const Dataset& data, const MetricDescriptor& metric, const double* q,
                       double t) {
    if (t < 0) throw std::invalid_argument("linear_scan: threshold must be >= 0");
    QueryStats stats;
    const std::size_t n = data.n();
    for (std::size_t i = 0; i < n; ++i) {
        ++stats.distance_calls;
        if (metric.distance(q, data.row(i), data.dim) <= t)
            stats.results.push_back(static_cast<std::uint32_t>(i));
    }
    return stats;
}

QueryStats linear_scan(const Dataset& data, const MetricDescriptor& metric,
                       std::span<const double> q, double t) {
    if (q.size() != data.dim)
        throw std::invalid_argument("linear_scan: query dimension mismatch");
    return linear_scan(data, metric, q.data(), t);
}

QueryStats linear_scan_subset(const Dataset& data, const MetricDescriptor& metric,
                              std::span<const std::uint32_t> ids, const double* q, double t) {
    if (t < 0) throw std::invalid_argument("linear_scan: threshold must be >= 0");
    QueryStats stats;
    for (const std::uint32_t id : ids) {
        ++stats.distance_calls;
        if (metric.distance(q, data.row(id), data.dim) <= t) stats.results.push_back(id);
    }
    return stats;
}

} // namespace hilbex
