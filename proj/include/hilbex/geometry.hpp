#pragma once

#include <cmath>
#include <stdexcept>

namespace hilbex {

// Tolerance for "these distances came from a real metric space": triangle
// inequality and embedding residuals are accepted up to this slack, on the
// assumption that shipped distances are unit-scale.
inline constexpr double kTriangleTol = 1e-9;

// Eigenvalue slack for the positive-semidefiniteness decision in
// four_point_check.
inline constexpr double kPsdTol = 1e-9;

// The three distances a hyperplane-partition node sees for a query: query to
// each pivot, and the (precomputed) inter-pivot distance.
struct PivotPair {
    double d_q_p1 = 0;
    double d_q_p2 = 0;
    double d_p1_p2 = 0;
};

// Outcome of a hyperplane exclusion test. At most one side is excluded.
struct ExclusionDecision {
    bool exclude_p1_side = false;
    bool exclude_p2_side = false;

    bool any() const { return exclude_p1_side || exclude_p2_side; }
};

enum class PivotDecision { ExcludeIn, ExcludeOut, None };

// --- raw rules ------------------------------------------------------------
// Unchecked forms used in query hot loops, where the inputs come from a
// metric evaluation and revalidation per node would be waste.

inline double hyperplane_margin_raw(double d1, double d2, double d12) {
    return (d1 * d1 - d2 * d2) / (2.0 * d12);
}

inline ExclusionDecision hyperbolic_rule(double d1, double d2, double t) {
    ExclusionDecision out;
    if (d1 - d2 > 2.0 * t)
        out.exclude_p1_side = true;
    else if (d2 - d1 > 2.0 * t)
        out.exclude_p2_side = true;
    return out;
}

inline ExclusionDecision hilbert_rule(double d1, double d2, double d12, double t) {
    const double margin = hyperplane_margin_raw(d1, d2, d12);
    ExclusionDecision out;
    if (margin > t)
        out.exclude_p1_side = true;
    else if (-margin > t)
        out.exclude_p2_side = true;
    return out;
}

// --- checked operations ----------------------------------------------------

// Excludes the side of the farther pivot iff |d(q,p1) - d(q,p2)| > 2t.
// Valid in any metric space.
ExclusionDecision hyperbolic_exclusion(const PivotPair& p, double t);

// Excludes the side of the farther pivot iff
// |d(q,p1)^2 - d(q,p2)^2| / (2 d(p1,p2)) > t. Valid only when the metric has
// the four-point property; the caller owns that check (this function never
// sees the metric). Degenerate pivots (d_p1_p2 == 0) are an input error.
ExclusionDecision hilbert_exclusion(const PivotPair& p, double t);

// Signed distance from the query to the bisecting hyperplane in the
// 4-point Euclidean embedding: (d1^2 - d2^2) / (2 d12). Positive means the
// query lies on p2's side.
double hyperplane_margin(const PivotPair& p);

// Single-pivot shell test around a ball of radius m centred at the pivot:
// everything inside can be dropped when d_q_p > m + t, everything outside
// when d_q_p <= m - t.
PivotDecision pivot_exclusion(double d_q_p, double m, double t);

struct Point2 {
    double x = 0;
    double y = 0;
};

// Planar embedding of three points given their pairwise distances:
// x1' at the origin, x2' on the positive X axis, x3' in the upper half
// plane. The construction is isometric (pairwise planar distances reproduce
// the inputs within kTriangleTol).
struct Embedded3 {
    Point2 x1, x2, x3;
};

Embedded3 embed_three(double d12, double d13, double d23);

// Plots a point against a pivot pair placed symmetrically on the X axis at
// (-d/2, 0) and (+d/2, 0); the returned y is non-negative. The X coordinate
// equals the signed hyperplane margin of the point.
Point2 planar_project(double d_x_p1, double d_x_p2, double d_p1_p2);

// Pairwise distances among four abstract points, indexed 0..3.
struct DistanceMatrix4 {
    double d01 = 0, d02 = 0, d03 = 0, d12 = 0, d13 = 0, d23 = 0;

    double at(int i, int j) const;
};

// Decides whether the four points embed isometrically in 3-dimensional
// Euclidean space, i.e. whether the squared-distance matrix is conditionally
// negative semidefinite. Decided via the classical reformulation: the 3x3
// matrix G[i][j] = (d(x0,xi)^2 + d(x0,xj)^2 - d(xi,xj)^2) / 2 must be
// positive semidefinite (smallest eigenvalue >= -kPsdTol).
bool four_point_check(const DistanceMatrix4& m);

} // namespace hilbex
