#include "hilbex/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace hilbex {

namespace {

void check_triangle(double a, double b, double c, const char* what) {
    if (a < 0 || b < 0 || c < 0)
        throw std::invalid_argument(std::string(what) + ": negative distance");
    if (a > b + c + kTriangleTol || b > a + c + kTriangleTol || c > a + b + kTriangleTol)
        throw std::invalid_argument(std::string(what) +
                                    ": distances violate the triangle inequality");
}

void check_pair(const PivotPair& p, const char* what) {
    check_triangle(p.d_q_p1, p.d_q_p2, p.d_p1_p2, what);
}

void check_threshold(double t, const char* what) {
    if (!(t > 0)) throw std::invalid_argument(std::string(what) + ": threshold must be > 0");
}

// Smallest eigenvalue of a symmetric 3x3 matrix, via the trigonometric
// closed form for the characteristic polynomial.
double sym3_min_eigenvalue(double a00, double a01, double a02, double a11, double a12,
                           double a22) {
    const double p1 = a01 * a01 + a02 * a02 + a12 * a12;
    if (p1 == 0) return std::min({a00, a11, a22});

    const double q = (a00 + a11 + a22) / 3.0;
    const double p2 =
        (a00 - q) * (a00 - q) + (a11 - q) * (a11 - q) + (a22 - q) * (a22 - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);

    const double b00 = (a00 - q) / p, b11 = (a11 - q) / p, b22 = (a22 - q) / p;
    const double b01 = a01 / p, b02 = a02 / p, b12 = a12 / p;
    const double det_b = b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02) +
                         b02 * (b01 * b12 - b11 * b02);
    double r = det_b / 2.0;
    r = std::clamp(r, -1.0, 1.0);

    const double phi = std::acos(r) / 3.0;
    return q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
}

} // namespace

ExclusionDecision hyperbolic_exclusion(const PivotPair& p, double t) {
    check_threshold(t, "hyperbolic_exclusion");
    check_pair(p, "hyperbolic_exclusion");
    return hyperbolic_rule(p.d_q_p1, p.d_q_p2, t);
}

ExclusionDecision hilbert_exclusion(const PivotPair& p, double t) {
    check_threshold(t, "hilbert_exclusion");
    if (!(p.d_p1_p2 > 0))
        throw std::invalid_argument("hilbert_exclusion: degenerate pivots (d_p1_p2 == 0)");
    check_pair(p, "hilbert_exclusion");
    return hilbert_rule(p.d_q_p1, p.d_q_p2, p.d_p1_p2, t);
}

double hyperplane_margin(const PivotPair& p) {
    if (!(p.d_p1_p2 > 0))
        throw std::invalid_argument("hyperplane_margin: degenerate pivots (d_p1_p2 == 0)");
    check_pair(p, "hyperplane_margin");
    return hyperplane_margin_raw(p.d_q_p1, p.d_q_p2, p.d_p1_p2);
}

PivotDecision pivot_exclusion(double d_q_p, double m, double t) {
    check_threshold(t, "pivot_exclusion");
    if (!(m > 0)) throw std::invalid_argument("pivot_exclusion: radius m must be > 0");
    if (d_q_p < 0) throw std::invalid_argument("pivot_exclusion: negative distance");
    if (d_q_p > m + t) return PivotDecision::ExcludeIn;
    if (d_q_p <= m - t) return PivotDecision::ExcludeOut;
    return PivotDecision::None;
}

Embedded3 embed_three(double d12, double d13, double d23) {
    check_triangle(d12, d13, d23, "embed_three");
    Embedded3 out;
    out.x2 = {d12, 0.0};
    if (d12 == 0) {
        // coincident base pair: consistent only when x3 is equidistant
        if (std::abs(d13 - d23) > kTriangleTol)
            throw std::invalid_argument("embed_three: d12 == 0 requires d13 == d23");
        out.x3 = {d13, 0.0};
        return out;
    }
    const double x = (d12 * d12 + d13 * d13 - d23 * d23) / (2.0 * d12);
    const double y2 = d13 * d13 - x * x;
    out.x3 = {x, std::sqrt(std::max(0.0, y2))};
    return out;
}

Point2 planar_project(double d_x_p1, double d_x_p2, double d_p1_p2) {
    if (!(d_p1_p2 > 0))
        throw std::invalid_argument("planar_project: degenerate pivots (d_p1_p2 == 0)");
    check_triangle(d_x_p1, d_x_p2, d_p1_p2, "planar_project");
    const double x = hyperplane_margin_raw(d_x_p1, d_x_p2, d_p1_p2);
    const double half = d_p1_p2 / 2.0;
    const double y2 = d_x_p1 * d_x_p1 - (x + half) * (x + half);
    return {x, std::sqrt(std::max(0.0, y2))};
}

double DistanceMatrix4::at(int i, int j) const {
    if (i == j) return 0;
    if (i > j) std::swap(i, j);
    if (i == 0) return j == 1 ? d01 : j == 2 ? d02 : d03;
    if (i == 1) return j == 2 ? d12 : d13;
    return d23;
}

bool four_point_check(const DistanceMatrix4& m) {
    const int triples[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
    for (const auto& tr : triples)
        check_triangle(m.at(tr[0], tr[1]), m.at(tr[0], tr[2]), m.at(tr[1], tr[2]),
                       "four_point_check");

    // Gram-style matrix with point 0 as the base; PSD here is equivalent to
    // conditional negative semidefiniteness of the squared distances.
    auto g = [&m](int i, int j) {
        const double a = m.at(0, i), b = m.at(0, j), c = m.at(i, j);
        return 0.5 * (a * a + b * b - c * c);
    };
    const double min_eig =
        sym3_min_eigenvalue(g(1, 1), g(1, 2), g(1, 3), g(2, 2), g(2, 3), g(3, 3));
    return min_eig >= -kPsdTol;
}

} // namespace hilbex
