#pragma once

#include "polywave/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace polywave {

struct QuadPoint {
    Vec2 x;
    double w;
};

// Quadrature on a 2D region; weights sum to the region area.
struct PolygonQuadrature {
    std::vector<QuadPoint> points;
    int order = 0;

    double sum_weights() const
    {
        double s = 0.0;
        for (const auto& q : points) s += q.w;
        return s;
    }
    template <class F> double integrate(F&& f) const
    {
        double s = 0.0;
        for (const auto& q : points) s += q.w * f(q.x);
        return s;
    }
};

// Quadrature on a segment; weights sum to its length. `s` is the signed
// parameter in [-1,1] along the stored edge direction, used by the Legendre
// edge test functions.
struct EdgeQuadrature {
    std::vector<Vec2> points;
    std::vector<double> weights;
    std::vector<double> params;
    int order = 0;

    template <class F> double integrate(F&& f) const
    {
        double s = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) s += weights[i] * f(points[i]);
        return s;
    }
};

namespace quadrature {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights)
{
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

inline double legendre(int n, double s)
{
    if (n == 0) return 1.0;
    double p0 = 1.0, p1 = s;
    for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * s * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

struct TriOrbit3 {
    double a, w;
}; // barycentric (1-2a, a, a), weight per point (area fraction)
struct TriOrbit6 {
    double a, b, w;
}; // barycentric (1-a-b, a, b) and permutations

struct TriRule {
    int degree;
    double w_centroid; // 0 when unused
    std::vector<TriOrbit3> orb3;
    std::vector<TriOrbit6> orb6;
};

// Symmetric positive-weight rules (Strang/Dunavant family).
inline const std::vector<TriRule>& triangle_rules()
{
    static const std::vector<TriRule> rules = {
        {1, 1.0, {}, {}},
        {2, 0.0, {{1.0 / 6.0, 1.0 / 3.0}}, {}},
        {4,
         0.0,
         {{0.445948490915965, 0.223381589678011}, {0.091576213509771, 0.109951743655322}},
         {}},
        {5,
         0.225,
         {{0.470142064105115, 0.132394152788506}, {0.101286507323456, 0.125939180544827}},
         {}},
        {6,
         0.0,
         {{0.249286745170910, 0.116786275726379}, {0.063089014491502, 0.050844906370207}},
         {{0.310352451033785, 0.636502499121399, 0.082851075618374}}},
        {9,
         0.097135796282799,
         {{0.489682519198738, 0.031334700227139},
          {0.437089591492937, 0.077827541004774},
          {0.188203535619033, 0.079647738927210},
          {0.044729513394453, 0.025577675658698}},
         {{0.221962989160766, 0.036838412054736, 0.043283539377289}}},
    };
    return rules;
}

// Reference-triangle rule ((0,0),(1,0),(0,1)), weights summing to 1/2.
// Symmetric tables up to degree 9, collapsed tensor (Duffy) rule beyond.
inline std::vector<QuadPoint> reference_triangle_rule(int degree)
{
    degree = std::max(degree, 1);
    std::vector<QuadPoint> pts;
    const auto& rules = triangle_rules();
    const TriRule* rule = nullptr;
    for (const auto& r : rules)
        if (r.degree >= degree) {
            rule = &r;
            break;
        }
    if (rule) {
        auto add = [&pts](double l1, double l2, double l3, double w) {
            pts.push_back({Vec2(l2, l3), 0.5 * w});
            (void)l1;
        };
        if (rule->w_centroid != 0.0)
            add(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, rule->w_centroid);
        for (const auto& o : rule->orb3) {
            add(1.0 - 2.0 * o.a, o.a, o.a, o.w);
            add(o.a, 1.0 - 2.0 * o.a, o.a, o.w);
            add(o.a, o.a, 1.0 - 2.0 * o.a, o.w);
        }
        for (const auto& o : rule->orb6) {
            const double c = 1.0 - o.a - o.b;
            add(c, o.a, o.b, o.w);
            add(c, o.b, o.a, o.w);
            add(o.a, c, o.b, o.w);
            add(o.a, o.b, c, o.w);
            add(o.b, c, o.a, o.w);
            add(o.b, o.a, c, o.w);
        }
        return pts;
    }
    // Duffy: x = u, y = v(1-u); the Jacobian (1-u) raises the u-degree by one.
    const int q = (degree + 3) / 2;
    std::vector<double> gn, gw;
    gauss_legendre(q, gn, gw);
    pts.reserve(static_cast<std::size_t>(q) * q);
    for (int i = 0; i < q; ++i) {
        const double u = 0.5 * (gn[i] + 1.0);
        const double wu = 0.5 * gw[i];
        for (int j = 0; j < q; ++j) {
            const double v = 0.5 * (gn[j] + 1.0);
            const double wv = 0.5 * gw[j];
            pts.push_back({Vec2(u, v * (1.0 - u)), wu * wv * (1.0 - u)});
        }
    }
    return pts;
}

inline void map_triangle(const Vec2& a, const Vec2& b, const Vec2& c, int degree,
                         std::vector<QuadPoint>& out)
{
    const double jac = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x(); // 2*area
    for (const auto& q : reference_triangle_rule(degree)) {
        const Vec2 x = a + q.x.x() * (b - a) + q.x.y() * (c - a);
        out.push_back({x, q.w * 2.0 * std::abs(jac) * 0.5});
    }
}

// Ear clipping for the star-shape fallback.
inline std::vector<std::array<Vec2, 3>> ear_clip(Polygon poly)
{
    std::vector<std::array<Vec2, 3>> tris;
    if (signed_area(poly) < 0.0) std::reverse(poly.begin(), poly.end());
    auto is_ear = [&poly](std::size_t i) {
        const std::size_t n = poly.size();
        const Vec2& a = poly[(i + n - 1) % n];
        const Vec2& b = poly[i];
        const Vec2& c = poly[(i + 1) % n];
        const double cross = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
        if (cross <= 0.0) return false;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == (i + n - 1) % n || j == i || j == (i + 1) % n) continue;
            // barycentric point-in-triangle
            const Vec2 v0 = c - a, v1 = b - a, v2 = poly[j] - a;
            const double d00 = v0.dot(v0), d01 = v0.dot(v1), d11 = v1.dot(v1);
            const double d20 = v2.dot(v0), d21 = v2.dot(v1);
            const double den = d00 * d11 - d01 * d01;
            if (std::abs(den) < 1e-300) continue;
            const double u = (d11 * d20 - d01 * d21) / den;
            const double v = (d00 * d21 - d01 * d20) / den;
            if (u > 1e-14 && v > 1e-14 && u + v < 1.0 - 1e-14) return false;
        }
        return true;
    };
    int guard = 0;
    while (poly.size() > 3) {
        bool clipped = false;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            if (is_ear(i)) {
                const std::size_t n = poly.size();
                tris.push_back({poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]});
                poly.erase(poly.begin() + static_cast<std::ptrdiff_t>(i));
                clipped = true;
                break;
            }
        }
        if (!clipped || ++guard > 100000)
            throw std::runtime_error("ear_clip: polygon could not be triangulated");
    }
    tris.push_back({poly[0], poly[1], poly[2]});
    return tris;
}

} // namespace quadrature

// Quadrature on a polygon: fan triangulation around the centroid when the
// centroid sees every edge, ear clipping otherwise.
inline PolygonQuadrature polygon_rule(const Polygon& poly, int order)
{
    if (order < 0) throw std::invalid_argument("polygon_rule: order must be >= 0");
    PolygonQuadrature rule;
    rule.order = order;
    const std::size_t n = poly.size();
    const Vec2 c = polygon_centroid(poly);
    bool star = true;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        const double cross = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
        if (cross <= 1e-15 * (b - a).norm() * polygon_diameter(poly)) {
            star = false;
            break;
        }
    }
    if (star) {
        for (std::size_t i = 0; i < n; ++i)
            quadrature::map_triangle(c, poly[i], poly[(i + 1) % n], std::max(order, 1),
                                     rule.points);
    } else {
        for (const auto& t : quadrature::ear_clip(poly))
            quadrature::map_triangle(t[0], t[1], t[2], std::max(order, 1), rule.points);
    }
    return rule;
}

// Gauss-Legendre rule on the segment a->b, exact for P_order(e).
inline EdgeQuadrature edge_rule(const Vec2& a, const Vec2& b, int order)
{
    EdgeQuadrature rule;
    rule.order = order;
    const int npts = std::max(1, (order + 2) / 2); // ceil((order+1)/2)
    std::vector<double> gn, gw;
    quadrature::gauss_legendre(npts, gn, gw);
    const double len = (b - a).norm();
    const Vec2 mid = 0.5 * (a + b);
    const Vec2 half = 0.5 * (b - a);
    rule.points.resize(npts);
    rule.weights.resize(npts);
    rule.params = gn;
    for (int i = 0; i < npts; ++i) {
        rule.points[i] = mid + gn[i] * half;
        rule.weights[i] = 0.5 * len * gw[i];
    }
    return rule;
}

} // namespace polywave
