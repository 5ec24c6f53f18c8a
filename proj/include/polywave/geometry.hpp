#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace polywave {

using Vec2 = Eigen::Vector2d;
using Polygon = std::vector<Vec2>;

// Rotate by -90 degrees: for a ccw-traversed edge with tangent t this is the
// outward normal direction.
inline Vec2 rot90(const Vec2& t) { return Vec2(t.y(), -t.x()); }

inline double signed_area(const Polygon& poly)
{
    double a = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

inline double polygon_area(const Polygon& poly) { return std::abs(signed_area(poly)); }

inline Vec2 polygon_centroid(const Polygon& poly)
{
    double a = 0.0;
    Vec2 c = Vec2::Zero();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        const double cross = p.x() * q.y() - q.x() * p.y();
        a += cross;
        c += cross * (p + q);
    }
    a *= 0.5;
    if (std::abs(a) < 1e-300)
        throw std::runtime_error("polygon_centroid: degenerate polygon");
    return c / (6.0 * a);
}

inline double polygon_diameter(const Polygon& poly)
{
    double d2 = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i)
        for (std::size_t j = i + 1; j < poly.size(); ++j)
            d2 = std::max(d2, (poly[i] - poly[j]).squaredNorm());
    return std::sqrt(d2);
}

inline double min_edge_length(const Polygon& poly)
{
    double m = std::numeric_limits<double>::max();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i)
        m = std::min(m, (poly[(i + 1) % n] - poly[i]).norm());
    return m;
}

namespace detail {

inline bool segments_properly_intersect(const Vec2& a, const Vec2& b, const Vec2& c,
                                        const Vec2& d)
{
    auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        const double v = (q.x() - p.x()) * (r.y() - p.y()) - (q.y() - p.y()) * (r.x() - p.x());
        const double scale = std::max({1e-30, p.norm(), q.norm(), r.norm()});
        if (std::abs(v) < 1e-14 * scale * scale) return 0;
        return v > 0 ? 1 : -1;
    };
    const int o1 = orient(a, b, c), o2 = orient(a, b, d);
    const int o3 = orient(c, d, a), o4 = orient(c, d, b);
    return o1 * o2 < 0 && o3 * o4 < 0;
}

} // namespace detail

// A polygon is simple when no two non-adjacent edges cross.
inline bool is_simple_polygon(const Polygon& poly)
{
    const std::size_t n = poly.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (detail::segments_properly_intersect(poly[i], poly[(i + 1) % n], poly[j],
                                                    poly[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

// Keep the part of `poly` with dot(x - p0, normal) <= 0 (one Sutherland-Hodgman pass).
inline Polygon clip_half_plane(const Polygon& poly, const Vec2& p0, const Vec2& normal)
{
    Polygon out;
    const std::size_t n = poly.size();
    if (n == 0) return out;
    out.reserve(n + 2);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        const double da = (a - p0).dot(normal);
        const double db = (b - p0).dot(normal);
        if (da <= 0.0) {
            out.push_back(a);
            if (db > 0.0) out.push_back(a + (da / (da - db)) * (b - a));
        } else if (db <= 0.0) {
            out.push_back(a + (da / (da - db)) * (b - a));
        }
    }
    // drop consecutive duplicates produced by vertices lying on the cut line
    Polygon dedup;
    dedup.reserve(out.size());
    for (const Vec2& v : out) {
        if (dedup.empty() || (v - dedup.back()).norm() > 1e-14) dedup.push_back(v);
    }
    while (dedup.size() > 1 && (dedup.front() - dedup.back()).norm() <= 1e-14)
        dedup.pop_back();
    if (dedup.size() < 3) dedup.clear();
    return dedup;
}

// Intersection of a polygon with a convex clipper.
inline Polygon clip_convex(const Polygon& poly, const Polygon& convex_clipper)
{
    Polygon out = poly;
    const std::size_t n = convex_clipper.size();
    for (std::size_t i = 0; i < n && !out.empty(); ++i) {
        const Vec2 a = convex_clipper[i];
        const Vec2 b = convex_clipper[(i + 1) % n];
        out = clip_half_plane(out, a, rot90(b - a)); // keep the ccw-interior side
    }
    return out;
}

// Kernel of a simple polygon: intersection of the interior half-planes of all
// edge supporting lines, seeded with the bounding box.
inline Polygon polygon_kernel(const Polygon& poly)
{
    Vec2 lo(std::numeric_limits<double>::max(), std::numeric_limits<double>::max());
    Vec2 hi = -lo;
    for (const Vec2& v : poly) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    Polygon ker = {lo, Vec2(hi.x(), lo.y()), hi, Vec2(lo.x(), hi.y())};
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n && !ker.empty(); ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        ker = clip_half_plane(ker, a, rot90(b - a));
    }
    return ker;
}

// Chebyshev radius of a convex polygon: radius of the largest inscribed circle.
// Solved as the tiny LP max t s.t. n_i . x + t <= b_i by enumerating constraint
// triples (sufficient in 2D, degenerate faces included via near-parallel pairs).
inline double convex_inradius(const Polygon& convex)
{
    const std::size_t n = convex.size();
    if (n < 3) return 0.0;
    std::vector<Vec2> nor(n);
    std::vector<double> off(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = convex[i];
        const Vec2 b = convex[(i + 1) % n];
        Vec2 m = rot90(b - a);
        const double len = m.norm();
        if (len < 1e-300) return 0.0;
        m /= len;
        nor[i] = m;
        off[i] = m.dot(a);
    }
    auto feasible = [&](const Vec2& x, double t) {
        for (std::size_t i = 0; i < n; ++i)
            if (nor[i].dot(x) + t > off[i] + 1e-12) return false;
        return true;
    };
    double best = 0.0;
    Eigen::Matrix3d A;
    Eigen::Vector3d rhs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t l = j + 1; l < n; ++l) {
                A << nor[i].x(), nor[i].y(), 1.0,
                     nor[j].x(), nor[j].y(), 1.0,
                     nor[l].x(), nor[l].y(), 1.0;
                rhs << off[i], off[j], off[l];
                Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
                if (!lu.isInvertible()) continue;
                const Eigen::Vector3d sol = lu.solve(rhs);
                if (sol[2] > best && feasible(Vec2(sol[0], sol[1]), sol[2])) best = sol[2];
            }
    return best;
}

// int_P |x - s|^2 dA from the closed-form shoelace moments.
inline double polygon_quantization_energy(const Polygon& poly, const Vec2& s)
{
    double ix = 0.0, iy = 0.0, ixx = 0.0, iyy = 0.0, area = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        const double cross = p.x() * q.y() - q.x() * p.y();
        area += cross / 2.0;
        ix += (p.x() + q.x()) * cross / 6.0;
        iy += (p.y() + q.y()) * cross / 6.0;
        ixx += (p.x() * p.x() + p.x() * q.x() + q.x() * q.x()) * cross / 12.0;
        iyy += (p.y() * p.y() + p.y() * q.y() + q.y() * q.y()) * cross / 12.0;
    }
    return ixx + iyy - 2.0 * (s.x() * ix + s.y() * iy) + s.squaredNorm() * area;
}

inline bool point_in_convex(const Polygon& convex, const Vec2& x, double tol = 0.0)
{
    const std::size_t n = convex.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = convex[i];
        const Vec2& b = convex[(i + 1) % n];
        if (rot90(b - a).dot(x - a) > tol) return false;
    }
    return true;
}

} // namespace polywave
