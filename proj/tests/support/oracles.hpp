#pragma once

// Test-side oracles, independent of the library's quadrature/projector paths:
// closed-form monomial integrals on polygons via Green's theorem, an exact
// dense polynomial algebra for manufactured divergences, and a least-squares
// projection reference.

#include "polywave/geometry.hpp"
#include "polywave/quadrature.hpp"

#include <Eigen/Dense>

#include <map>
#include <random>
#include <vector>

namespace oracle {

using polywave::Polygon;
using polywave::Vec2;

// ---- exact monomial integrals on polygons --------------------------------

// int_0^1 (ax + t dx)^p (ay + t dy)^q dt by binomial expansion; exact up to
// round-off, no quadrature involved.
inline double edge_param_integral(double ax, double dx, double ay, double dy, int p, int q)
{
    std::vector<double> cx(p + 1, 0.0), cy(q + 1, 0.0);
    auto binom = [](int n, int k) {
        double r = 1.0;
        for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
        return r;
    };
    for (int i = 0; i <= p; ++i) cx[i] = binom(p, i) * std::pow(ax, p - i) * std::pow(dx, i);
    for (int j = 0; j <= q; ++j) cy[j] = binom(q, j) * std::pow(ay, q - j) * std::pow(dy, j);
    double result = 0.0;
    for (int i = 0; i <= p; ++i)
        for (int j = 0; j <= q; ++j) result += cx[i] * cy[j] / (i + j + 1.0);
    return result;
}

// int_E x^p y^q dE = (1/(p+1)) oint x^{p+1} y^q n_x ds (Green's theorem).
inline double monomial_integral(const Polygon& poly, int p, int q)
{
    double total = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        const Vec2 d = b - a;
        // n_x ds = dy along the ccw boundary
        total += d.y() * edge_param_integral(a.x(), d.x(), a.y(), d.y(), p + 1, q);
    }
    return total / (p + 1.0);
}

// ---- dense 2D polynomial algebra ------------------------------------------

struct Poly2 {
    std::map<std::pair<int, int>, double> c;

    static Poly2 monomial(int p, int q, double coef = 1.0)
    {
        Poly2 r;
        r.c[{p, q}] = coef;
        return r;
    }

    double eval(const Vec2& x) const
    {
        double v = 0.0;
        for (const auto& [pq, coef] : c)
            v += coef * std::pow(x.x(), pq.first) * std::pow(x.y(), pq.second);
        return v;
    }

    Poly2 dx() const
    {
        Poly2 r;
        for (const auto& [pq, coef] : c)
            if (pq.first > 0) r.c[{pq.first - 1, pq.second}] += coef * pq.first;
        return r;
    }

    Poly2 dy() const
    {
        Poly2 r;
        for (const auto& [pq, coef] : c)
            if (pq.second > 0) r.c[{pq.first, pq.second - 1}] += coef * pq.second;
        return r;
    }

    Poly2 operator+(const Poly2& o) const
    {
        Poly2 r = *this;
        for (const auto& [pq, coef] : o.c) r.c[pq] += coef;
        return r;
    }

    Poly2 operator*(const Poly2& o) const
    {
        Poly2 r;
        for (const auto& [a, ca] : c)
            for (const auto& [b, cb] : o.c)
                r.c[{a.first + b.first, a.second + b.second}] += ca * cb;
        return r;
    }

    double integral(const Polygon& poly) const
    {
        double v = 0.0;
        for (const auto& [pq, coef] : c) v += coef * monomial_integral(poly, pq.first, pq.second);
        return v;
    }
};

struct VecPoly2 {
    Poly2 x, y;
    Poly2 divergence() const { return x.dx() + y.dy(); }
    Vec2 eval(const Vec2& p) const { return Vec2(x.eval(p), y.eval(p)); }
};

inline VecPoly2 random_vector_poly(int degree, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    VecPoly2 v;
    for (int d = 0; d <= degree; ++d)
        for (int j = 0; j <= d; ++j) {
            v.x.c[{d - j, j}] = uni(rng);
            v.y.c[{d - j, j}] = uni(rng);
        }
    return v;
}

inline Poly2 random_scalar_poly(int degree, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Poly2 p;
    for (int d = 0; d <= degree; ++d)
        for (int j = 0; j <= d; ++j) p.c[{d - j, j}] = uni(rng);
    return p;
}

// ---- random polygons -------------------------------------------------------

// Star-shaped polygon around a random centre: sorted random angles, random
// radii. Convex when `regular` is set.
inline Polygon random_polygon(std::mt19937_64& rng, bool regular = false)
{
    std::uniform_int_distribution<int> nd(3, 10);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const int n = nd(rng);
    // strictly increasing angles built from positive gaps: one full turn,
    // every gap at least ~0.1 rad
    std::vector<double> gaps(n);
    double total = 0.0;
    for (auto& g : gaps) {
        g = 0.1 + uni(rng);
        total += g;
    }
    std::vector<double> angles(n);
    double acc = 2.0 * M_PI * uni(rng);
    for (int i = 0; i < n; ++i) {
        acc += gaps[i] / total * 2.0 * M_PI;
        angles[i] = acc;
    }

    const Vec2 centre(uni(rng), uni(rng));
    const double scale = 0.2 + 0.8 * uni(rng);
    Polygon poly;
    for (double a : angles) {
        const double r = regular ? 1.0 : 0.4 + 0.6 * uni(rng);
        poly.push_back(centre + scale * r * Vec2(std::cos(a), std::sin(a)));
    }
    return poly;
}

// ---- dense least-squares projection oracle ---------------------------------

// L^2 projection of samples onto a span of basis functions by normal
// equations on a fine quadrature: reference for the projector pipeline.
template <class BasisEval, class Target>
Eigen::VectorXd l2_fit(const polywave::PolygonQuadrature& rule, int n_basis, BasisEval&& basis,
                       Target&& target)
{
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n_basis, n_basis);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_basis);
    for (const auto& qp : rule.points) {
        Eigen::VectorXd row(n_basis);
        for (int i = 0; i < n_basis; ++i) row[i] = basis(i, qp.x);
        G += qp.w * row * row.transpose();
        rhs += qp.w * target(qp.x) * row;
    }
    return G.ldlt().solve(rhs);
}

} // namespace oracle
