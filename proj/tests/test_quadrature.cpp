#include "polywave/quadrature.hpp"

#include "support/oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace polywave;

namespace {
const Polygon unit_square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};

Polygon regular_polygon(int n, double radius = 1.0)
{
    Polygon poly;
    for (int i = 0; i < n; ++i) {
        const double a = 2.0 * M_PI * i / n;
        poly.push_back(radius * Vec2(std::cos(a), std::sin(a)));
    }
    return poly;
}
} // namespace

TEST_CASE("unit square monomials at low order")
{
    const auto r2 = polygon_rule(unit_square, 2);
    CHECK(r2.integrate([](const Vec2&) { return 1.0; }) == Catch::Approx(1.0));
    CHECK(r2.integrate([](const Vec2& x) { return x.x(); }) == Catch::Approx(0.5));
    CHECK(r2.integrate([](const Vec2& x) { return x.x() * x.x(); }) == Catch::Approx(1.0 / 3.0));

    const auto r3 = polygon_rule(unit_square, 3);
    CHECK(r3.integrate([](const Vec2& x) { return x.x() * x.x() * x.y(); }) ==
          Catch::Approx(1.0 / 6.0));
}

TEST_CASE("regular pentagon area")
{
    const Polygon pent = regular_polygon(5);
    const auto rule = polygon_rule(pent, 2);
    CHECK(rule.sum_weights() == Catch::Approx(2.377641290737884).epsilon(1e-13));
    CHECK(rule.sum_weights() == Catch::Approx(2.5 * std::sin(2.0 * M_PI / 5.0)).epsilon(1e-13));
}

TEST_CASE("weights are positive and sum to the area")
{
    std::mt19937_64 rng(3);
    for (int order = 0; order <= 12; ++order) {
        for (int trial = 0; trial < 5; ++trial) {
            const Polygon poly = oracle::random_polygon(rng, /*regular=*/true);
            const auto rule = polygon_rule(poly, order);
            for (const auto& q : rule.points) CHECK(q.w > 0.0);
            CHECK(rule.sum_weights() ==
                  Catch::Approx(oracle::monomial_integral(poly, 0, 0)).epsilon(1e-12));
        }
    }
}

TEST_CASE("polygon rule is exact against the Green-theorem oracle")
{
    std::mt19937_64 rng(11);
    std::vector<Polygon> polys = {unit_square, regular_polygon(5), regular_polygon(7, 0.6)};
    for (int t = 0; t < 3; ++t) polys.push_back(oracle::random_polygon(rng, /*regular=*/true));
    for (const Polygon& poly : polys) {
        for (int order : {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}) {
            const auto rule = polygon_rule(poly, order);
            for (int p = 0; p + 0 <= order; ++p)
                for (int q = 0; p + q <= order; ++q) {
                    const double exact = oracle::monomial_integral(poly, p, q);
                    const double approx = rule.integrate([p, q](const Vec2& x) {
                        return std::pow(x.x(), p) * std::pow(x.y(), q);
                    });
                    // relative to the integrand size, robust to cancellation
                    const double l1 = rule.integrate([p, q](const Vec2& x) {
                        return std::abs(std::pow(x.x(), p) * std::pow(x.y(), q));
                    });
                    CHECK(std::abs(approx - exact) <= 1e-12 * std::max(l1, std::abs(exact)));
                }
        }
    }
}

TEST_CASE("ear-clipping fallback handles nonconvex polygons")
{
    // centroid of this hook shape lies outside its kernel
    const Polygon hook = {{0, 0}, {4, 0}, {4, 1}, {1, 1}, {1, 3}, {2, 3},
                          {2, 4}, {0, 4}};
    const auto rule = polygon_rule(hook, 4);
    CHECK(rule.sum_weights() == Catch::Approx(oracle::monomial_integral(hook, 0, 0)));
    for (int p = 0; p <= 4; ++p)
        for (int q = 0; p + q <= 4; ++q) {
            const double exact = oracle::monomial_integral(hook, p, q);
            const double approx = rule.integrate(
                [p, q](const Vec2& x) { return std::pow(x.x(), p) * std::pow(x.y(), q); });
            CHECK(approx == Catch::Approx(exact).epsilon(1e-12));
        }
}

TEST_CASE("edge rules")
{
    const auto r1 = edge_rule(Vec2(0, 0), Vec2(1, 0), 1);
    CHECK(r1.integrate([](const Vec2& x) { return x.x(); }) == Catch::Approx(0.5));

    const auto r3 = edge_rule(Vec2(0, 0), Vec2(1, 0), 3);
    CHECK(r3.integrate([](const Vec2& x) { return x.x() * x.x() * x.x(); }) ==
          Catch::Approx(0.25));

    const auto r0 = edge_rule(Vec2(0, 0), Vec2(3, 4), 0);
    CHECK(r0.integrate([](const Vec2&) { return 1.0; }) == Catch::Approx(5.0));

    // signed parameter runs from -1 at the first endpoint to +1 at the second
    const auto rp = edge_rule(Vec2(0, 0), Vec2(2, 0), 5);
    for (std::size_t i = 0; i < rp.points.size(); ++i)
        CHECK(rp.points[i].x() == Catch::Approx(1.0 + rp.params[i]).margin(1e-14));
}

TEST_CASE("Gauss-Legendre nodes are exact to the stated degree")
{
    std::vector<double> nodes, weights;
    for (int n = 1; n <= 12; ++n) {
        quadrature::gauss_legendre(n, nodes, weights);
        for (int d = 0; d <= 2 * n - 1; ++d) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += weights[i] * std::pow(nodes[i], d);
            const double exact = (d % 2 == 0) ? 2.0 / (d + 1) : 0.0;
            CHECK(std::abs(s - exact) < 1e-13);
        }
    }
}

TEST_CASE("Legendre recurrence matches closed forms")
{
    for (double s : {-0.9, -0.3, 0.0, 0.4, 1.0}) {
        CHECK(quadrature::legendre(0, s) == Catch::Approx(1.0));
        CHECK(quadrature::legendre(1, s) == Catch::Approx(s));
        CHECK(quadrature::legendre(2, s) == Catch::Approx(0.5 * (3 * s * s - 1)));
        CHECK(quadrature::legendre(3, s) == Catch::Approx(0.5 * (5 * s * s * s - 3 * s)));
    }
}
