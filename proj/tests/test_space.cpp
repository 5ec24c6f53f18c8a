#include "polywave/space.hpp"

#include "support/oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace polywave;

namespace {

const Polygon unit_square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};

Polygon pentagon()
{
    Polygon p;
    for (int i = 0; i < 5; ++i) {
        const double a = 2.0 * M_PI * i / 5 + 0.3;
        p.push_back(Vec2(0.45, 0.55) + 0.4 * Vec2(std::cos(a), std::sin(a)));
    }
    return p;
}

VectorField field_of(const oracle::VecPoly2& v)
{
    return {[v](const Vec2& x, double) { return v.eval(x); },
            [v](const Vec2& x, double) { return v.divergence().eval(x); }};
}

// local DoF vector of an analytic field evaluated on one free-standing element
Eigen::VectorXd dofs_of(const ElementOps& op, const VectorField& w) { return op.interpolate(w, 0.0); }

} // namespace

TEST_CASE("local and global dimension formulas")
{
    // single square cell, k=1: 4*2 + 1 + 2 = 11
    ElementOps op(ElementGeometry::from_polygon(unit_square), 1);
    CHECK(op.n_dofs() == 11);
    CHECK(op.dofs.n_div() == 2);
    CHECK(op.dofs.n_rot() == 1);

    // triangle, k=2: 3*3 + 8 = 17
    const Polygon tri = {{0, 0}, {1, 0}, {0, 1}};
    ElementOps op2(ElementGeometry::from_polygon(tri), 2);
    CHECK(op2.n_dofs() == 17);

    // 2x2 quad mesh, k=0: n_u = 12, n_p = 4
    const PolygonalMesh mesh = generate(MeshFamily::quad, 2);
    const DofMap dm(mesh, 0);
    CHECK(dm.n_velocity() == 12);
    CHECK(dm.n_pressure() == 4);

    // global dimension formula (k+1) L_e + (k^2+2k) L_P on every family
    for (auto family : {MeshFamily::tria, MeshFamily::quad, MeshFamily::voro}) {
        const PolygonalMesh m = generate(family, 4, 7);
        for (int k : {0, 1, 2, 3}) {
            const DofMap d(m, k);
            CHECK(d.n_velocity() ==
                  static_cast<int>((k + 1) * m.n_edges() + (k * k + 2 * k) * m.n_cells()));
            CHECK(d.n_pressure() == static_cast<int>(m.n_cells() * (k + 1) * (k + 2) / 2));
        }
    }
}

TEST_CASE("divergence reconstruction")
{
    SECTION("constant field has zero divergence")
    {
        ElementOps op(ElementGeometry::from_polygon(pentagon()), 1);
        VectorField w{[](const Vec2&, double) { return Vec2(0.7, -0.3); },
                      [](const Vec2&, double) { return 0.0; }};
        const Eigen::VectorXd d = op.D * dofs_of(op, w);
        CHECK(d.cwiseAbs().maxCoeff() < 1e-13);
    }
    SECTION("v = (x, y) has divergence 2 on the unit square")
    {
        ElementOps op(ElementGeometry::from_polygon(unit_square), 1);
        VectorField w{[](const Vec2& x, double) { return x; },
                      [](const Vec2&, double) { return 2.0; }};
        const Eigen::VectorXd d = op.D * dofs_of(op, w);
        CHECK(op.eval_pressure(d, Vec2(0.3, 0.9)) == Catch::Approx(2.0).epsilon(1e-12));
        CHECK(op.eval_pressure(d, Vec2(0.51, 0.01)) == Catch::Approx(2.0).epsilon(1e-12));
    }
    SECTION("random k=2 polynomial on a pentagon matches the symbolic divergence")
    {
        std::mt19937_64 rng(31);
        ElementOps op(ElementGeometry::from_polygon(pentagon()), 2);
        for (int trial = 0; trial < 10; ++trial) {
            const oracle::VecPoly2 v = oracle::random_vector_poly(2, rng);
            const Eigen::VectorXd d = op.D * dofs_of(op, field_of(v));
            const oracle::Poly2 dv = v.divergence();
            for (const auto& q : op.cell_rule.points)
                CHECK(op.eval_pressure(d, q.x) == Catch::Approx(dv.eval(q.x)).margin(1e-10));
        }
    }
}

TEST_CASE("projection reproduces vector polynomials (P1 consistency)")
{
    std::mt19937_64 rng(37);
    for (int k : {0, 1, 2, 3}) {
        for (int trial = 0; trial < 8; ++trial) {
            const Polygon poly = oracle::random_polygon(rng);
            ElementOps op(ElementGeometry::from_polygon(poly), k);
            const oracle::VecPoly2 v = oracle::random_vector_poly(k, rng);
            const Eigen::VectorXd coeff = op.Pi * dofs_of(op, field_of(v));
            double scale = 0.0, err = 0.0;
            for (const auto& q : op.cell_rule.points) {
                const Vec2 d = op.eval_vector(coeff, q.x) - v.eval(q.x);
                err = std::max(err, d.norm());
                scale = std::max(scale, v.eval(q.x).norm());
            }
            CHECK(err <= 1e-10 * std::max(1.0, scale));
        }
    }
}

TEST_CASE("k=0 projection of (x,0) on the unit square is the mean")
{
    ElementOps op(ElementGeometry::from_polygon(unit_square), 0);
    VectorField w{[](const Vec2& x, double) { return Vec2(x.x(), 0.0); },
                  [](const Vec2&, double) { return 1.0; }};
    const Eigen::VectorXd coeff = op.Pi * dofs_of(op, w);
    const Vec2 val = op.eval_vector(coeff, Vec2(0.123, 0.777));
    CHECK(val.x() == Catch::Approx(0.5).epsilon(1e-12));
    CHECK(val.y() == Catch::Approx(0.0).margin(1e-13));
}

TEST_CASE("projector matches a dense least-squares oracle on non-polynomial data")
{
    // k=1 pentagon, v = (x^2, xy): project the interpolant and compare with
    // the L2 projection of the interpolant's computable data. Both are
    // degree-1 fields determined by the same moments, evaluated pointwise.
    ElementOps op(ElementGeometry::from_polygon(pentagon()), 1);
    const oracle::VecPoly2 v{{oracle::Poly2::monomial(2, 0)}, {oracle::Poly2::monomial(1, 1)}};
    const Eigen::VectorXd coeff = op.Pi * dofs_of(op, field_of(v));

    // oracle: normal equations at order 2k+4 for the projection of v itself
    // (the interpolant shares the moments of v used by the projector, so the
    // two projections coincide)
    const auto rule = polygon_rule(pentagon(), 8);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(op.n_vector(), op.n_vector());
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(op.n_vector());
    for (const auto& q : rule.points) {
        Eigen::MatrixXd vals(2, op.n_vector());
        for (int j = 0; j < op.n_vector(); ++j) vals.col(j) = op.v_basis.eval_one(j, q.x);
        G += q.w * vals.transpose() * vals;
        rhs += q.w * vals.transpose() * v.eval(q.x);
    }
    const Eigen::VectorXd oracle_raw = G.ldlt().solve(rhs);
    for (const auto& q : op.cell_rule.points) {
        const Vec2 a = op.eval_vector(coeff, q.x);
        Vec2 b = Vec2::Zero();
        for (int j = 0; j < op.n_vector(); ++j) b += oracle_raw[j] * op.v_basis.eval_one(j, q.x);
        CHECK((a - b).norm() < 1e-10);
    }
}

TEST_CASE("scalar projection")
{
    ElementOps op(ElementGeometry::from_polygon(unit_square), 2);
    SECTION("projecting a basis monomial gives a unit coefficient vector")
    {
        for (int a = 0; a < op.n_pressure(); ++a) {
            ScalarField f{[&op, a](const Vec2& x, double) { return op.p_basis.eval_one(a, x); }};
            const Eigen::VectorXd c = op.project_scalar(f, 0.0);
            for (int i = 0; i < c.size(); ++i)
                CHECK(c[i] == Catch::Approx(i == a ? 1.0 : 0.0).margin(1e-12));
        }
    }
    SECTION("k=0 projection of x is 1/2")
    {
        ElementOps op0(ElementGeometry::from_polygon(unit_square), 0);
        ScalarField f{[](const Vec2& x, double) { return x.x(); }};
        const Eigen::VectorXd c = op0.project_scalar(f, 0.0);
        CHECK(op0.eval_pressure(c, Vec2(0.9, 0.1)) == Catch::Approx(0.5).epsilon(1e-13));
    }
    SECTION("sin(2 pi x) at k=2 matches a dense least-squares oracle")
    {
        ScalarField f{[](const Vec2& x, double) { return std::sin(2.0 * M_PI * x.x()); }};
        const Eigen::VectorXd c = op.project_scalar(f, 0.0);
        const auto rule = polygon_rule(unit_square, 16);
        const Eigen::VectorXd ref = oracle::l2_fit(
            rule, op.n_pressure(),
            [&op](int i, const Vec2& x) { return op.p_basis.eval_one(i, x); },
            [&f](const Vec2& x) { return f(x, 0.0); });
        for (const auto& q : rule.points)
            CHECK(op.eval_pressure(c, q.x) ==
                  Catch::Approx(op.p_basis.eval_poly(ref, q.x)).margin(1e-10));
    }
}

TEST_CASE("Fortin interpolation on meshes")
{
    const VectorField trig{
        [](const Vec2& x, double) {
            return Vec2(-2.0 * M_PI * std::cos(2.0 * M_PI * x.x()) * std::cos(2.0 * M_PI * x.y()),
                        2.0 * M_PI * std::sin(2.0 * M_PI * x.x()) * std::sin(2.0 * M_PI * x.y()));
        },
        [](const Vec2& x, double) {
            return 8.0 * M_PI * M_PI * std::sin(2.0 * M_PI * x.x()) * std::cos(2.0 * M_PI * x.y());
        }};

    SECTION("commuting property div(Pi_F w) = Pi0_k(div w)")
    {
        for (auto family : {MeshFamily::quad, MeshFamily::voro}) {
            const PolygonalMesh mesh = generate(family, 8, 5);
            for (int k : {0, 1, 2}) {
                const DofMap dm(mesh, k);
                std::vector<ElementOps> ops;
                for (std::size_t c = 0; c < mesh.n_cells(); ++c)
                    ops.push_back(make_element_ops(mesh, static_cast<int>(c), k));
                const Eigen::VectorXd g = fortin_interpolate(mesh, dm, ops, trig, 0.0);
                ScalarField divw{[&trig](const Vec2& x, double t) { return trig.divergence(x, t); }};
                for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
                    const Eigen::VectorXd loc = dm.gather(static_cast<int>(c), g);
                    const Eigen::VectorXd dcoef = ops[c].D * loc;
                    const Eigen::VectorXd pcoef = ops[c].project_scalar(divw, 0.0);
                    // L2(E) norm of the difference via the cell rule
                    double err2 = 0.0, norm2 = 0.0;
                    for (const auto& q : ops[c].cell_rule.points) {
                        const double d =
                            ops[c].eval_pressure(dcoef, q.x) - ops[c].eval_pressure(pcoef, q.x);
                        err2 += q.w * d * d;
                        norm2 += q.w * trig(q.x, 0.0).squaredNorm();
                    }
                    CHECK(std::sqrt(err2) <= 1e-9 * std::max(1.0, std::sqrt(norm2)));
                }
            }
        }
    }

    SECTION("edge traces reproduce the edge moments of w.n")
    {
        const PolygonalMesh mesh = generate(MeshFamily::voro, 6, 9);
        const int k = 2;
        const DofMap dm(mesh, k);
        std::vector<ElementOps> ops;
        for (std::size_t c = 0; c < mesh.n_cells(); ++c)
            ops.push_back(make_element_ops(mesh, static_cast<int>(c), k));
        const Eigen::VectorXd g = fortin_interpolate(mesh, dm, ops, trig, 0.0);
        for (std::size_t e = 0; e < mesh.n_edges(); ++e) {
            const Vec2 a = mesh.vertices[mesh.edges[e].v0];
            const Vec2 b = mesh.vertices[mesh.edges[e].v1];
            const Vec2 n = rot90(b - a) / (b - a).norm();
            const EdgeQuadrature rule = edge_rule(a, b, 24);
            for (int i = 0; i <= k; ++i) {
                double mom = 0.0;
                for (std::size_t q = 0; q < rule.points.size(); ++q)
                    mom += rule.weights[q] * trig(rule.points[q], 0.0).dot(n) *
                           quadrature::legendre(i, rule.params[q]);
                mom /= (b - a).norm();
                CHECK(g[dm.edge_dof(static_cast<int>(e), i)] ==
                      Catch::Approx(mom).margin(1e-12 * (1.0 + std::abs(mom))));
            }
        }
    }
}

TEST_CASE("interpolated polynomial fields reproduce through the projector on meshes")
{
    std::mt19937_64 rng(41);
    const PolygonalMesh mesh = generate(MeshFamily::voro, 5, 3);
    for (int k : {1, 2}) {
        const DofMap dm(mesh, k);
        std::vector<ElementOps> ops;
        for (std::size_t c = 0; c < mesh.n_cells(); ++c)
            ops.push_back(make_element_ops(mesh, static_cast<int>(c), k));
        const oracle::VecPoly2 v = oracle::random_vector_poly(k, rng);
        const Eigen::VectorXd g = fortin_interpolate(mesh, dm, ops, field_of(v), 0.0);
        for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
            const Eigen::VectorXd coeff = ops[c].Pi * dm.gather(static_cast<int>(c), g);
            for (const auto& q : ops[c].cell_rule.points)
                CHECK((ops[c].eval_vector(coeff, q.x) - v.eval(q.x)).norm() < 1e-10);
        }
    }
}

TEST_CASE("DoF/projector duality for rotated moments")
{
    // the rotated moments are degree <= k information, so applying the DoF
    // functionals to Pi0_k v_h reproduces them exactly
    std::mt19937_64 rng(43);
    ElementOps op(ElementGeometry::from_polygon(pentagon()), 2);
    const oracle::VecPoly2 v = oracle::random_vector_poly(2, rng);
    const Eigen::VectorXd dofs = dofs_of(op, field_of(v));
    const Eigen::VectorXd dofs_of_projection = op.Q * dofs;
    for (int b = 0; b < op.dofs.n_rot(); ++b)
        CHECK(dofs_of_projection[op.dofs.rot_dof(b)] ==
              Catch::Approx(dofs[op.dofs.rot_dof(b)]).margin(1e-11));
}

TEST_CASE("essential DoFs follow Neumann tags")
{
    PolygonalMesh mesh = generate(MeshFamily::quad, 2);
    tag_boundary(mesh, [](const Vec2& mid) -> std::optional<BoundaryTag> {
        if (mid.y() < 1e-12 || mid.y() > 1 - 1e-12) return BoundaryTag::dirichlet;
        return BoundaryTag::neumann;
    });
    const DofMap dm(mesh, 1);
    // 4 Neumann edges with 2 moments each
    CHECK(dm.essential_dofs().size() == 8);
}
