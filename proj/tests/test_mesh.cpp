#include "polywave/mesh.hpp"

#include "polywave/io_mesh.hpp"
#include "support/oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

using namespace polywave;

TEST_CASE("2x2 Cartesian mesh combinatorics")
{
    const PolygonalMesh mesh = generate(MeshFamily::quad, 2);
    CHECK(mesh.n_cells() == 4);
    CHECK(mesh.n_edges() == 12);
    CHECK(mesh.n_vertices() == 9);
    CHECK(mesh.euler_characteristic() == 1);
    CHECK(mesh.total_area() == Catch::Approx(1.0).epsilon(1e-14));

    const MeshQualityReport rep = validate(mesh);
    CHECK(rep.h == Catch::Approx(std::sqrt(2.0) / 2.0).margin(1e-15));
}

TEST_CASE("quad family mesh size is the cell diagonal")
{
    for (int n : {2, 4, 8, 16}) {
        const PolygonalMesh mesh = generate(MeshFamily::quad, n);
        const MeshQualityReport rep = validate(mesh);
        CHECK(std::abs(rep.h - std::sqrt(2.0) / n) <= 1e-15);
    }
}

TEST_CASE("generator rejects n < 2")
{
    CHECK_THROWS_AS(generate(MeshFamily::quad, 0), ConfigError);
    CHECK_THROWS_AS(generate(MeshFamily::tria, 1), ConfigError);
}

TEST_CASE("criss-cross triangle mesh")
{
    const int n = 3;
    const PolygonalMesh mesh = generate(MeshFamily::tria, n);
    CHECK(mesh.n_cells() == 4u * n * n);
    CHECK(mesh.n_vertices() == static_cast<std::size_t>((n + 1) * (n + 1) + n * n));
    CHECK(mesh.euler_characteristic() == 1);
    CHECK(mesh.total_area() == Catch::Approx(1.0).epsilon(1e-14));
    validate(mesh);
}

TEST_CASE("interior edge normals point from the lower to the higher cell")
{
    const PolygonalMesh mesh = generate(MeshFamily::quad, 3);
    for (const MeshEdge& e : mesh.edges) {
        if (e.on_boundary()) {
            CHECK(e.cell0 >= 0);
            // boundary normal points out of the domain
            const Vec2 mid = 0.5 * (mesh.vertices[e.v0] + mesh.vertices[e.v1]);
            const Vec2 n = rot90(mesh.vertices[e.v1] - mesh.vertices[e.v0]);
            CHECK((mid + 0.1 * n / n.norm() - Vec2(0.5, 0.5)).norm() >
                  (mid - Vec2(0.5, 0.5)).norm());
        } else {
            CHECK(e.cell0 < e.cell1);
            // the normal leaves cell0: moving along it from the midpoint gets
            // closer to cell1's centroid
            const Vec2 mid = 0.5 * (mesh.vertices[e.v0] + mesh.vertices[e.v1]);
            const Vec2 n = mesh.edge_normal(static_cast<int>(&e - mesh.edges.data()));
            const Vec2 c1 = polygon_centroid(mesh.cell_polygon(e.cell1));
            const Vec2 c0 = polygon_centroid(mesh.cell_polygon(e.cell0));
            CHECK((mid + 0.01 * n - c1).norm() < (mid - c1).norm());
            CHECK((mid + 0.01 * n - c0).norm() > (mid - c0).norm());
        }
    }
}

TEST_CASE("mesh generation is reproducible")
{
    const PolygonalMesh a = generate(MeshFamily::voro, 5, 42);
    const PolygonalMesh b = generate(MeshFamily::voro, 5, 42);
    REQUIRE(a.n_edges() == b.n_edges());
    REQUIRE(a.n_vertices() == b.n_vertices());
    for (std::size_t e = 0; e < a.n_edges(); ++e) {
        CHECK(a.edges[e].v0 == b.edges[e].v0);
        CHECK(a.edges[e].v1 == b.edges[e].v1);
    }
    for (std::size_t v = 0; v < a.n_vertices(); ++v)
        CHECK((a.vertices[v] - b.vertices[v]).norm() == 0.0);
}

TEST_CASE("Voronoi mesh with Lloyd relaxation")
{
    const PolygonalMesh mesh = generate(MeshFamily::voro, 8, 42);
    CHECK(mesh.n_cells() == 64);
    CHECK(mesh.euler_characteristic() == 1);
    CHECK(std::abs(mesh.total_area() - 1.0) <= 1e-12);

    // Voronoi cells are intersections of half-planes, hence convex
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
        const Polygon poly = mesh.cell_polygon(static_cast<int>(c));
        const std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 a = poly[(i + 1) % n] - poly[i];
            const Vec2 b = poly[(i + 2) % n] - poly[(i + 1) % n];
            CHECK(a.x() * b.y() - a.y() * b.x() > -1e-12);
        }
    }

    const MeshQualityReport rep = validate(mesh);
    CHECK(rep.rho_edge > 0.0);
    CHECK(rep.rho_star > 0.0);
    CHECK(rep.rho_star <= 1.0);
}

TEST_CASE("Lloyd iteration strictly decreases the quantization energy")
{
    // The seed-to-centroid distance itself is not monotone under Lloyd (both
    // seeds below give counterexamples); the quantization energy
    // sum_i int_{V_i} |x - s_i|^2 is, and is asserted here.
    for (unsigned seed : {1u, 42u}) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        std::vector<Vec2> seeds(36);
        for (auto& p : seeds) p = Vec2(uni(rng), uni(rng));
        const auto res = meshdetail::lloyd_relax(seeds, 60, 1e-10 / 6.0);
        REQUIRE(res.cvt_energy.size() >= 2);
        for (std::size_t i = 1; i < res.cvt_energy.size(); ++i)
            CHECK(res.cvt_energy[i] < res.cvt_energy[i - 1]);
    }
}

TEST_CASE("hexagonal mesh is valid and tiles the square")
{
    const PolygonalMesh mesh = generate(MeshFamily::hexa, 8, 3);
    CHECK(mesh.euler_characteristic() == 1);
    CHECK(std::abs(mesh.total_area() - 1.0) <= 1e-12);
    const MeshQualityReport rep = validate(mesh);
    CHECK(rep.rho_edge > 0.0);
    // interior cells are hexagons
    std::size_t hexes = 0;
    for (const MeshCell& c : mesh.cells) hexes += c.vertices.size() == 6 ? 1 : 0;
    CHECK(hexes > mesh.n_cells() / 2);
}

TEST_CASE("validate flags broken cells")
{
    // bowtie: non-simple
    std::vector<Vec2> verts = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};
    CHECK_THROWS_AS(build_from_cells(verts, {{0, 1, 2, 3}}), StructuralError);
}

TEST_CASE("boundary tagging")
{
    PolygonalMesh mesh = generate(MeshFamily::quad, 4);
    SECTION("all Dirichlet")
    {
        tag_boundary_all(mesh, BoundaryTag::dirichlet);
        for (const MeshEdge& e : mesh.edges)
            CHECK(e.tag == (e.on_boundary() ? BoundaryTag::dirichlet : BoundaryTag::interior));
    }
    SECTION("top/bottom Dirichlet, left/right Neumann")
    {
        tag_boundary(mesh, [](const Vec2& mid) -> std::optional<BoundaryTag> {
            if (mid.y() < 1e-12 || mid.y() > 1 - 1e-12) return BoundaryTag::dirichlet;
            if (mid.x() < 1e-12 || mid.x() > 1 - 1e-12) return BoundaryTag::neumann;
            return std::nullopt;
        });
        int n_d = 0, n_n = 0;
        for (const MeshEdge& e : mesh.edges) {
            n_d += e.tag == BoundaryTag::dirichlet;
            n_n += e.tag == BoundaryTag::neumann;
        }
        CHECK(n_d == 8);
        CHECK(n_n == 8);
    }
    SECTION("rule that misses an edge is a configuration error")
    {
        CHECK_THROWS_AS(
            tag_boundary(mesh,
                         [](const Vec2& mid) -> std::optional<BoundaryTag> {
                             if (mid.y() < 1e-12) return BoundaryTag::dirichlet;
                             return std::nullopt;
                         }),
            ConfigError);
    }
}

TEST_CASE("holes meshes")
{
    SECTION("fiveHoles at the default resolution")
    {
        const PolygonalMesh mesh = build_holes_mesh(HolesConfig::fiveHoles, 38, 0);
        CHECK(mesh.euler_characteristic() == 1 - 5);
        validate(mesh);

        // removed area equals five inscribed 16-gons, i.e. pi r^2 up to the
        // polygonal approximation defect
        const double r = kHoleRadius;
        const double gon16 = 8.0 * r * r * std::sin(M_PI / 8.0);
        const double deficit = 1.0 - mesh.total_area();
        CHECK(deficit == Catch::Approx(5.0 * gon16).epsilon(1e-10));
        CHECK(std::abs(deficit - 5.0 * M_PI * r * r) < 0.03 * 5.0 * M_PI * r * r);

        // hole edges Neumann, outer boundary Robin
        int robin = 0, neumann = 0;
        for (const MeshEdge& e : mesh.edges) {
            if (!e.on_boundary()) continue;
            const Vec2 mid = 0.5 * (mesh.vertices[e.v0] + mesh.vertices[e.v1]);
            const bool outer = mid.x() < 1e-9 || mid.x() > 1 - 1e-9 || mid.y() < 1e-9 ||
                               mid.y() > 1 - 1e-9;
            CHECK(e.tag == (outer ? BoundaryTag::robin : BoundaryTag::neumann));
            robin += e.tag == BoundaryTag::robin;
            neumann += e.tag == BoundaryTag::neumann;
        }
        CHECK(robin == 4 * 38);
        CHECK(neumann == 5 * 16); // each hole contributes a 16-segment loop
    }
    SECTION("eightHoles adds three holes")
    {
        const PolygonalMesh mesh = build_holes_mesh(HolesConfig::eightHoles, 38, 0);
        CHECK(mesh.euler_characteristic() == 1 - 8);
        const double gon16 = 8.0 * kHoleRadius * kHoleRadius * std::sin(M_PI / 8.0);
        CHECK(1.0 - mesh.total_area() == Catch::Approx(8.0 * gon16).epsilon(1e-10));
    }
    SECTION("refinement keeps the mesh conforming")
    {
        const PolygonalMesh mesh = build_holes_mesh(HolesConfig::fiveHoles, 38, 1);
        CHECK(mesh.euler_characteristic() == 1 - 5);
        validate(mesh);
        const double gon16 = 8.0 * kHoleRadius * kHoleRadius * std::sin(M_PI / 8.0);
        CHECK(1.0 - mesh.total_area() == Catch::Approx(5.0 * gon16).epsilon(1e-10));
    }
    SECTION("misaligned centres are rejected")
    {
        CHECK_THROWS_AS(build_holes_mesh(HolesConfig::fiveHoles, 40, 0), ConfigError);
    }
}

TEST_CASE("polymesh round trip")
{
    PolygonalMesh mesh = build_holes_mesh(HolesConfig::fiveHoles, 38, 0);
    std::stringstream ss;
    write_polymesh(mesh, ss);
    const PolygonalMesh back = read_polymesh(ss);
    REQUIRE(back.n_vertices() == mesh.n_vertices());
    REQUIRE(back.n_edges() == mesh.n_edges());
    REQUIRE(back.n_cells() == mesh.n_cells());
    for (std::size_t e = 0; e < mesh.n_edges(); ++e) {
        CHECK(back.edges[e].v0 == mesh.edges[e].v0);
        CHECK(back.edges[e].v1 == mesh.edges[e].v1);
        CHECK(back.edges[e].tag == mesh.edges[e].tag);
    }
    CHECK(back.total_area() == Catch::Approx(mesh.total_area()).epsilon(1e-14));
}

TEST_CASE("polymesh parse errors")
{
    std::stringstream bad1("polymess 1\n");
    CHECK_THROWS_AS(read_polymesh(bad1), ConfigError);
    std::stringstream bad2("polymesh 1\nvertices 2\n0 0\n1 0\ncells 1\n0 1\nboundary 0\n");
    CHECK_THROWS_AS(read_polymesh(bad2), ConfigError);
}
