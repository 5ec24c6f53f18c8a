#pragma once

#include "polywave/errors.hpp"
#include "polywave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

namespace polywave {

enum class BoundaryTag : std::uint8_t { interior, dirichlet, neumann, robin, untagged };

inline std::string to_string(BoundaryTag t)
{
    switch (t) {
        case BoundaryTag::interior: return "interior";
        case BoundaryTag::dirichlet: return "dirichlet";
        case BoundaryTag::neumann: return "neumann";
        case BoundaryTag::robin: return "robin";
        default: return "untagged";
    }
}

// Oriented mesh edge. The stored direction v0->v1 fixes the global normal
// rot90(v1-v0)/h_e: it points from the lower-indexed adjacent cell into the
// higher-indexed one, and outward on the boundary.
struct MeshEdge {
    int v0 = -1, v1 = -1;
    int cell0 = -1, cell1 = -1; // cell0 < cell1 when both exist
    BoundaryTag tag = BoundaryTag::interior;

    bool on_boundary() const { return cell1 < 0; }
};

struct MeshCell {
    std::vector<int> vertices;   // ccw loop
    std::vector<int> edges;      // edge i joins vertices[i] -> vertices[i+1]
    std::vector<int> edge_signs; // +1 when the loop traverses the stored direction
    int region = 0;
};

struct MeshQualityReport {
    double rho_star = 0.0; // min over cells of kernel-inradius / h_E
    double rho_edge = 0.0; // min over cells of (min_e h_e) / h_E
    double h = 0.0;        // (1/L_P) sum over cells of h_E
    int worst_cell = -1;   // argmin of the kernel ratio
};

class PolygonalMesh {
public:
    std::vector<Vec2> vertices;
    std::vector<MeshEdge> edges;
    std::vector<MeshCell> cells;

    std::size_t n_vertices() const { return vertices.size(); }
    std::size_t n_edges() const { return edges.size(); }
    std::size_t n_cells() const { return cells.size(); }

    Polygon cell_polygon(int c) const
    {
        Polygon poly;
        poly.reserve(cells[c].vertices.size());
        for (int v : cells[c].vertices) poly.push_back(vertices[v]);
        return poly;
    }

    double edge_length(int e) const { return (vertices[edges[e].v1] - vertices[edges[e].v0]).norm(); }

    Vec2 edge_midpoint(int e) const
    {
        return 0.5 * (vertices[edges[e].v0] + vertices[edges[e].v1]);
    }

    // unit normal in the stored global orientation
    Vec2 edge_normal(int e) const
    {
        const Vec2 t = vertices[edges[e].v1] - vertices[edges[e].v0];
        return rot90(t) / t.norm();
    }

    double total_area() const
    {
        double a = 0.0;
        for (std::size_t c = 0; c < cells.size(); ++c) a += polygon_area(cell_polygon(static_cast<int>(c)));
        return a;
    }

    int euler_characteristic() const
    {
        return static_cast<int>(n_vertices()) - static_cast<int>(n_edges()) +
               static_cast<int>(n_cells());
    }
};

namespace meshdetail {

struct PairHash {
    std::size_t operator()(const std::pair<int, int>& p) const
    {
        return std::hash<std::int64_t>()((static_cast<std::int64_t>(p.first) << 32) ^
                                         static_cast<std::uint32_t>(p.second));
    }
};

} // namespace meshdetail

// Assemble the edge structure from vertex loops. Cells are re-oriented ccw, and
// the edge direction convention described on MeshEdge is established here.
inline PolygonalMesh build_from_cells(std::vector<Vec2> vertices,
                                      std::vector<std::vector<int>> loops,
                                      std::vector<int> regions = {})
{
    PolygonalMesh mesh;
    mesh.vertices = std::move(vertices);
    mesh.cells.resize(loops.size());

    std::unordered_map<std::pair<int, int>, int, meshdetail::PairHash> edge_of;
    for (std::size_t c = 0; c < loops.size(); ++c) {
        auto& loop = loops[c];
        if (loop.size() < 3) throw StructuralError("cell " + std::to_string(c) + " has fewer than 3 vertices");
        Polygon poly;
        for (int v : loop) {
            if (v < 0 || v >= static_cast<int>(mesh.vertices.size()))
                throw StructuralError("cell " + std::to_string(c) + " references missing vertex");
            poly.push_back(mesh.vertices[v]);
        }
        if (signed_area(poly) < 0.0) std::reverse(loop.begin(), loop.end());
        if (std::abs(signed_area(poly)) < 1e-300)
            throw StructuralError("cell " + std::to_string(c) + " has zero area");

        MeshCell& cell = mesh.cells[c];
        cell.vertices = loop;
        cell.region = regions.empty() ? 0 : regions[c];
        const std::size_t n = loop.size();
        cell.edges.resize(n);
        cell.edge_signs.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const int a = loop[i];
            const int b = loop[(i + 1) % n];
            const auto key = std::minmax(a, b);
            auto it = edge_of.find(key);
            if (it == edge_of.end()) {
                // first traversal comes from the lower-indexed cell: store its direction
                MeshEdge e;
                e.v0 = a;
                e.v1 = b;
                e.cell0 = static_cast<int>(c);
                e.tag = BoundaryTag::untagged;
                const int id = static_cast<int>(mesh.edges.size());
                mesh.edges.push_back(e);
                edge_of.emplace(key, id);
                cell.edges[i] = id;
                cell.edge_signs[i] = +1;
            } else {
                MeshEdge& e = mesh.edges[it->second];
                if (e.cell1 >= 0)
                    throw StructuralError("edge shared by more than two cells near vertex " +
                                          std::to_string(a));
                if (e.v0 != b || e.v1 != a)
                    throw StructuralError("inconsistent cell orientation at edge " +
                                          std::to_string(it->second));
                e.cell1 = static_cast<int>(c);
                e.tag = BoundaryTag::interior;
                cell.edges[i] = it->second;
                cell.edge_signs[i] = -1;
            }
        }
    }
    return mesh;
}

// Structural checks plus the (A1)-style quality ratios. Throws on broken
// cells; small ratios are reported, never rejected.
inline MeshQualityReport validate(const PolygonalMesh& mesh)
{
    MeshQualityReport rep;
    rep.rho_star = std::numeric_limits<double>::max();
    rep.rho_edge = std::numeric_limits<double>::max();
    double h_sum = 0.0;
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
        const Polygon poly = mesh.cell_polygon(static_cast<int>(c));
        if (std::abs(signed_area(poly)) < 1e-14 * polygon_diameter(poly))
            throw StructuralError("zero-area cell " + std::to_string(c));
        if (!is_simple_polygon(poly))
            throw StructuralError("non-simple polygon in cell " + std::to_string(c));
        const double hE = polygon_diameter(poly);
        h_sum += hE;
        const Polygon ker = polygon_kernel(poly);
        const double inr = ker.empty() ? 0.0 : convex_inradius(ker);
        const double ratio = inr / hE;
        if (ratio < rep.rho_star) {
            rep.rho_star = ratio;
            rep.worst_cell = static_cast<int>(c);
        }
        rep.rho_edge = std::min(rep.rho_edge, min_edge_length(poly) / hE);
    }
    rep.h = h_sum / static_cast<double>(mesh.n_cells());
    return rep;
}

// Tag every boundary edge through a midpoint predicate; interior edges are
// left untouched. An untagged boundary edge is a configuration error.
inline void tag_boundary(PolygonalMesh& mesh,
                         const std::function<std::optional<BoundaryTag>(const Vec2&)>& rule)
{
    for (std::size_t e = 0; e < mesh.n_edges(); ++e) {
        MeshEdge& edge = mesh.edges[e];
        if (!edge.on_boundary()) continue;
        const auto tag = rule(mesh.edge_midpoint(static_cast<int>(e)));
        if (!tag || *tag == BoundaryTag::interior || *tag == BoundaryTag::untagged)
            throw ConfigError("boundary edge " + std::to_string(e) + " (midpoint " +
                              std::to_string(mesh.edge_midpoint(static_cast<int>(e)).x()) + "," +
                              std::to_string(mesh.edge_midpoint(static_cast<int>(e)).y()) +
                              ") received no boundary tag");
        edge.tag = *tag;
    }
}

inline void tag_boundary_all(PolygonalMesh& mesh, BoundaryTag tag)
{
    tag_boundary(mesh, [tag](const Vec2&) { return tag; });
}

namespace meshdetail {

// Merge near-coincident vertices (distinct cells compute shared Voronoi
// vertices through different bisector pairs).
class VertexPool {
public:
    explicit VertexPool(double tol) : tol_(tol) {}

    int insert(const Vec2& p)
    {
        if (const auto id = find(p)) return *id;
        const int id = static_cast<int>(points_.size());
        points_.push_back(p);
        grid_[key(cell_of(p.x()), cell_of(p.y()))].push_back(id);
        return id;
    }

    std::optional<int> find(const Vec2& p) const
    {
        const std::int64_t ix = cell_of(p.x());
        const std::int64_t iy = cell_of(p.y());
        for (std::int64_t dx = -1; dx <= 1; ++dx)
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                auto it = grid_.find(key(ix + dx, iy + dy));
                if (it == grid_.end()) continue;
                for (int id : it->second)
                    if ((points_[id] - p).norm() <= tol_) return id;
            }
        return std::nullopt;
    }

    const std::vector<Vec2>& points() const { return points_; }

private:
    static std::int64_t key(std::int64_t ix, std::int64_t iy)
    {
        return (ix << 32) ^ (iy & 0xffffffff);
    }
    std::int64_t cell_of(double v) const { return static_cast<std::int64_t>(std::floor(v / tol_)); }
    double tol_;
    std::vector<Vec2> points_;
    std::unordered_map<std::int64_t, std::vector<int>> grid_;
};

inline PolygonalMesh mesh_from_polygons(const std::vector<Polygon>& polys, double snap_tol,
                                        std::vector<int> regions = {})
{
    VertexPool pool(snap_tol);
    std::vector<std::vector<int>> loops;
    loops.reserve(polys.size());
    for (const Polygon& poly : polys) {
        std::vector<int> loop;
        for (const Vec2& p : poly) {
            const int id = pool.insert(p);
            if (loop.empty() || loop.back() != id) loop.push_back(id);
        }
        while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
        if (loop.size() < 3) throw StructuralError("degenerate polygon after vertex merging");
        loops.push_back(std::move(loop));
    }
    return build_from_cells(pool.points(), std::move(loops), std::move(regions));
}

// Voronoi cell of seed i inside the unit square, clipped against bisectors of
// the other seeds sorted by distance (early exit once no seed can still cut).
inline Polygon voronoi_cell(const std::vector<Vec2>& seeds, std::size_t i)
{
    Polygon cell = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
    std::vector<std::pair<double, std::size_t>> by_dist;
    by_dist.reserve(seeds.size() - 1);
    for (std::size_t j = 0; j < seeds.size(); ++j)
        if (j != i) by_dist.emplace_back((seeds[j] - seeds[i]).squaredNorm(), j);
    std::sort(by_dist.begin(), by_dist.end());
    for (const auto& [d2, j] : by_dist) {
        double max_r2 = 0.0;
        for (const Vec2& v : cell) max_r2 = std::max(max_r2, (v - seeds[i]).squaredNorm());
        if (d2 >= 4.0 * max_r2) break; // bisector cannot reach the cell any more
        const Vec2 mid = 0.5 * (seeds[i] + seeds[j]);
        cell = clip_half_plane(cell, mid, seeds[j] - seeds[i]);
        if (cell.empty()) throw StructuralError("empty Voronoi cell (coincident seeds?)");
    }
    return cell;
}

struct LloydResult {
    std::vector<Polygon> cells;
    std::vector<double> movements;     // max seed movement per iteration
    std::vector<double> total_sq_dist; // sum over seeds of |seed - centroid|^2
    std::vector<double> cvt_energy;    // quantization energy, strictly decreasing
};

inline LloydResult lloyd_relax(std::vector<Vec2>& seeds, int max_iter, double move_tol)
{
    LloydResult res;
    for (int it = 0; it < max_iter; ++it) {
        double moved = 0.0;
        double total = 0.0;
        double energy = 0.0;
        std::vector<Vec2> next(seeds.size());
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            const Polygon cell = voronoi_cell(seeds, i);
            energy += polygon_quantization_energy(cell, seeds[i]);
            next[i] = polygon_centroid(cell);
            moved = std::max(moved, (next[i] - seeds[i]).norm());
            total += (next[i] - seeds[i]).squaredNorm();
        }
        seeds = std::move(next);
        res.movements.push_back(moved);
        res.total_sq_dist.push_back(total);
        res.cvt_energy.push_back(energy);
        if (moved < move_tol) break;
    }
    // final diagram for the converged seeds
    for (std::size_t i = 0; i < seeds.size(); ++i) res.cells.push_back(voronoi_cell(seeds, i));
    return res;
}

} // namespace meshdetail

enum class MeshFamily { tria, quad, hexa, voro };

inline MeshFamily mesh_family_from_string(const std::string& s)
{
    if (s == "tria") return MeshFamily::tria;
    if (s == "quad") return MeshFamily::quad;
    if (s == "hexa") return MeshFamily::hexa;
    if (s == "voro") return MeshFamily::voro;
    throw ConfigError("unknown mesh family '" + s + "' (expected tria|quad|hexa|voro)");
}

// Mesh generators for the unit square. tria: criss-cross triangles; quad:
// Cartesian; hexa: Voronoi of a triangular lattice with a deterministic
// distortion of interior vertices; voro: Lloyd-relaxed Voronoi of n^2 random
// seeds (at most 100 iterations or movement below 1e-10 * h).
inline PolygonalMesh generate(MeshFamily family, int n, unsigned seed = 0)
{
    if (n < 2) throw ConfigError("mesh subdivision count must be >= 2, got " + std::to_string(n));
    const double s = 1.0 / n;

    switch (family) {
        case MeshFamily::quad: {
            std::vector<Vec2> verts;
            for (int j = 0; j <= n; ++j)
                for (int i = 0; i <= n; ++i) verts.emplace_back(i * s, j * s);
            auto vid = [n](int i, int j) { return j * (n + 1) + i; };
            std::vector<std::vector<int>> loops;
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    loops.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
            return build_from_cells(std::move(verts), std::move(loops));
        }
        case MeshFamily::tria: {
            // each grid square is split by both diagonals around its center
            std::vector<Vec2> verts;
            for (int j = 0; j <= n; ++j)
                for (int i = 0; i <= n; ++i) verts.emplace_back(i * s, j * s);
            auto vid = [n](int i, int j) { return j * (n + 1) + i; };
            const int corner_count = (n + 1) * (n + 1);
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) verts.emplace_back((i + 0.5) * s, (j + 0.5) * s);
            auto cid = [n, corner_count](int i, int j) { return corner_count + j * n + i; };
            std::vector<std::vector<int>> loops;
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    const int c = cid(i, j);
                    loops.push_back({vid(i, j), vid(i + 1, j), c});
                    loops.push_back({vid(i + 1, j), vid(i + 1, j + 1), c});
                    loops.push_back({vid(i + 1, j + 1), vid(i, j + 1), c});
                    loops.push_back({vid(i, j + 1), vid(i, j), c});
                }
            return build_from_cells(std::move(verts), std::move(loops));
        }
        case MeshFamily::hexa: {
            // Voronoi of a triangular lattice gives the hexagonal tiling
            std::vector<Vec2> seeds;
            const double dy = s * std::sqrt(3.0) / 2.0;
            const int rows = static_cast<int>(std::lround(1.0 / dy));
            for (int j = 0; j <= rows; ++j) {
                const double off = (j % 2 == 0) ? 0.0 : 0.5 * s;
                for (int i = 0; i <= n; ++i) {
                    const double x = i * s + off;
                    if (x <= 1.0 + 1e-12) seeds.emplace_back(std::min(x, 1.0), std::min(j * dy, 1.0));
                }
            }
            std::vector<Polygon> cells;
            cells.reserve(seeds.size());
            for (std::size_t i = 0; i < seeds.size(); ++i)
                cells.push_back(meshdetail::voronoi_cell(seeds, i));
            PolygonalMesh mesh = meshdetail::mesh_from_polygons(cells, 1e-10);

            // distort interior vertices by at most 0.2 x shortest incident edge
            std::vector<double> min_edge(mesh.n_vertices(), std::numeric_limits<double>::max());
            for (const MeshEdge& e : mesh.edges) {
                const double len = (mesh.vertices[e.v1] - mesh.vertices[e.v0]).norm();
                min_edge[e.v0] = std::min(min_edge[e.v0], len);
                min_edge[e.v1] = std::min(min_edge[e.v1], len);
            }
            std::vector<bool> on_boundary(mesh.n_vertices(), false);
            for (const MeshEdge& e : mesh.edges)
                if (e.on_boundary()) on_boundary[e.v0] = on_boundary[e.v1] = true;
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
            std::uniform_real_distribution<double> radius(0.0, 0.2);
            for (std::size_t v = 0; v < mesh.n_vertices(); ++v) {
                const double a = angle(rng);
                const double r = radius(rng); // draw always: layout-independent stream
                if (on_boundary[v]) continue;
                mesh.vertices[v] += r * min_edge[v] * Vec2(std::cos(a), std::sin(a));
            }
            return mesh;
        }
        case MeshFamily::voro: {
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> uni(0.0, 1.0);
            std::vector<Vec2> seeds(static_cast<std::size_t>(n) * n);
            for (auto& p : seeds) {
                const double x = uni(rng);
                const double y = uni(rng);
                p = Vec2(x, y);
            }
            auto result = meshdetail::lloyd_relax(seeds, 100, 1e-10 * s);
            return meshdetail::mesh_from_polygons(result.cells, 1e-10);
        }
    }
    throw ConfigError("unhandled mesh family");
}

enum class HolesConfig { fiveHoles, eightHoles };

// Hole centres from the scattering benchmark; all lie on grid corners of the
// 38 x 38 Cartesian mesh (and of any multiple of 38).
inline std::vector<Vec2> hole_centres(HolesConfig config)
{
    const double a = 0.6052631578947355;
    const double b = 0.5;
    const double c = 0.3947368421052622;
    std::vector<Vec2> centres = {{a, c}, {a, b}, {a, a}, {b, a}, {c, a}};
    if (config == HolesConfig::eightHoles) {
        centres.push_back({b, c});
        centres.push_back({c, c});
        centres.push_back({c, b});
    }
    return centres;
}

constexpr double kHoleRadius = 0.01; // all holes have diameter 0.02

namespace meshdetail {

// Vertices of the inscribed 16-gon; j=0,4,8,12 land exactly on the axis
// directions so the polygon meets the grid lines at the cut points.
inline Polygon hole_polygon(const Vec2& centre, double r)
{
    Polygon poly;
    for (int j = 0; j < 16; ++j) {
        const double ang = 2.0 * M_PI * j / 16.0;
        poly.push_back(centre + r * Vec2(std::cos(ang), std::sin(ang)));
    }
    return poly;
}

} // namespace meshdetail

// Cartesian n x n mesh with polygonal holes cut out around grid corners.
// Hole-boundary edges are tagged Neumann, the outer boundary Robin. The
// refine level splits every uncut quadrilateral 4^r-fold; cut cells absorb the
// resulting hanging nodes as extra (collinear) polygon vertices.
inline PolygonalMesh build_holes_mesh(HolesConfig config, int n = 38, int refine = 0)
{
    if (n < 2) throw ConfigError("holes mesh requires n >= 2");
    if (refine < 0) throw ConfigError("refine level must be >= 0");
    const double s = 1.0 / n;
    const double r = kHoleRadius;
    if (r >= 0.5 * s)
        throw ConfigError("holes mesh: hole radius exceeds half a cell, choose smaller n");

    std::vector<Vec2> centres = hole_centres(config);
    // snap each centre to its grid corner; the benchmark values are corners up
    // to ~1e-15, anything farther is an unsupported configuration
    std::vector<std::pair<int, int>> corner(centres.size());
    for (std::size_t h = 0; h < centres.size(); ++h) {
        const int i = static_cast<int>(std::lround(centres[h].x() * n));
        const int j = static_cast<int>(std::lround(centres[h].y() * n));
        const Vec2 snapped(i * s, j * s);
        if ((snapped - centres[h]).norm() > 1e-9)
            throw ConfigError("hole centre does not coincide with a grid corner at n = " +
                              std::to_string(n));
        if (i < 2 || i > n - 2 || j < 2 || j > n - 2)
            throw ConfigError("hole touches the outer boundary");
        corner[h] = {i, j};
        centres[h] = snapped;
    }

    std::vector<Polygon> polys;
    std::vector<bool> cut_flags;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const Polygon quad = {Vec2(i * s, j * s), Vec2((i + 1) * s, j * s),
                                  Vec2((i + 1) * s, (j + 1) * s), Vec2(i * s, (j + 1) * s)};
            int hole_at_corner = -1; // local corner index carrying a hole centre
            for (std::size_t h = 0; h < centres.size(); ++h) {
                const auto [ci, cj] = corner[h];
                int local = -1;
                if (ci == i && cj == j) local = 0;
                else if (ci == i + 1 && cj == j) local = 1;
                else if (ci == i + 1 && cj == j + 1) local = 2;
                else if (ci == i && cj == j + 1) local = 3;
                if (local < 0) continue;
                if (hole_at_corner >= 0) throw ConfigError("holes too close: one cell meets two");
                hole_at_corner = local;
            }
            Polygon cell = quad;
            bool cut = false;
            if (hole_at_corner >= 0) {
                // replace the corner by the hole chain: entry point at distance
                // r before the corner, three interior 16-gon vertices, exit
                // point at distance r after it (clockwise around the hole so
                // the hole region stays outside the cell)
                const int local = hole_at_corner;
                const Vec2 v = quad[local];
                const Vec2 din = (quad[(local + 3) % 4] - v).normalized();
                const Vec2 dout = (quad[(local + 1) % 4] - v).normalized();
                const double a_in = std::atan2(din.y(), din.x());
                Polygon chain;
                chain.push_back(v + r * din);
                for (int t = 1; t <= 3; ++t) {
                    const double ang = a_in - t * (M_PI / 8.0);
                    chain.push_back(v + r * Vec2(std::cos(ang), std::sin(ang)));
                }
                chain.push_back(v + r * dout);
                cell.clear();
                for (int t = 0; t < 4; ++t) {
                    if (t == local)
                        cell.insert(cell.end(), chain.begin(), chain.end());
                    else
                        cell.push_back(quad[t]);
                }
                cut = true;
            }
            if (polygon_area(cell) < 1e-14)
                continue; // sliver protection; unreachable for corner-aligned holes
            polys.push_back(cell);
            cut_flags.push_back(cut);
        }

    // refinement: split uncut quads, then insert hanging vertices into the
    // loops of their unrefined neighbours
    for (int level = 0; level < refine; ++level) {
        std::vector<Polygon> next;
        std::vector<bool> next_cut;
        for (std::size_t c = 0; c < polys.size(); ++c) {
            if (cut_flags[c] || polys[c].size() != 4) {
                next.push_back(polys[c]);
                next_cut.push_back(cut_flags[c]);
                continue;
            }
            const Polygon& q = polys[c];
            const Vec2 m01 = 0.5 * (q[0] + q[1]), m12 = 0.5 * (q[1] + q[2]);
            const Vec2 m23 = 0.5 * (q[2] + q[3]), m30 = 0.5 * (q[3] + q[0]);
            const Vec2 cc = 0.25 * (q[0] + q[1] + q[2] + q[3]);
            next.push_back({q[0], m01, cc, m30});
            next.push_back({m01, q[1], m12, cc});
            next.push_back({cc, m12, q[2], m23});
            next.push_back({m30, cc, m23, q[3]});
            next_cut.insert(next_cut.end(), 4, false);
        }
        // conformity: add midpoints of refined edges to coarse neighbours
        meshdetail::VertexPool probe(1e-12);
        for (const Polygon& p : next)
            for (const Vec2& v : p) probe.insert(v);
        for (std::size_t c = 0; c < next.size(); ++c) {
            if (!next_cut[c]) continue;
            Polygon enriched;
            const Polygon& p = next[c];
            for (std::size_t i = 0; i < p.size(); ++i) {
                enriched.push_back(p[i]);
                const Vec2 mid = 0.5 * (p[i] + p[(i + 1) % p.size()]);
                if (probe.find(mid)) enriched.push_back(mid);
            }
            next[c] = enriched;
        }
        polys = std::move(next);
        cut_flags = std::move(next_cut);
    }

    PolygonalMesh mesh = meshdetail::mesh_from_polygons(polys, 1e-12);
    for (std::size_t e = 0; e < mesh.n_edges(); ++e) {
        MeshEdge& edge = mesh.edges[e];
        if (!edge.on_boundary()) continue;
        const Vec2 mid = mesh.edge_midpoint(static_cast<int>(e));
        const bool outer = mid.x() < 1e-9 || mid.x() > 1.0 - 1e-9 || mid.y() < 1e-9 ||
                           mid.y() > 1.0 - 1e-9;
        edge.tag = outer ? BoundaryTag::robin : BoundaryTag::neumann;
    }
    return mesh;
}

} // namespace polywave
