#pragma once

#include "polywave/mesh.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace polywave {

// Text mesh format:
//   polymesh 1
//   vertices N      followed by N lines "x y"
//   cells M         followed by M lines of ccw vertex indices
//   boundary K      followed by K lines "v0 v1 tag"
inline void write_polymesh(const PolygonalMesh& mesh, std::ostream& os)
{
    os << "polymesh 1\n";
    os << "vertices " << mesh.n_vertices() << "\n";
    os << std::setprecision(17);
    for (const Vec2& v : mesh.vertices) os << v.x() << " " << v.y() << "\n";
    os << "cells " << mesh.n_cells() << "\n";
    for (const MeshCell& c : mesh.cells) {
        for (std::size_t i = 0; i < c.vertices.size(); ++i)
            os << (i ? " " : "") << c.vertices[i];
        os << "\n";
    }
    std::size_t n_bnd = 0;
    for (const MeshEdge& e : mesh.edges)
        if (e.on_boundary()) ++n_bnd;
    os << "boundary " << n_bnd << "\n";
    for (const MeshEdge& e : mesh.edges)
        if (e.on_boundary()) os << e.v0 << " " << e.v1 << " " << to_string(e.tag) << "\n";
}

inline void write_polymesh(const PolygonalMesh& mesh, const std::string& path)
{
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open mesh file for writing: " + path);
    write_polymesh(mesh, os);
}

inline PolygonalMesh read_polymesh(std::istream& is)
{
    auto fail = [](const std::string& what) -> void {
        throw ConfigError("polymesh parse error: " + what);
    };
    std::string word;
    int version = 0;
    if (!(is >> word >> version) || word != "polymesh" || version != 1)
        fail("expected header 'polymesh 1'");

    std::size_t n_verts = 0;
    if (!(is >> word >> n_verts) || word != "vertices") fail("expected 'vertices N'");
    std::vector<Vec2> verts(n_verts);
    for (auto& v : verts) {
        double x, y;
        if (!(is >> x >> y)) fail("truncated vertex list");
        v = Vec2(x, y);
    }

    std::size_t n_cells = 0;
    if (!(is >> word >> n_cells) || word != "cells") fail("expected 'cells M'");
    is.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    std::vector<std::vector<int>> loops(n_cells);
    for (auto& loop : loops) {
        std::string line;
        do {
            if (!std::getline(is, line)) fail("truncated cell list");
        } while (line.find_first_not_of(" \t\r") == std::string::npos);
        std::istringstream ls(line);
        int v;
        while (ls >> v) loop.push_back(v);
        if (loop.size() < 3) fail("cell with fewer than 3 vertices");
    }

    PolygonalMesh mesh = build_from_cells(std::move(verts), std::move(loops));

    std::size_t n_bnd = 0;
    if (!(is >> word >> n_bnd) || word != "boundary") fail("expected 'boundary K'");
    std::unordered_map<std::pair<int, int>, int, meshdetail::PairHash> bnd_edge;
    for (std::size_t e = 0; e < mesh.n_edges(); ++e)
        if (mesh.edges[e].on_boundary())
            bnd_edge.emplace(std::minmax(mesh.edges[e].v0, mesh.edges[e].v1),
                             static_cast<int>(e));
    for (std::size_t i = 0; i < n_bnd; ++i) {
        int a, b;
        std::string tag;
        if (!(is >> a >> b >> tag)) fail("truncated boundary list");
        auto it = bnd_edge.find(std::minmax(a, b));
        if (it == bnd_edge.end())
            fail("boundary record (" + std::to_string(a) + "," + std::to_string(b) +
                 ") does not match a boundary edge");
        BoundaryTag t;
        if (tag == "dirichlet") t = BoundaryTag::dirichlet;
        else if (tag == "neumann") t = BoundaryTag::neumann;
        else if (tag == "robin") t = BoundaryTag::robin;
        else if (tag == "untagged") t = BoundaryTag::untagged;
        else { fail("unknown boundary tag '" + tag + "'"); return mesh; }
        mesh.edges[it->second].tag = t;
    }
    return mesh;
}

inline PolygonalMesh read_polymesh(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open mesh file: " + path);
    return read_polymesh(is);
}

} // namespace polywave
