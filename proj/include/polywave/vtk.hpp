#pragma once

#include "polywave/analysis.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace polywave {

// Legacy ASCII VTK writers for solution snapshots: a point cloud carrying the
// pressure polynomial sampled at quadrature points, and the polygonal mesh
// with cell means and centroid velocities.

inline void write_vtk_pressure_points(const PolygonalMesh& mesh, const DofMap& dofmap,
                                      const std::vector<ElementOps>& ops,
                                      const WaveState& state, const std::string& path)
{
    std::vector<Vec2> pts;
    std::vector<double> vals;
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
        const ElementOps& op = ops[c];
        Eigen::VectorXd pcoef(op.n_pressure());
        for (int i = 0; i < op.n_pressure(); ++i)
            pcoef[i] = state.p[dofmap.pressure_dof(static_cast<int>(c), i)];
        for (const auto& q : op.cell_rule.points) {
            pts.push_back(q.x);
            vals.push_back(op.eval_pressure(pcoef, q.x));
        }
    }
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open VTK file: " + path);
    os << "# vtk DataFile Version 3.0\n";
    os << "pressure sampled at quadrature points, t=" << state.t << "\n";
    os << "ASCII\nDATASET POLYDATA\n";
    os << std::setprecision(12);
    os << "POINTS " << pts.size() << " double\n";
    for (const Vec2& p : pts) os << p.x() << " " << p.y() << " 0\n";
    os << "VERTICES " << pts.size() << " " << 2 * pts.size() << "\n";
    for (std::size_t i = 0; i < pts.size(); ++i) os << "1 " << i << "\n";
    os << "POINT_DATA " << pts.size() << "\n";
    os << "SCALARS p double 1\nLOOKUP_TABLE default\n";
    for (double v : vals) os << v << "\n";
}

inline void write_vtk_cells(const PolygonalMesh& mesh, const DofMap& dofmap,
                            const std::vector<ElementOps>& ops, const WaveState& state,
                            const std::string& path)
{
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open VTK file: " + path);
    os << "# vtk DataFile Version 3.0\n";
    os << "cell means and centroid velocities, t=" << state.t << "\n";
    os << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << std::setprecision(12);
    os << "POINTS " << mesh.n_vertices() << " double\n";
    for (const Vec2& v : mesh.vertices) os << v.x() << " " << v.y() << " 0\n";
    std::size_t list_len = 0;
    for (const MeshCell& c : mesh.cells) list_len += c.vertices.size() + 1;
    os << "CELLS " << mesh.n_cells() << " " << list_len << "\n";
    for (const MeshCell& c : mesh.cells) {
        os << c.vertices.size();
        for (int v : c.vertices) os << " " << v;
        os << "\n";
    }
    os << "CELL_TYPES " << mesh.n_cells() << "\n";
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) os << "7\n"; // VTK_POLYGON
    os << "CELL_DATA " << mesh.n_cells() << "\n";
    os << "SCALARS p_mean double 1\nLOOKUP_TABLE default\n";
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
        const ElementOps& op = ops[c];
        Eigen::VectorXd pcoef(op.n_pressure());
        for (int i = 0; i < op.n_pressure(); ++i)
            pcoef[i] = state.p[dofmap.pressure_dof(static_cast<int>(c), i)];
        double mean = 0.0;
        for (const auto& q : op.cell_rule.points) mean += q.w * op.eval_pressure(pcoef, q.x);
        os << mean / op.geo.area << "\n";
    }
    os << "VECTORS u double\n";
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
        const ElementOps& op = ops[c];
        const Eigen::VectorXd loc = dofmap.gather(static_cast<int>(c), state.u);
        const Vec2 u = op.eval_projection(loc, op.geo.centroid);
        os << u.x() << " " << u.y() << " 0\n";
    }
}

// Structural check of a legacy VTK file: magic header, declared section counts
// consistent with the payload. Used by the output tests.
inline bool validate_legacy_vtk(const std::string& path, std::string* why = nullptr)
{
    auto fail = [&why](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    std::ifstream is(path);
    if (!is) return fail("cannot open file");
    std::string line;
    if (!std::getline(is, line) || line.rfind("# vtk DataFile Version", 0) != 0)
        return fail("missing magic header");
    if (!std::getline(is, line)) return fail("missing title");
    if (!std::getline(is, line) || line != "ASCII") return fail("expected ASCII format");
    if (!std::getline(is, line) || line.rfind("DATASET", 0) != 0) return fail("missing DATASET");

    std::size_t n_points = 0;
    std::size_t data_count = 0;
    std::string word;
    while (is >> word) {
        if (word == "POINTS") {
            std::string type;
            if (!(is >> n_points >> type)) return fail("bad POINTS header");
            double x;
            for (std::size_t i = 0; i < 3 * n_points; ++i)
                if (!(is >> x)) return fail("truncated POINTS payload");
        } else if (word == "VERTICES" || word == "CELLS") {
            std::size_t n = 0, len = 0;
            if (!(is >> n >> len)) return fail("bad " + word + " header");
            std::size_t consumed = 0;
            for (std::size_t i = 0; i < n; ++i) {
                std::size_t m;
                if (!(is >> m)) return fail("truncated " + word);
                int idx;
                for (std::size_t j = 0; j < m; ++j)
                    if (!(is >> idx)) return fail("truncated " + word + " entry");
                consumed += m + 1;
            }
            if (consumed != len) return fail(word + " length mismatch");
        } else if (word == "CELL_TYPES") {
            std::size_t n = 0;
            if (!(is >> n)) return fail("bad CELL_TYPES header");
            int t;
            for (std::size_t i = 0; i < n; ++i)
                if (!(is >> t)) return fail("truncated CELL_TYPES");
        } else if (word == "POINT_DATA" || word == "CELL_DATA") {
            std::size_t n = 0;
            if (!(is >> n)) return fail("bad " + word + " header");
            data_count = n;
        } else if (word == "SCALARS") {
            std::string name, type, rest;
            if (!(is >> name >> type)) return fail("bad SCALARS header");
            std::getline(is, rest);
            int comps = 1;
            std::istringstream(rest) >> comps;
            comps = std::max(comps, 1);
            std::string lut, tbl;
            if (!(is >> lut >> tbl) || lut != "LOOKUP_TABLE") return fail("missing LOOKUP_TABLE");
            double v;
            for (std::size_t i = 0; i < data_count * static_cast<std::size_t>(comps); ++i)
                if (!(is >> v)) return fail("truncated SCALARS payload");
        } else if (word == "VECTORS") {
            std::string name, type;
            if (!(is >> name >> type)) return fail("bad VECTORS header");
            double v;
            for (std::size_t i = 0; i < 3 * data_count; ++i)
                if (!(is >> v)) return fail("truncated VECTORS payload");
        } else {
            return fail("unexpected section '" + word + "'");
        }
    }
    return true;
}

} // namespace polywave
