#pragma once

#include "polywave/basis.hpp"
#include "polywave/errors.hpp"
#include "polywave/fields.hpp"
#include "polywave/mesh.hpp"
#include "polywave/quadrature.hpp"

#include <Eigen/Dense>

#include <vector>

namespace polywave {

// Local DoF layout of V_k(E): per edge k+1 normal moments against Legendre
// polynomials in the global edge parameter, then the divergence moments
// against m_a with |a| >= 1, then the rotated moments against x_perp m_b.
// All functionals are normalized to scale like field values:
//   edge:  (1/h_e) int_e (w . n) P_i ds
//   div:   (h_E/|E|) int_E (div w) m_a dE
//   rot:   (1/|E|) int_E w . (x_perp m_b) dE
struct LocalDofSet {
    int k = 0;
    int n_edges = 0;

    int per_edge() const { return k + 1; }
    int n_edge_dofs() const { return n_edges * (k + 1); }
    int n_div() const { return poly_space_dim(k) - 1; }
    int n_rot() const { return k > 0 ? poly_space_dim(k - 1) : 0; }
    int size() const { return n_edge_dofs() + n_div() + n_rot(); } // l_E(k+1)+k^2+2k

    int edge_dof(int local_edge, int moment) const { return local_edge * (k + 1) + moment; }
    int div_dof(int alpha) const { return n_edge_dofs() + (alpha - 1); } // alpha >= 1
    int rot_dof(int beta) const { return n_edge_dofs() + n_div() + beta; }
};

// Geometry of one element as the space machinery sees it. Edge endpoints are
// stored in the global edge orientation; `sign` is +1 when the cell's ccw loop
// traverses the stored direction (so n_out = sign * global normal).
struct ElementEdge {
    Vec2 a, b;
    double len = 0.0;
    Vec2 n_out;
    int sign = +1;
    int mesh_edge = -1;
};

struct ElementGeometry {
    Polygon poly;
    Vec2 centroid;
    double area = 0.0;
    double diameter = 0.0;
    std::vector<ElementEdge> edges;

    static ElementGeometry from_polygon(const Polygon& poly)
    {
        ElementGeometry g;
        g.poly = poly;
        g.centroid = polygon_centroid(poly);
        g.area = polygon_area(poly);
        g.diameter = polygon_diameter(poly);
        const std::size_t n = poly.size();
        g.edges.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            ElementEdge& e = g.edges[i];
            e.a = poly[i];
            e.b = poly[(i + 1) % n];
            e.len = (e.b - e.a).norm();
            e.n_out = rot90(e.b - e.a) / e.len;
            e.sign = +1;
        }
        return g;
    }

    static ElementGeometry from_mesh(const PolygonalMesh& mesh, int cell)
    {
        const MeshCell& mc = mesh.cells[cell];
        ElementGeometry g = from_polygon(mesh.cell_polygon(cell));
        for (std::size_t i = 0; i < mc.edges.size(); ++i) {
            ElementEdge& e = g.edges[i];
            const MeshEdge& me = mesh.edges[mc.edges[i]];
            e.mesh_edge = mc.edges[i];
            e.sign = mc.edge_signs[i];
            e.a = mesh.vertices[me.v0];
            e.b = mesh.vertices[me.v1];
            e.len = (e.b - e.a).norm();
            e.n_out = static_cast<double>(e.sign) * rot90(e.b - e.a) / e.len;
        }
        return g;
    }
};

enum class OrthoMode { off, on, automatic };

struct ElementOptions {
    int quad_order = -1;               // -1: use 2k+2
    OrthoMode ortho = OrthoMode::automatic; // automatic: on for k >= 3
    // quadrature order for DoF/projection evaluation of analytic (non
    // polynomial) data; -1 picks max(2k+2, 12)
    int data_quad_order = -1;
};

// Per-element operators of the H(div) virtual space: the L^2 projector onto
// [P_k]^2 through the grad/x_perp moment system, the divergence
// reconstruction, the pressure-basis Gram, and the stabilized mass matrix
//   m_h^E = P^T G P + |E| (I-Q)^T (I-Q).
class ElementOps {
public:
    ElementOps(ElementGeometry geometry, int order, ElementOptions opts = {})
        : geo(std::move(geometry)), k(order)
    {
        if (k < 0) throw ConfigError("method order k must be >= 0");
        dofs.k = k;
        dofs.n_edges = static_cast<int>(geo.edges.size());
        quad_order = opts.quad_order >= 0 ? opts.quad_order : 2 * k + 2;
        data_order = opts.data_quad_order >= 0 ? opts.data_quad_order
                                               : std::max(2 * k + 2, 12);
        const bool ortho = opts.ortho == OrthoMode::on ||
                           (opts.ortho == OrthoMode::automatic && k >= 3);

        p_basis = ScaledMonomialBasis(k, geo.centroid, geo.diameter);
        v_basis = VectorPolyBasis(k, geo.centroid, geo.diameter);
        cell_rule = polygon_rule(geo.poly, quad_order);
        edge_rules.reserve(geo.edges.size());
        for (const auto& e : geo.edges) edge_rules.push_back(edge_rule(e.a, e.b, quad_order));

        build_grams(ortho);
        build_div_reconstruction();
        build_projector();
        build_dof_functionals();
        build_mass();
    }

    ElementGeometry geo;
    int k;
    LocalDofSet dofs;
    int quad_order = 0;
    int data_order = 0;
    ScaledMonomialBasis p_basis; // raw scaled monomials, degree k
    VectorPolyBasis v_basis;     // raw decomposition basis, degree k
    PolygonQuadrature cell_rule;
    std::vector<EdgeQuadrature> edge_rules;

    Eigen::MatrixXd Tp;   // pressure change of basis (rows = new basis)
    Eigen::MatrixXd Tv;   // vector change of basis
    Eigen::MatrixXd Hp;   // transformed scalar Gram (pressure mass with c=1)
    Eigen::MatrixXd Gv;   // transformed vector Gram
    Eigen::MatrixXd D;    // dofs -> pressure-basis coefficients of div v_h
    Eigen::MatrixXd Pi;   // dofs -> vector-basis coefficients of Pi0_k v_h
    Eigen::MatrixXd Bloc; // pressure moments of div: Bloc = Hp * D (exact)
    Eigen::MatrixXd Q;    // dof functionals of the projection
    Eigen::MatrixXd Mh;   // stabilized local velocity mass

    int n_dofs() const { return dofs.size(); }
    int n_pressure() const { return p_basis.size(); }
    int n_vector() const { return v_basis.size(); }

    // ---- pointwise evaluation ------------------------------------------

    double eval_pressure_basis(int i, const Vec2& x) const
    {
        double v = 0.0;
        for (int j = 0; j < n_pressure(); ++j) v += Tp(i, j) * p_basis.eval_one(j, x);
        return v;
    }

    double eval_pressure(const Eigen::VectorXd& coeff, const Vec2& x) const
    {
        return p_basis.eval_poly(Tp.transpose() * coeff, x);
    }

    Vec2 eval_vector(const Eigen::VectorXd& coeff, const Vec2& x) const
    {
        return v_basis.eval_poly(Tv.transpose() * coeff, x);
    }

    Vec2 eval_projection(const Eigen::VectorXd& local_dofs, const Vec2& x) const
    {
        return eval_vector(Pi * local_dofs, x);
    }

    double eval_div(const Eigen::VectorXd& local_dofs, const Vec2& x) const
    {
        return eval_pressure(D * local_dofs, x);
    }

    // ---- DoF evaluation of analytic data -------------------------------

    // Local DoF vector of a smooth field, outward-normal convention.
    Eigen::VectorXd interpolate(const VectorField& w, double t) const
    {
        Eigen::VectorXd d(n_dofs());
        for (int le = 0; le < dofs.n_edges; ++le) {
            const auto& e = geo.edges[le];
            const EdgeQuadrature rule = edge_rule(e.a, e.b, data_order);
            for (int i = 0; i <= k; ++i) {
                double s = 0.0;
                for (std::size_t q = 0; q < rule.points.size(); ++q)
                    s += rule.weights[q] * w(rule.points[q], t).dot(e.n_out) *
                         quadrature::legendre(i, rule.params[q]);
                d[dofs.edge_dof(le, i)] = s / e.len;
            }
        }
        if (dofs.n_div() > 0 || dofs.n_rot() > 0) {
            const PolygonQuadrature rule = polygon_rule(geo.poly, data_order);
            for (int a = 1; a < n_pressure(); ++a) {
                double s = 0.0;
                if (w.has_divergence()) {
                    for (const auto& q : rule.points)
                        s += q.w * w.divergence(q.x, t) * p_basis.eval_one(a, q.x);
                } else {
                    for (const auto& q : rule.points)
                        s -= q.w * w(q.x, t).dot(p_basis.grad_one(a, q.x));
                    for (const auto& e : geo.edges) {
                        const EdgeQuadrature er = edge_rule(e.a, e.b, data_order);
                        for (std::size_t q = 0; q < er.points.size(); ++q)
                            s += er.weights[q] * w(er.points[q], t).dot(e.n_out) *
                                 p_basis.eval_one(a, er.points[q]);
                    }
                }
                d[dofs.div_dof(a)] = s * geo.diameter / geo.area;
            }
            for (int b = 0; b < dofs.n_rot(); ++b) {
                double s = 0.0;
                for (const auto& q : rule.points)
                    s += q.w * w(q.x, t).dot(v_basis.eval_one(v_basis.n_grad() + b, q.x));
                d[dofs.rot_dof(b)] = s / geo.area;
            }
        }
        return d;
    }

    // L^2(E) projection of an analytic scalar onto P_k(E), returned in the
    // (possibly transformed) pressure basis.
    Eigen::VectorXd project_scalar(const ScalarField& f, double t) const
    {
        const PolygonQuadrature rule = polygon_rule(geo.poly, data_order);
        Eigen::VectorXd mom = Eigen::VectorXd::Zero(n_pressure());
        for (const auto& q : rule.points) {
            const double fv = f(q.x, t);
            for (int a = 0; a < n_pressure(); ++a) mom[a] += q.w * fv * p_basis.eval_one(a, q.x);
        }
        return Hp_llt.solve(Tp * mom);
    }

    // Componentwise L^2(E) projection of an analytic vector field onto
    // [P_k(E)]^2, in the (possibly transformed) vector basis.
    Eigen::VectorXd project_vector(const VectorField& w, double t) const
    {
        const PolygonQuadrature rule = polygon_rule(geo.poly, data_order);
        Eigen::VectorXd mom = Eigen::VectorXd::Zero(n_vector());
        for (const auto& q : rule.points) {
            const Vec2 wv = w(q.x, t);
            for (int j = 0; j < n_vector(); ++j) mom[j] += q.w * wv.dot(v_basis.eval_one(j, q.x));
        }
        return Gv_llt.solve(Tv * mom);
    }

private:
    Eigen::LLT<Eigen::MatrixXd> Hp_llt;
    Eigen::LLT<Eigen::MatrixXd> Gv_llt;

    void build_grams(bool ortho)
    {
        const int np = n_pressure();
        const int nv = n_vector();
        Eigen::MatrixXd H_raw = Eigen::MatrixXd::Zero(np, np);
        Eigen::MatrixXd G_raw = Eigen::MatrixXd::Zero(nv, nv);
        for (const auto& q : cell_rule.points) {
            Eigen::VectorXd mv(np);
            for (int a = 0; a < np; ++a) mv[a] = p_basis.eval_one(a, q.x);
            H_raw.selfadjointView<Eigen::Lower>().rankUpdate(mv, q.w);
            Eigen::MatrixXd vv(2, nv);
            for (int j = 0; j < nv; ++j) vv.col(j) = v_basis.eval_one(j, q.x);
            G_raw.selfadjointView<Eigen::Lower>().rankUpdate(vv.transpose(), q.w);
        }
        H_raw = H_raw.selfadjointView<Eigen::Lower>();
        G_raw = G_raw.selfadjointView<Eigen::Lower>();
        try {
            Tp = ortho ? orthonormalize(H_raw) : Eigen::MatrixXd::Identity(np, np);
            Tv = ortho ? orthonormalize(G_raw) : Eigen::MatrixXd::Identity(nv, nv);
        } catch (const std::runtime_error& err) {
            throw ConditioningError(std::string("element basis conditioning failure: ") +
                                    err.what());
        }
        Hp = Tp * H_raw * Tp.transpose();
        Gv = Tv * G_raw * Tv.transpose();
        Hp = 0.5 * (Hp + Hp.transpose()).eval();
        Gv = 0.5 * (Gv + Gv.transpose()).eval();
        Hp_llt.compute(Hp);
        Gv_llt.compute(Gv);
        if (Hp_llt.info() != Eigen::Success || Gv_llt.info() != Eigen::Success)
            throw ConditioningError("element Gram matrix is not SPD");
        H_raw_ = std::move(H_raw);
    }

    // Moment matrix against the raw monomials: the div DoFs give the higher
    // moments directly, the mean comes from the edge DoFs by the divergence
    // theorem.
    void build_div_reconstruction()
    {
        const int np = n_pressure();
        Eigen::MatrixXd Mdiv = Eigen::MatrixXd::Zero(np, n_dofs());
        for (int le = 0; le < dofs.n_edges; ++le)
            Mdiv(0, dofs.edge_dof(le, 0)) = geo.edges[le].len;
        for (int a = 1; a < np; ++a)
            Mdiv(a, dofs.div_dof(a)) = geo.area / geo.diameter;
        Bloc = Tp * Mdiv;
        D = Hp_llt.solve(Bloc);
    }

    void build_projector()
    {
        const int nd = n_dofs();
        const auto& kp1 = v_basis.scalar_kp1();
        const int np1 = kp1.size();
        // cross moments int m_g mtilde_a for the integration-by-parts term
        Eigen::MatrixXd Hx = Eigen::MatrixXd::Zero(n_pressure(), np1);
        for (const auto& q : cell_rule.points)
            for (int g = 0; g < n_pressure(); ++g)
                for (int a = 0; a < np1; ++a)
                    Hx(g, a) += q.w * p_basis.eval_one(g, q.x) * kp1.eval_one(a, q.x);

        Eigen::MatrixXd R_raw = Eigen::MatrixXd::Zero(n_vector(), nd);
        // gradient family: int v . grad mtilde = -int (div v) mtilde + bdry
        const Eigen::MatrixXd volume_part =
            (Tp * Hx).transpose() * D; // (np1 x nd) moments of div against mtilde
        for (int a = 1; a < np1; ++a)
            R_raw.row(a - 1) = -geo.diameter * volume_part.row(a);
        for (int le = 0; le < dofs.n_edges; ++le) {
            const auto& er = edge_rules[le];
            for (int i = 0; i <= k; ++i) {
                const int col = dofs.edge_dof(le, i);
                for (int a = 1; a < np1; ++a) {
                    double s = 0.0;
                    for (std::size_t q = 0; q < er.points.size(); ++q)
                        s += er.weights[q] * quadrature::legendre(i, er.params[q]) *
                             kp1.eval_one(a, er.points[q]);
                    R_raw(a - 1, col) += geo.diameter * (2.0 * i + 1.0) * s;
                }
            }
        }
        // rotated family: the moments are the rot DoFs themselves
        for (int b = 0; b < dofs.n_rot(); ++b)
            R_raw(v_basis.n_grad() + b, dofs.rot_dof(b)) = geo.area;

        Pi = Gv_llt.solve(Tv * R_raw);
    }

    void build_dof_functionals()
    {
        const int nv = n_vector();
        Eigen::MatrixXd L_raw = Eigen::MatrixXd::Zero(n_dofs(), nv);
        for (int le = 0; le < dofs.n_edges; ++le) {
            const auto& e = geo.edges[le];
            const auto& er = edge_rules[le];
            for (int j = 0; j < nv; ++j) {
                for (std::size_t q = 0; q < er.points.size(); ++q) {
                    const double vn = v_basis.eval_one(j, er.points[q]).dot(e.n_out);
                    for (int i = 0; i <= k; ++i)
                        L_raw(dofs.edge_dof(le, i), j) +=
                            er.weights[q] * vn * quadrature::legendre(i, er.params[q]) / e.len;
                }
            }
        }
        for (const auto& q : cell_rule.points) {
            for (int j = 0; j < nv; ++j) {
                const Vec2 val = v_basis.eval_one(j, q.x);
                const double dv = v_basis.div_one(j, q.x);
                for (int a = 1; a < n_pressure(); ++a)
                    L_raw(dofs.div_dof(a), j) +=
                        q.w * dv * p_basis.eval_one(a, q.x) * geo.diameter / geo.area;
                for (int b = 0; b < dofs.n_rot(); ++b)
                    L_raw(dofs.rot_dof(b), j) +=
                        q.w * val.dot(v_basis.eval_one(v_basis.n_grad() + b, q.x)) / geo.area;
            }
        }
        Lambda = L_raw * Tv.transpose();
    }

    void build_mass()
    {
        Q = Lambda * Pi;
        const Eigen::MatrixXd C = Pi.transpose() * Gv * Pi;
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n_dofs(), n_dofs());
        const Eigen::MatrixXd S = (I - Q).transpose() * (I - Q);
        Mh = C + geo.area * S;
        Mh = 0.5 * (Mh + Mh.transpose()).eval();
    }

    Eigen::MatrixXd H_raw_;

public:
    Eigen::MatrixXd Lambda; // DoF functionals of the vector basis (n_dofs x n_vector)
    const Eigen::MatrixXd& raw_scalar_gram() const { return H_raw_; }
};

// Global numbering: all edge DoFs first (edge-major, moment-minor), then the
// per-cell divergence and rotated moments. Pressure coefficients are
// cell-major in the transformed pressure basis.
class DofMap {
public:
    DofMap(const PolygonalMesh& mesh, int order) : k_(order)
    {
        if (order < 0) throw ConfigError("method order k must be >= 0");
        n_edges_ = static_cast<int>(mesh.n_edges());
        n_cells_ = static_cast<int>(mesh.n_cells());
        per_edge_ = k_ + 1;
        per_cell_ = k_ * k_ + 2 * k_;
        per_cell_pressure_ = poly_space_dim(k_);

        local_maps_.resize(mesh.n_cells());
        for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
            const MeshCell& cell = mesh.cells[c];
            auto& lm = local_maps_[c];
            const int n_loc = static_cast<int>(cell.edges.size()) * per_edge_ + per_cell_;
            lm.index.resize(n_loc);
            lm.sign.resize(n_loc);
            int pos = 0;
            for (std::size_t le = 0; le < cell.edges.size(); ++le)
                for (int i = 0; i < per_edge_; ++i, ++pos) {
                    lm.index[pos] = edge_dof(cell.edges[le], i);
                    lm.sign[pos] = static_cast<double>(cell.edge_signs[le]);
                }
            for (int i = 0; i < per_cell_; ++i, ++pos) {
                lm.index[pos] = cell_dof_base(static_cast<int>(c)) + i;
                lm.sign[pos] = 1.0;
            }
        }

        for (std::size_t e = 0; e < mesh.n_edges(); ++e)
            if (mesh.edges[e].tag == BoundaryTag::neumann)
                for (int i = 0; i < per_edge_; ++i)
                    essential_.push_back(edge_dof(static_cast<int>(e), i));
    }

    int k() const { return k_; }
    int n_velocity() const { return per_edge_ * n_edges_ + per_cell_ * n_cells_; }
    int n_pressure() const { return per_cell_pressure_ * n_cells_; }

    int edge_dof(int e, int moment) const { return e * per_edge_ + moment; }
    int cell_dof_base(int c) const { return per_edge_ * n_edges_ + c * per_cell_; }
    int pressure_dof(int c, int i) const { return c * per_cell_pressure_ + i; }
    int pressure_per_cell() const { return per_cell_pressure_; }

    struct LocalGlobal {
        std::vector<int> index;
        std::vector<double> sign; // local functional = sign * global functional
    };
    const LocalGlobal& cell_map(int c) const { return local_maps_[c]; }

    // DoFs constrained by Neumann data, ascending and unique.
    const std::vector<int>& essential_dofs() const { return essential_; }

    // Gather a cell's local DoF values (outward convention) from a global vector.
    Eigen::VectorXd gather(int c, const Eigen::VectorXd& global) const
    {
        const auto& lm = local_maps_[c];
        Eigen::VectorXd loc(lm.index.size());
        for (std::size_t i = 0; i < lm.index.size(); ++i)
            loc[i] = lm.sign[i] * global[lm.index[i]];
        return loc;
    }

private:
    int k_;
    int n_edges_ = 0, n_cells_ = 0;
    int per_edge_ = 0, per_cell_ = 0, per_cell_pressure_ = 0;
    std::vector<LocalGlobal> local_maps_;
    std::vector<int> essential_;
};

inline ElementOps make_element_ops(const PolygonalMesh& mesh, int cell, int k,
                                   ElementOptions opts = {})
{
    return ElementOps(ElementGeometry::from_mesh(mesh, cell), k, opts);
}

// Fortin interpolation of an analytic field: every global DoF functional is
// evaluated on w. Edge moments use the stored global edge orientation, so the
// result is single-valued across interior edges by construction.
inline Eigen::VectorXd fortin_interpolate(const PolygonalMesh& mesh, const DofMap& dofmap,
                                          const std::vector<ElementOps>& ops,
                                          const VectorField& w, double t)
{
    const int k = dofmap.k();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dofmap.n_velocity());
    for (std::size_t e = 0; e < mesh.n_edges(); ++e) {
        const MeshEdge& me = mesh.edges[e];
        const Vec2 a = mesh.vertices[me.v0];
        const Vec2 b = mesh.vertices[me.v1];
        const Vec2 n = rot90(b - a) / (b - a).norm();
        const int order = ops.empty() ? std::max(2 * k + 2, 12) : ops.front().data_order;
        const EdgeQuadrature rule = edge_rule(a, b, order);
        for (int i = 0; i <= k; ++i) {
            double s = 0.0;
            for (std::size_t q = 0; q < rule.points.size(); ++q)
                s += rule.weights[q] * w(rule.points[q], t).dot(n) *
                     quadrature::legendre(i, rule.params[q]);
            g[dofmap.edge_dof(static_cast<int>(e), i)] = s / (b - a).norm();
        }
    }
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
        const ElementOps& op = ops[c];
        const Eigen::VectorXd loc = op.interpolate(w, t);
        const int base = dofmap.cell_dof_base(static_cast<int>(c));
        const int n_cell = op.dofs.n_div() + op.dofs.n_rot();
        for (int i = 0; i < n_cell; ++i) g[base + i] = loc[op.dofs.n_edge_dofs() + i];
    }
    return g;
}

} // namespace polywave
