#pragma once

#include "polywave/space.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCore>

#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

namespace polywave {

// Piecewise-constant wave speed keyed by the cell region tag, plus the Robin
// impedance parameter.
struct MaterialField {
    std::map<int, double> c_by_region = {{0, 1.0}};
    double alpha = 1.0;

    double c(int region) const
    {
        auto it = c_by_region.find(region);
        if (it == c_by_region.end())
            throw ConfigError("no wave speed registered for region " + std::to_string(region));
        if (it->second <= 0.0) throw ConfigError("wave speed must be positive");
        return it->second;
    }

    // max over regions of 1/c, the constant appearing in the error bounds
    double c_hat() const
    {
        double m = 0.0;
        for (const auto& [r, c] : c_by_region) m = std::max(m, 1.0 / c);
        return m;
    }
};

using SparseMat = Eigen::SparseMatrix<double>;

// Assembled blocks of the semi-discrete system
//   M du/dt + B^T p + R u = G_u,   N dp/dt - B u = F_p.
struct GlobalSystem {
    int n_u = 0, n_p = 0;
    SparseMat M; // velocity mass (m_h), symmetric
    SparseMat N; // pressure mass (c^-2 weighted), block diagonal SPD
    SparseMat B; // divergence coupling, n_p x n_u
    SparseMat R; // Robin boundary form, diagonal PSD

    std::vector<int> essential;  // Neumann-constrained velocity DoFs, ascending
    std::vector<int> free_of;    // full index -> reduced index or -1
    std::vector<int> full_of;    // reduced index -> full index

    int n_free() const { return static_cast<int>(full_of.size()); }

    Eigen::VectorXd reduce(const Eigen::VectorXd& full) const
    {
        Eigen::VectorXd r(n_free());
        for (int i = 0; i < n_free(); ++i) r[i] = full[full_of[i]];
        return r;
    }

    Eigen::VectorXd expand(const Eigen::VectorXd& reduced,
                           const Eigen::VectorXd& essential_values) const
    {
        Eigen::VectorXd full = essential_values;
        for (int i = 0; i < n_free(); ++i) full[full_of[i]] = reduced[i];
        return full;
    }

    double energy(const Eigen::VectorXd& u, const Eigen::VectorXd& p) const
    {
        return u.dot(M * u) + p.dot(N * p);
    }
};

namespace assemblydetail {

// Accumulator that keeps mirrored entries bitwise identical: both (i,j) and
// (j,i) receive the same addends in the same cell order.
class SymmetricAccumulator {
public:
    void add(int i, int j, double v) { map_[key(i, j)] += v; }

    SparseMat build(int n) const
    {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(map_.size());
        for (const auto& [k, v] : map_)
            trips.emplace_back(static_cast<int>(k >> 32), static_cast<int>(k & 0xffffffff), v);
        SparseMat m(n, n);
        m.setFromTriplets(trips.begin(), trips.end());
        m.makeCompressed();
        return m;
    }

private:
    static std::int64_t key(int i, int j)
    {
        return (static_cast<std::int64_t>(i) << 32) | static_cast<std::uint32_t>(j);
    }
    std::unordered_map<std::int64_t, double> map_;
};

} // namespace assemblydetail

// Robin edge matrix on the k+1 normal-moment DoFs of one boundary edge. With
// the Legendre edge moments this is diagonal: r_ii = alpha c (2i+1) h_e.
inline Eigen::MatrixXd local_robin(double edge_length, int k, double alpha_c)
{
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (int i = 0; i <= k; ++i) R(i, i) = alpha_c * (2.0 * i + 1.0) * edge_length;
    return R;
}

inline std::vector<ElementOps> build_element_ops(const PolygonalMesh& mesh, int k,
                                                 ElementOptions opts = {})
{
    std::vector<ElementOps> ops;
    ops.reserve(mesh.n_cells());
    for (std::size_t c = 0; c < mesh.n_cells(); ++c)
        ops.push_back(make_element_ops(mesh, static_cast<int>(c), k, opts));
    return ops;
}

inline GlobalSystem assemble(const PolygonalMesh& mesh, const DofMap& dofmap,
                             const std::vector<ElementOps>& ops, const MaterialField& material)
{
    GlobalSystem sys;
    sys.n_u = dofmap.n_velocity();
    sys.n_p = dofmap.n_pressure();

    assemblydetail::SymmetricAccumulator accM;
    std::vector<Eigen::Triplet<double>> tripN, tripB;

    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
        const ElementOps& op = ops[c];
        const auto& lm = dofmap.cell_map(static_cast<int>(c));
        const int nd = op.n_dofs();
        if (static_cast<int>(lm.index.size()) != nd)
            throw StructuralError("DoF map / element size mismatch in cell " + std::to_string(c));

        for (int i = 0; i < nd; ++i)
            for (int j = 0; j < nd; ++j)
                accM.add(lm.index[i], lm.index[j], lm.sign[i] * lm.sign[j] * op.Mh(i, j));

        const double cinv2 = 1.0 / (material.c(mesh.cells[c].region) * material.c(mesh.cells[c].region));
        for (int i = 0; i < op.n_pressure(); ++i)
            for (int j = 0; j < op.n_pressure(); ++j)
                tripN.emplace_back(dofmap.pressure_dof(static_cast<int>(c), i),
                                   dofmap.pressure_dof(static_cast<int>(c), j),
                                   cinv2 * op.Hp(i, j));

        for (int i = 0; i < op.n_pressure(); ++i)
            for (int j = 0; j < nd; ++j) {
                const double v = op.Bloc(i, j);
                if (v != 0.0)
                    tripB.emplace_back(dofmap.pressure_dof(static_cast<int>(c), i),
                                       lm.index[j], lm.sign[j] * v);
            }
    }

    sys.M = accM.build(sys.n_u);
    sys.N.resize(sys.n_p, sys.n_p);
    sys.N.setFromTriplets(tripN.begin(), tripN.end());
    sys.B.resize(sys.n_p, sys.n_u);
    sys.B.setFromTriplets(tripB.begin(), tripB.end());

    // Robin form: boundary edges carry outward global normals, no signs needed
    std::vector<Eigen::Triplet<double>> tripR;
    const int k = dofmap.k();
    for (std::size_t e = 0; e < mesh.n_edges(); ++e) {
        const MeshEdge& me = mesh.edges[e];
        if (me.tag != BoundaryTag::robin) continue;
        const double len = mesh.edge_length(static_cast<int>(e));
        const double ac = material.alpha * material.c(mesh.cells[me.cell0].region);
        const Eigen::MatrixXd Re = local_robin(len, k, ac);
        for (int i = 0; i <= k; ++i)
            tripR.emplace_back(dofmap.edge_dof(static_cast<int>(e), i),
                               dofmap.edge_dof(static_cast<int>(e), i), Re(i, i));
    }
    sys.R.resize(sys.n_u, sys.n_u);
    sys.R.setFromTriplets(tripR.begin(), tripR.end());

    sys.essential = dofmap.essential_dofs();
    sys.free_of.assign(sys.n_u, -1);
    std::vector<bool> is_ess(sys.n_u, false);
    for (int e : sys.essential) is_ess[e] = true;
    for (int i = 0; i < sys.n_u; ++i)
        if (!is_ess[i]) {
            sys.free_of[i] = static_cast<int>(sys.full_of.size());
            sys.full_of.push_back(i);
        }
    return sys;
}

// Load vectors and boundary data at one time level.
struct Loads {
    Eigen::VectorXd F_p;              // pressure-equation source
    Eigen::VectorXd G_u;              // natural velocity data (Dirichlet + Robin)
    Eigen::VectorXd essential_values; // full-size, zero outside essential DoFs
};

struct BoundaryData {
    ScalarField f;
    ScalarField g_dirichlet;
    ScalarField g_neumann;
    ScalarField g_robin;

    static BoundaryData from_scenario(const ScenarioData& s)
    {
        return {s.f, s.g_dirichlet, s.g_neumann, s.g_robin};
    }
};

inline Loads load_and_boundary(const PolygonalMesh& mesh, const DofMap& dofmap,
                               const std::vector<ElementOps>& ops,
                               const MaterialField& material, const BoundaryData& data,
                               double t)
{
    const int k = dofmap.k();
    Loads loads;
    loads.F_p = Eigen::VectorXd::Zero(dofmap.n_pressure());
    loads.G_u = Eigen::VectorXd::Zero(dofmap.n_velocity());
    loads.essential_values = Eigen::VectorXd::Zero(dofmap.n_velocity());

    if (data.f.valid()) {
        for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
            const ElementOps& op = ops[c];
            Eigen::VectorXd mom = Eigen::VectorXd::Zero(op.n_pressure());
            for (const auto& q : op.cell_rule.points) {
                const double fv = data.f(q.x, t);
                if (fv == 0.0) continue;
                for (int a = 0; a < op.n_pressure(); ++a)
                    mom[a] += q.w * fv * op.p_basis.eval_one(a, q.x);
            }
            const Eigen::VectorXd local = op.Tp * mom;
            for (int a = 0; a < op.n_pressure(); ++a)
                loads.F_p[dofmap.pressure_dof(static_cast<int>(c), a)] = local[a];
        }
    }

    for (std::size_t e = 0; e < mesh.n_edges(); ++e) {
        const MeshEdge& me = mesh.edges[e];
        if (me.tag == BoundaryTag::interior || me.tag == BoundaryTag::untagged) continue;
        const Vec2 a = mesh.vertices[me.v0];
        const Vec2 b = mesh.vertices[me.v1];
        const double len = (b - a).norm();
        const EdgeQuadrature rule = edge_rule(a, b, 2 * k + 2);

        if (me.tag == BoundaryTag::dirichlet || me.tag == BoundaryTag::robin) {
            const ScalarField& g =
                me.tag == BoundaryTag::dirichlet ? data.g_dirichlet : data.g_robin;
            if (!g.valid()) continue;
            const double scale =
                me.tag == BoundaryTag::robin
                    ? material.alpha * material.c(mesh.cells[me.cell0].region)
                    : 1.0;
            for (int i = 0; i <= k; ++i) {
                double s = 0.0;
                for (std::size_t q = 0; q < rule.points.size(); ++q)
                    s += rule.weights[q] * g(rule.points[q], t) *
                         quadrature::legendre(i, rule.params[q]);
                loads.G_u[dofmap.edge_dof(static_cast<int>(e), i)] +=
                    scale * (2.0 * i + 1.0) * s;
            }
        } else { // Neumann: essential DoF values are the edge moments of g_N
            if (!data.g_neumann.valid()) continue;
            for (int i = 0; i <= k; ++i) {
                double s = 0.0;
                for (std::size_t q = 0; q < rule.points.size(); ++q)
                    s += rule.weights[q] * data.g_neumann(rule.points[q], t) *
                         quadrature::legendre(i, rule.params[q]);
                loads.essential_values[dofmap.edge_dof(static_cast<int>(e), i)] = s / len;
            }
        }
    }
    return loads;
}

} // namespace polywave
